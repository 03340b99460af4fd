#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "quam/service.hpp"

namespace {
quam::service::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for mediation sessions", "quam-service"};
  std::string config_file;
  std::string host;
  int port = 0;
  std::string storage;
  app.add_option("--config", config_file, "JSON file with host, port and storage_dir");
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Bind port")->check(CLI::Range(1, 65535));
  app.add_option("--storage", storage, "Directory holding session documents");
  CLI11_PARSE(app, argc, argv);

  try {
    quam::service::ServiceConfig cfg;
    if (!config_file.empty()) cfg = quam::service::load_service_config(config_file);
    if (!host.empty()) cfg.host = host;
    if (port != 0) cfg.port = port;
    if (!storage.empty()) cfg.storage_dir = storage;

    quam::service::SessionStore store(cfg.storage_dir);
    quam::service::Api api(store);
    quam::service::Server server(api);
    if (!server.bind(cfg.host, cfg.port)) {
      std::cerr << "cannot bind " << cfg.host << ':' << cfg.port << '\n';
      return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "quam-service on " << cfg.host << ':' << cfg.port << ", " << store.size()
              << " session(s) from " << cfg.storage_dir << '\n';
    return server.listen_after_bind() ? 0 : 1;
  } catch (const quam::Error& e) {
    std::cerr << "error (" << quam::to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  }
}
