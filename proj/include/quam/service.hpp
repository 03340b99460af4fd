#pragma once

// HTTP facade over mediation sessions. Api holds the routing and status
// mapping independent of the transport; Server binds it to cpp-httplib.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "quam/io.hpp"

namespace httplib {
class Server;
}

namespace quam::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path storage_dir = "sessions";
};

/// Reads {"host", "port", "storage_dir"} from a JSON file; absent keys keep defaults.
ServiceConfig load_service_config(const std::string& path);

/// Sessions by id, each persisted as <storage_dir>/<id>.json after every
/// committed change. Writers are exclusive per session; readers share.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  std::string create(const io::SessionDocument& doc);
  io::json describe(const std::string& id) const;
  StageSnapshot apply_move(const std::string& id, const Move& move);
  StageSnapshot what_if(const std::string& id, const Move& move) const;
  int undo(const std::string& id);
  io::json trajectory(const std::string& id) const;
  std::size_t size() const;

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    MediationSession session;
    explicit Entry(MediationSession s) : session(std::move(s)) {}
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(const std::string& id, const MediationSession& session) const;
  std::string fresh_id();

  std::filesystem::path dir_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

struct Response {
  int status = 200;
  io::json body;
};

class Api {
 public:
  explicit Api(SessionStore& store) : store_(store) {}

  Response handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  SessionStore& store_;
};

/// HTTP status for a library error.
int status_for(ErrorCode code);

class Server {
 public:
  explicit Server(Api& api);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to an ephemeral port and returns it; -1 on failure.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  Api& api_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace quam::service
