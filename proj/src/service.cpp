#include "quam/service.hpp"

#include <cstdio>
#include <random>
#include <vector>

#include <httplib.h>

namespace quam::service {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

Response error_response(const Error& e) {
  io::json body{{"error", to_string(e.code())}, {"message", e.what()}};
  if (!e.report().ok()) body["violations"] = io::to_json(e.report());
  return {status_for(e.code()), std::move(body)};
}

Response not_found(const std::string& what) {
  return {404, {{"error", to_string(ErrorCode::not_found)}, {"message", what}}};
}

io::json parse_body(const std::string& body) {
  try {
    return io::json::parse(body);
  } catch (const io::json::parse_error& e) {
    throw Error(ErrorCode::syntax, std::string("request body: ") + e.what());
  }
}

}  // namespace

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig cfg;
  io::json j;
  try {
    j = io::json::parse(io::read_file(path));
  } catch (const io::json::parse_error& e) {
    throw Error(ErrorCode::syntax, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::schema, path + ": expected an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "host" && v.is_string())
      cfg.host = v.get<std::string>();
    else if (key == "port" && v.is_number_integer())
      cfg.port = v.get<int>();
    else if (key == "storage_dir" && v.is_string())
      cfg.storage_dir = v.get<std::string>();
    else
      throw Error(ErrorCode::schema, path + ": unknown or mistyped field '" + key + "'");
  }
  return cfg;
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::illegal_move:
    case ErrorCode::empty_ledger: return 409;
    case ErrorCode::io: return 500;
    default: return 400;
  }
}

// ---- SessionStore -------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)), id_state_(std::random_device{}()) {
  namespace fs = std::filesystem;
  fs::create_directories(dir_);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    auto session = io::parse_session(io::read_file(entry.path().string()));
    sessions_.emplace(entry.path().stem().string(), std::make_shared<Entry>(std::move(session)));
  }
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(index_mutex_);
  return sessions_.size();
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(index_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session " + id);
  return it->second;
}

void SessionStore::persist(const std::string& id, const MediationSession& session) const {
  io::write_file_atomic((dir_ / (id + ".json")).string(), io::serialize_session(session));
}

std::string SessionStore::fresh_id() {
  std::lock_guard lock(id_mutex_);
  // splitmix64 over a random seed; ids only need to be unique, not secret.
  id_state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = id_state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  char buf[24];
  std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(z));
  return buf;
}

std::string SessionStore::create(const io::SessionDocument& doc) {
  auto session = io::load_session(doc);
  std::string id;
  do {
    id = fresh_id();
  } while ([&] {
    std::shared_lock lock(index_mutex_);
    return sessions_.count(id) > 0;
  }());
  persist(id, session);
  std::unique_lock lock(index_mutex_);
  sessions_.emplace(id, std::make_shared<Entry>(std::move(session)));
  return id;
}

io::json SessionStore::describe(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  const auto& s = entry->session;
  io::json current = io::json::array();
  for (int i = 0; i < 2; ++i) current.push_back(io::to_json(s.framework(i)));
  return {{"id", id},
          {"stage", s.stage()},
          {"session", io::to_json(io::to_document(s))},
          {"current_frameworks", std::move(current)}};
}

StageSnapshot SessionStore::apply_move(const std::string& id, const Move& move) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  MediationSession next = entry->session;
  StageSnapshot snap = next.apply_move(move);
  persist(id, next);
  entry->session = std::move(next);
  return snap;
}

StageSnapshot SessionStore::what_if(const std::string& id, const Move& move) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session.what_if(move);
}

int SessionStore::undo(const std::string& id) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  MediationSession next = entry->session;
  next.undo();
  persist(id, next);
  entry->session = std::move(next);
  return entry->session.stage();
}

io::json SessionStore::trajectory(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return io::to_json(entry->session.trajectory(), entry->session);
}

// ---- Api ----------------------------------------------------------------

Response Api::handle(const std::string& method, const std::string& path, const std::string& body) {
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "sessions" || parts.size() > 3) return not_found("no route for " + path);

  try {
    if (parts.size() == 1) {
      if (method != "POST") return {405, {{"error", "method_not_allowed"}, {"message", method + " " + path}}};
      auto doc = io::parse_document(body);
      return {201, {{"id", store_.create(doc)}}};
    }

    const std::string& id = parts[1];
    if (parts.size() == 2) {
      if (method != "GET") return {405, {{"error", "method_not_allowed"}, {"message", method + " " + path}}};
      return {200, store_.describe(id)};
    }

    const std::string& action = parts[2];
    if (action == "trajectory" && method == "GET") return {200, store_.trajectory(id)};
    if (method != "POST") return {405, {{"error", "method_not_allowed"}, {"message", method + " " + path}}};
    if (action == "moves") return {200, io::to_json(store_.apply_move(id, io::move_from_json(parse_body(body))))};
    if (action == "whatif") return {200, io::to_json(store_.what_if(id, io::move_from_json(parse_body(body))))};
    if (action == "undo") return {200, {{"stage", store_.undo(id)}}};
    return not_found("no route for " + path);
  } catch (const Error& e) {
    return error_response(e);
  }
}

// ---- Server -------------------------------------------------------------

Server::Server(Api& api) : api_(api), http_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = api_.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const char* pattern = R"(/sessions(/.*)?)";
  http_->Get(pattern, route);
  http_->Post(pattern, route);
}

Server::~Server() = default;

int Server::bind_any_port(const std::string& host) { return http_->bind_to_any_port(host); }

bool Server::bind(const std::string& host, int port) { return http_->bind_to_port(host, port); }

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

void Server::wait_until_ready() const { http_->wait_until_ready(); }

}  // namespace quam::service
