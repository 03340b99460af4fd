#include "quam/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace quam::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::schema, "schema violation at " + (path.empty() ? "/" : path) + ": " + message);
}

std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) schema_error(child(path, key), "unknown field");
  }
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) schema_error(child(path, key), "missing required field");
  return *it;
}

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "expected a finite number");
  return v;
}

double get_unit(const json& j, const std::string& path, std::string_view what) {
  double v = get_number(j, path);
  if (v < 0.0 || v > 1.0) schema_error(path, std::string(what) + " out of [0,1]");
  return v;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

template <class T, class Parse>
T get_enum(const json& j, const std::string& path, Parse parse, std::string_view what) {
  auto s = get_string(j, path);
  auto v = parse(s);
  if (!v) schema_error(path, "unknown " + std::string(what) + " '" + s + "'");
  return *v;
}

json num(double v) { return json(quantize(v)); }

json nullable(const FoldResult& v) { return v ? num(*v) : json(nullptr); }

// ---- reading ------------------------------------------------------------

Argument read_argument_fields(const json& j, const std::string& path) {
  Argument a;
  a.id = get_string(require(j, "id", path), child(path, "id"));
  if (a.id.empty()) schema_error(child(path, "id"), "argument id must be non-empty");
  if (auto it = j.find("text"); it != j.end()) a.text = get_string(*it, child(path, "text"));
  a.kind = get_enum<ArgumentClass>(require(j, "class", path), child(path, "class"), parse_argument_class, "class");
  a.provenance = Provenance::party;
  if (auto it = j.find("provenance"); it != j.end())
    a.provenance = get_enum<Provenance>(*it, child(path, "provenance"), parse_provenance, "provenance");
  a.base_score = get_unit(require(j, "base_score", path), child(path, "base_score"), "base score");
  return a;
}

Argument read_argument(const json& j, const std::string& path) {
  expect_object(j, path, {"id", "text", "class", "provenance", "base_score"});
  return read_argument_fields(j, path);
}

Relation read_relation(const json& j, const std::string& path, const std::optional<std::string>& default_source) {
  expect_object(j, path, {"source", "target", "polarity", "weight"});
  Relation r;
  if (auto it = j.find("source"); it != j.end())
    r.source = get_string(*it, child(path, "source"));
  else if (default_source)
    r.source = *default_source;
  else
    schema_error(child(path, "source"), "missing required field");
  r.target = get_string(require(j, "target", path), child(path, "target"));
  r.polarity = get_enum<Polarity>(require(j, "polarity", path), child(path, "polarity"), parse_polarity, "polarity");
  r.weight = get_unit(require(j, "weight", path), child(path, "weight"), "weight");
  return r;
}

QuamFramework read_framework(const json& j, const std::string& path) {
  expect_object(j, path, {"party", "arguments", "relations"});
  QuamFramework fw;
  fw.party_label = get_string(require(j, "party", path), child(path, "party"));
  const auto ap = child(path, "arguments");
  const auto& args = expect_array(require(j, "arguments", path), ap);
  for (std::size_t i = 0; i < args.size(); ++i) fw.arguments.push_back(read_argument(args[i], child(ap, i)));
  if (auto it = j.find("relations"); it != j.end()) {
    const auto rp = child(path, "relations");
    expect_array(*it, rp);
    for (std::size_t i = 0; i < it->size(); ++i)
      fw.relations.push_back(read_relation((*it)[i], child(rp, i), std::nullopt));
  }
  return fw;
}

DisputeConfig read_config(const json& j, const std::string& path) {
  expect_object(j, path, {"variable_class", "k", "x", "y", "roles", "floors", "transforms", "bjv_distance"});
  DisputeConfig c;
  c.variable_class = get_enum<VariableClass>(require(j, "variable_class", path), child(path, "variable_class"),
                                             parse_variable_class, "variable class");
  if (auto it = j.find("k"); it != j.end()) c.k = get_number(*it, child(path, "k"));
  if (auto it = j.find("x"); it != j.end()) c.x = get_unit(*it, child(path, "x"), "target x");
  if (auto it = j.find("y"); it != j.end()) c.y = get_unit(*it, child(path, "y"), "target y");

  const auto roles = roles_of(c.variable_class);
  auto slot_of = [&](const std::string& role_name, const std::string& p) {
    auto role = parse_role(role_name);
    if (!role || (*role != roles[0] && *role != roles[1]))
      schema_error(p, "role '" + role_name + "' is not valid for " + std::string(to_string(c.variable_class)));
    return role_slot(*role);
  };

  const auto rp = child(path, "roles");
  const auto& rj = require(j, "roles", path);
  if (!rj.is_object() || rj.size() != 2) schema_error(rp, "expected an object mapping two parties to roles");
  std::array<bool, 2> seen{false, false};
  for (const auto& [party, role] : rj.items()) {
    const int slot = slot_of(get_string(role, child(rp, party)), child(rp, party));
    if (seen[slot]) schema_error(child(rp, party), "role assigned twice");
    seen[slot] = true;
    c.parties[slot] = party;
  }

  if (auto it = j.find("floors"); it != j.end()) {
    const auto fp = child(path, "floors");
    if (!it->is_object()) schema_error(fp, "expected an object");
    for (const auto& [role, v] : it->items()) c.floors[slot_of(role, child(fp, role))] = get_number(v, child(fp, role));
  }
  if (auto it = j.find("transforms"); it != j.end()) {
    const auto tp = child(path, "transforms");
    if (!it->is_object()) schema_error(tp, "expected an object");
    for (const auto& [role, v] : it->items()) {
      const auto p = child(tp, role);
      const int slot = slot_of(role, p);
      expect_object(v, p, {"slope", "intercept"});
      c.transforms[slot] = AffineMap{get_number(require(v, "slope", p), child(p, "slope")),
                                     get_number(require(v, "intercept", p), child(p, "intercept"))};
    }
  }
  if (auto it = j.find("bjv_distance"); it != j.end()) {
    auto s = get_string(*it, child(path, "bjv_distance"));
    if (s == "consistent")
      c.bjv_distance = BjvDistance::consistent;
    else if (s == "literal")
      c.bjv_distance = BjvDistance::literal;
    else
      schema_error(child(path, "bjv_distance"), "expected 'consistent' or 'literal'");
  }
  return c;
}

PersuasiveArgument read_persuasive(const json& j, const std::string& path) {
  expect_object(j, path, {"id", "text", "class", "provenance", "base_score", "known_relations", "norm_priority"});
  PersuasiveArgument pa;
  pa.argument = read_argument_fields(j, path);
  if (auto it = j.find("known_relations"); it != j.end()) {
    const auto kp = child(path, "known_relations");
    expect_array(*it, kp);
    for (std::size_t i = 0; i < it->size(); ++i)
      pa.known_relations.push_back(read_relation((*it)[i], child(kp, i), pa.argument.id));
  }
  if (auto it = j.find("norm_priority"); it != j.end())
    pa.norm_priority = get_int(*it, child(path, "norm_priority"));
  return pa;
}

Move read_move(const json& j, const std::string& path) {
  expect_object(j, path, {"stage", "party", "argument", "relation"});
  Move m;
  m.stage_index = get_int(require(j, "stage", path), child(path, "stage"));
  m.target_party = get_string(require(j, "party", path), child(path, "party"));
  m.persuasive_id = get_string(require(j, "argument", path), child(path, "argument"));
  m.relation = read_relation(require(j, "relation", path), child(path, "relation"), m.persuasive_id);
  return m;
}

// ---- writing ------------------------------------------------------------

json argument_json(const Argument& a) {
  return json{{"id", a.id},
              {"text", a.text},
              {"class", to_string(a.kind)},
              {"provenance", to_string(a.provenance)},
              {"base_score", num(a.base_score)}};
}

json relation_json(const Relation& r) {
  return json{{"source", r.source}, {"target", r.target}, {"polarity", to_string(r.polarity)}, {"weight", num(r.weight)}};
}

json framework_json(const QuamFramework& fw) {
  json args = json::array();
  for (const auto& a : fw.arguments) args.push_back(argument_json(a));
  json rels = json::array();
  for (const auto& r : fw.relations) rels.push_back(relation_json(r));
  return json{{"party", fw.party_label}, {"arguments", std::move(args)}, {"relations", std::move(rels)}};
}

json config_json(const DisputeConfig& c) {
  const auto roles = roles_of(c.variable_class);
  json j{{"variable_class", to_string(c.variable_class)}, {"k", num(c.k)}, {"x", num(c.x)}, {"y", num(c.y)}};
  j["roles"] = json::object();
  j["floors"] = json::object();
  for (int i = 0; i < 2; ++i) {
    j["roles"][c.parties[i]] = to_string(roles[i]);
    j["floors"][std::string(to_string(roles[i]))] = num(c.floors[i]);
  }
  json transforms = json::object();
  for (int i = 0; i < 2; ++i)
    if (c.transforms[i])
      transforms[std::string(to_string(roles[i]))] = {{"slope", num(c.transforms[i]->slope)},
                                                      {"intercept", num(c.transforms[i]->intercept)}};
  if (!transforms.empty()) j["transforms"] = std::move(transforms);
  j["bjv_distance"] = c.bjv_distance == BjvDistance::literal ? "literal" : "consistent";
  return j;
}

json persuasive_json(const PersuasiveArgument& pa) {
  json j = argument_json(pa.argument);
  json rels = json::array();
  for (const auto& r : pa.known_relations) rels.push_back(relation_json(r));
  j["known_relations"] = std::move(rels);
  if (pa.norm_priority) j["norm_priority"] = *pa.norm_priority;
  return j;
}

std::string_view constraint_name(Constraint c) { return c == Constraint::c1_pinned_attack ? "C1" : "C2"; }

std::string describe_parse_error(std::string_view text, const json::parse_error& e) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what();
}

}  // namespace

double quantize(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  double q = std::strtod(buf, nullptr);
  return q == 0.0 ? 0.0 : q;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  // Keep "-0.000000" out of the output.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

SessionDocument parse_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::syntax, describe_parse_error(text, e));
  }

  const std::string path;
  expect_object(root, path,
                {"version", "frameworks", "config", "persuasive_sets", "norm_conflicts", "ledger", "snapshots"});
  SessionDocument doc;
  doc.version = get_string(require(root, "version", path), "/version");
  if (doc.version != kFormatVersion)
    schema_error("/version", "unsupported format version '" + doc.version + "'");

  const auto& fws = expect_array(require(root, "frameworks", path), "/frameworks");
  if (fws.size() != 2) schema_error("/frameworks", "expected exactly two frameworks");
  for (std::size_t i = 0; i < 2; ++i) doc.setup.frameworks[i] = read_framework(fws[i], child("/frameworks", i));

  doc.setup.config = read_config(require(root, "config", path), "/config");

  if (auto it = root.find("persuasive_sets"); it != root.end()) {
    if (!it->is_object()) schema_error("/persuasive_sets", "expected an object");
    for (const auto& [party, list] : it->items()) {
      const auto p = child("/persuasive_sets", party);
      expect_array(list, p);
      auto& out = doc.setup.persuasive_sets[party];
      for (std::size_t i = 0; i < list.size(); ++i) out.push_back(read_persuasive(list[i], child(p, i)));
    }
  }
  if (auto it = root.find("norm_conflicts"); it != root.end()) {
    expect_array(*it, "/norm_conflicts");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto p = child("/norm_conflicts", i);
      const auto& pair = (*it)[i];
      if (!pair.is_array() || pair.size() != 2) schema_error(p, "expected a pair of argument ids");
      doc.setup.norm_conflicts.emplace_back(get_string(pair[0], child(p, 0)), get_string(pair[1], child(p, 1)));
    }
  }
  if (auto it = root.find("ledger"); it != root.end()) {
    expect_array(*it, "/ledger");
    for (std::size_t i = 0; i < it->size(); ++i) doc.ledger.push_back(read_move((*it)[i], child("/ledger", i)));
  }
  if (auto it = root.find("snapshots"); it != root.end()) {
    expect_array(*it, "/snapshots");
    std::vector<json> stored;
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_object()) schema_error(child("/snapshots", i), "expected an object");
      stored.push_back((*it)[i]);
    }
    doc.stored_snapshots = std::move(stored);
  }
  return doc;
}

MediationSession load_session(const SessionDocument& doc) { return MediationSession::replay(doc.setup, doc.ledger); }

MediationSession parse_session(std::string_view text) { return load_session(parse_document(text)); }

SessionDocument to_document(const MediationSession& session) {
  SessionDocument doc;
  doc.setup = session.setup();
  doc.ledger = session.ledger();
  std::vector<json> snaps;
  for (const auto& s : session.snapshots()) snaps.push_back(to_json(s));
  doc.stored_snapshots = std::move(snaps);
  return doc;
}

json to_json(const SessionDocument& doc) {
  json fws = json::array();
  for (const auto& fw : doc.setup.frameworks) fws.push_back(framework_json(fw));
  json sets = json::object();
  for (const auto& [party, list] : doc.setup.persuasive_sets) {
    json arr = json::array();
    for (const auto& pa : list) arr.push_back(persuasive_json(pa));
    sets[party] = std::move(arr);
  }
  json conflicts = json::array();
  for (const auto& [a, b] : doc.setup.norm_conflicts) conflicts.push_back(json::array({a, b}));
  json ledger = json::array();
  for (const auto& m : doc.ledger) ledger.push_back(to_json(m));

  json root{{"version", doc.version},
            {"frameworks", std::move(fws)},
            {"config", config_json(doc.setup.config)},
            {"persuasive_sets", std::move(sets)},
            {"norm_conflicts", std::move(conflicts)},
            {"ledger", std::move(ledger)}};
  if (doc.stored_snapshots) root["snapshots"] = *doc.stored_snapshots;
  return root;
}

std::string serialize_document(const SessionDocument& doc) { return to_json(doc).dump(2) + "\n"; }

std::string serialize_session(const MediationSession& session) { return serialize_document(to_document(session)); }

json to_json(const QuamFramework& fw) { return framework_json(fw); }

json to_json(const StageSnapshot& s) {
  json parties = json::array();
  for (const auto& p : s.parties) {
    json nodes = json::object();
    for (const auto& [id, n] : p.evaluation.nodes)
      nodes[id] = {{"base_score", num(n.base_score)},
                   {"attack", nullable(n.attack)},
                   {"support", nullable(n.support)},
                   {"score", num(n.score)}};
    json trace = json::array();
    for (const auto& c : p.evaluation.constraint_trace)
      trace.push_back({{"constraint", constraint_name(c.constraint)}, {"target", c.target}, {"trigger", c.trigger}});
    parties.push_back({{"party", p.party},
                       {"goal", p.goal},
                       {"goal_score", num(p.goal_score)},
                       {"mapped_value", num(p.mapped_value)},
                       {"nodes", std::move(nodes)},
                       {"constraints", std::move(trace)}});
  }
  return json{{"stage", s.stage_index},
              {"parties", std::move(parties)},
              {"distance", num(s.distance)},
              {"consensus", s.consensus}};
}

json to_json(const Move& m) {
  return json{{"stage", m.stage_index},
              {"party", m.target_party},
              {"argument", m.persuasive_id},
              {"relation", relation_json(m.relation)}};
}

json to_json(const ValidationReport& report) {
  json arr = json::array();
  for (const auto& v : report.violations) arr.push_back({{"code", v.code}, {"message", v.message}, {"ids", v.ids}});
  return arr;
}

json to_json(const std::vector<TrajectoryRow>& rows, const MediationSession& session) {
  json out = json::array();
  for (const auto& r : rows) {
    json parties = json::array();
    for (int i = 0; i < 2; ++i)
      parties.push_back({{"party", session.setup().frameworks[i].party_label},
                         {"goal_score", num(r.goal_scores[i])},
                         {"mapped_value", num(r.mapped_values[i])}});
    out.push_back({{"stage", r.stage}, {"parties", std::move(parties)}, {"distance", num(r.distance)},
                   {"consensus", r.consensus}});
  }
  return out;
}

Move move_from_json(const json& j) { return read_move(j, ""); }

bool ReplayReport::ok() const {
  for (const auto& s : stages)
    if (s.status == ReplayStage::Status::mismatch || s.status == ReplayStage::Status::unexpected) return false;
  return true;
}

ReplayReport replay_document(const SessionDocument& doc) {
  const MediationSession session = load_session(doc);
  ReplayReport report;
  const auto& fresh = session.snapshots();
  const std::size_t stored = doc.stored_snapshots ? doc.stored_snapshots->size() : 0;
  for (std::size_t i = 0; i < std::max(fresh.size(), stored); ++i) {
    ReplayStage st;
    st.stage = static_cast<int>(i);
    if (i >= fresh.size())
      st.status = ReplayStage::Status::unexpected;
    else if (i >= stored)
      st.status = ReplayStage::Status::missing;
    else
      st.status = to_json(fresh[i]) == (*doc.stored_snapshots)[i] ? ReplayStage::Status::match
                                                                  : ReplayStage::Status::mismatch;
    report.stages.push_back(st);
  }
  return report;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::io, "cannot replace " + path + ": " + ec.message());
}

}  // namespace quam::io
