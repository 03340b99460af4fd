#include "quam/framework.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace quam {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ',';
    out += id;
  }
  return out;
}

// Kahn's algorithm over the relations whose endpoints both exist. Returns the
// order found and leaves the ids that could not be placed in `stuck`.
std::vector<ArgumentId> kahn(const QuamFramework& fw, std::set<ArgumentId>& stuck) {
  std::map<ArgumentId, int> indegree;
  std::map<ArgumentId, std::vector<ArgumentId>> successors;
  for (const auto& a : fw.arguments) indegree.emplace(a.id, 0);
  for (const auto& r : fw.relations) {
    if (!indegree.count(r.source) || !indegree.count(r.target)) continue;
    ++indegree[r.target];
    successors[r.source].push_back(r.target);
  }

  std::priority_queue<ArgumentId, std::vector<ArgumentId>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push(id);

  std::vector<ArgumentId> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    ArgumentId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& next : successors[id])
      if (--indegree[next] == 0) ready.push(next);
  }
  for (const auto& [id, deg] : indegree)
    if (deg > 0) stuck.insert(id);
  return order;
}

// One concrete cycle among the ids Kahn could not place, sorted.
std::vector<ArgumentId> find_cycle(const QuamFramework& fw, const std::set<ArgumentId>& stuck) {
  std::map<ArgumentId, ArgumentId> predecessor;
  for (const auto& r : fw.relations)
    if (stuck.count(r.source) && stuck.count(r.target) && !predecessor.count(r.target))
      predecessor[r.target] = r.source;

  // Every stuck node has a stuck predecessor, so walking backwards must repeat.
  std::vector<ArgumentId> path;
  std::map<ArgumentId, std::size_t> seen;
  ArgumentId cur = *stuck.begin();
  while (!seen.count(cur)) {
    seen[cur] = path.size();
    path.push_back(cur);
    cur = predecessor.at(cur);
  }
  std::vector<ArgumentId> cycle(path.begin() + static_cast<std::ptrdiff_t>(seen[cur]), path.end());
  std::sort(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

const Argument* QuamFramework::find(std::string_view id) const {
  auto it = std::find_if(arguments.begin(), arguments.end(),
                         [&](const Argument& a) { return a.id == id; });
  return it == arguments.end() ? nullptr : &*it;
}

const Argument& QuamFramework::goal() const {
  for (const auto& a : arguments)
    if (a.kind == ArgumentClass::goal) return a;
  throw Error(ErrorCode::validation, "framework '" + party_label + "' has no goal argument");
}

ValidationReport validate_framework(const QuamFramework& fw) {
  ValidationReport report;

  std::map<ArgumentId, const Argument*> by_id;
  std::vector<ArgumentId> goals;
  for (const auto& a : fw.arguments) {
    if (a.id.empty()) {
      report.add("empty_id", "argument id must be non-empty");
      continue;
    }
    if (!by_id.emplace(a.id, &a).second)
      report.add("duplicate_id", "duplicate argument id: " + a.id, {a.id});
    if (!in_unit(a.base_score))
      report.add("base_score_range", "base score of " + a.id + " out of [0,1]", {a.id});
    if (a.kind == ArgumentClass::goal) {
      goals.push_back(a.id);
      if (a.base_score != 1.0)
        report.add("goal_base_score", "goal base score must be 1", {a.id});
      if (a.provenance != Provenance::party)
        report.add("goal_provenance", "goal argument must come from the party", {a.id});
    }
    if (is_pinned(a.provenance) && a.base_score != 1.0)
      report.add("pinned_base_score", "factual/mandatory base score must be 1", {a.id});
  }
  if (goals.size() != 1)
    report.add("goal_count",
               "exactly one goal argument required, found " + std::to_string(goals.size()), goals);

  std::set<std::pair<ArgumentId, ArgumentId>> edges;
  for (const auto& r : fw.relations) {
    const std::vector<std::string> ids{r.source, r.target};
    if (!in_unit(r.weight))
      report.add("weight_range", "weight of " + r.source + "->" + r.target + " out of [0,1]", ids);
    if (r.source == r.target)
      report.add("self_relation", "relation source equals target: " + r.source, ids);
    if (!edges.emplace(r.source, r.target).second)
      report.add("duplicate_relation", "duplicate relation " + r.source + "->" + r.target, ids);

    auto src = by_id.find(r.source);
    auto dst = by_id.find(r.target);
    if (src == by_id.end())
      report.add("dangling_endpoint", "relation source does not exist: " + r.source, ids);
    if (dst == by_id.end())
      report.add("dangling_endpoint", "relation target does not exist: " + r.target, ids);

    if (src != by_id.end()) {
      const Argument& s = *src->second;
      if (s.kind == ArgumentClass::goal)
        report.add("goal_source", "the goal cannot influence other arguments", ids);
      else if (s.kind == ArgumentClass::pro && r.polarity != Polarity::support)
        report.add("polarity_mismatch", "pro-argument " + s.id + " can only support", ids);
      else if (s.kind == ArgumentClass::con && r.polarity != Polarity::attack)
        report.add("polarity_mismatch", "con-argument " + s.id + " can only attack", ids);
    }
    if (dst != by_id.end() && is_pinned(dst->second->provenance))
      report.add("pinned_target", "factual/mandatory arguments accept no influencers", ids);
  }

  // A self-loop is already reported above; don't echo it as a cycle.
  if (report.has("self_relation")) return report;
  std::set<ArgumentId> stuck;
  kahn(fw, stuck);
  if (!stuck.empty()) {
    auto cycle = find_cycle(fw, stuck);
    report.add("cycle", "cycle detected: " + join(cycle), cycle);
  }
  return report;
}

std::vector<ArgumentId> topological_order(const QuamFramework& fw) {
  std::set<ArgumentId> stuck;
  auto order = kahn(fw, stuck);
  if (!stuck.empty()) {
    auto cycle = find_cycle(fw, stuck);
    throw Error(ErrorCode::cycle, "cycle detected: " + join(cycle));
  }
  return order;
}

QuamFramework apply_influencer(const QuamFramework& fw, const Argument& arg, const Relation& rel) {
  if (fw.find(arg.id))
    throw Error(ErrorCode::duplicate_id, "argument id already present: " + arg.id);
  if (rel.source != arg.id)
    throw Error(ErrorCode::validation,
                "relation source " + rel.source + " is not the added argument " + arg.id);
  const Argument* target = fw.find(rel.target);
  if (!target) throw Error(ErrorCode::dangling_target, "relation target does not exist: " + rel.target);

  QuamFramework out = fw;
  out.arguments.push_back(arg);
  out.relations.push_back(rel);
  if (auto report = validate_framework(out); !report.ok())
    throw Error(ErrorCode::validation, "influencer " + arg.id + " breaks the framework", std::move(report));
  return out;
}

std::string_view to_string(ArgumentClass c) {
  switch (c) {
    case ArgumentClass::goal: return "goal";
    case ArgumentClass::pro: return "pro";
    case ArgumentClass::con: return "con";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::party: return "party";
    case Provenance::mediator_opinion: return "opinion";
    case Provenance::mediator_factual: return "factual";
    case Provenance::mediator_mandatory: return "mandatory";
    case Provenance::mediator_dispositive: return "dispositive";
  }
  return "?";
}

std::string_view to_string(Polarity p) { return p == Polarity::support ? "support" : "attack"; }

std::optional<ArgumentClass> parse_argument_class(std::string_view s) {
  if (s == "goal") return ArgumentClass::goal;
  if (s == "pro") return ArgumentClass::pro;
  if (s == "con") return ArgumentClass::con;
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  for (auto p : {Provenance::party, Provenance::mediator_opinion, Provenance::mediator_factual,
                 Provenance::mediator_mandatory, Provenance::mediator_dispositive})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<Polarity> parse_polarity(std::string_view s) {
  if (s == "support") return Polarity::support;
  if (s == "attack") return Polarity::attack;
  return std::nullopt;
}

}  // namespace quam
