#include "quam/session.hpp"

#include <algorithm>
#include <cmath>

namespace quam {

namespace {

const PersuasiveArgument* find_persuasive(const PersuasiveSets& sets, std::string_view party,
                                          std::string_view id) {
  auto it = sets.find(std::string(party));
  if (it == sets.end()) return nullptr;
  for (const auto& pa : it->second)
    if (pa.argument.id == id) return &pa;
  return nullptr;
}

bool conflicts_with(const NormConflicts& conflicts, const ArgumentId& a, const ArgumentId& b) {
  return std::any_of(conflicts.begin(), conflicts.end(), [&](const auto& c) {
    return (c.first == a && c.second == b) || (c.first == b && c.second == a);
  });
}

// Mandatory arguments of one party's set that lose to a higher-priority norm.
std::set<ArgumentId> excluded_mandatory_of(const std::vector<PersuasiveArgument>& set,
                                           const NormConflicts& conflicts) {
  std::vector<PersuasiveArgument> mandatory;
  std::set<ArgumentId> ids;
  for (const auto& pa : set)
    if (pa.argument.provenance == Provenance::mediator_mandatory) {
      mandatory.push_back(pa);
      ids.insert(pa.argument.id);
    }
  NormConflicts relevant;
  for (const auto& c : conflicts)
    if (ids.count(c.first) && ids.count(c.second)) relevant.push_back(c);
  if (relevant.empty()) return {};

  for (const auto& pa : select_conflict_free(mandatory, relevant)) ids.erase(pa.argument.id);
  return ids;
}

void check_persuasive(const PersuasiveArgument& pa, const std::string& party, ValidationReport& report) {
  const Argument& a = pa.argument;
  const std::string where = "persuasive set of " + party;
  if (a.id.empty()) report.add("empty_id", where + ": argument id must be non-empty");
  if (!is_mediator(a.provenance))
    report.add("persuasive_provenance", where + ": " + a.id + " must carry a mediator provenance", {a.id});
  if (a.kind == ArgumentClass::goal)
    report.add("persuasive_class", where + ": " + a.id + " cannot be a goal", {a.id});
  if (!(std::isfinite(a.base_score) && a.base_score >= 0.0 && a.base_score <= 1.0))
    report.add("base_score_range", where + ": base score of " + a.id + " out of [0,1]", {a.id});
  if (is_pinned(a.provenance) && a.base_score != 1.0)
    report.add("pinned_base_score", where + ": factual/mandatory base score must be 1", {a.id});
  for (const auto& r : pa.known_relations) {
    if (r.source != a.id)
      report.add("known_relation_source", where + ": known relation of " + a.id + " must start at it", {a.id});
    if (!(std::isfinite(r.weight) && r.weight >= 0.0 && r.weight <= 1.0))
      report.add("weight_range", where + ": known relation weight of " + a.id + " out of [0,1]", {a.id});
  }
}

}  // namespace

std::vector<PersuasiveArgument> select_conflict_free(const std::vector<PersuasiveArgument>& mandatory,
                                                     const NormConflicts& conflicts) {
  std::set<ArgumentId> ids;
  for (const auto& pa : mandatory) {
    if (!pa.norm_priority)
      throw Error(ErrorCode::missing_priority, "mandatory argument " + pa.argument.id + " has no norm priority");
    ids.insert(pa.argument.id);
  }
  for (const auto& [a, b] : conflicts)
    if (!ids.count(a) || !ids.count(b))
      throw Error(ErrorCode::validation, "norm conflict " + a + "/" + b + " names a non-mandatory argument");

  std::vector<PersuasiveArgument> ordered = mandatory;
  std::sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
    if (*l.norm_priority != *r.norm_priority) return *l.norm_priority > *r.norm_priority;
    return l.argument.id < r.argument.id;
  });

  std::vector<PersuasiveArgument> kept;
  for (auto& pa : ordered) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const PersuasiveArgument& k) {
      return conflicts_with(conflicts, k.argument.id, pa.argument.id);
    });
    if (!clash) kept.push_back(std::move(pa));
  }
  return kept;
}

ValidationReport validate_setup(const SessionSetup& setup) {
  ValidationReport report;
  const auto& fws = setup.frameworks;
  for (const auto& fw : fws) report.append(validate_framework(fw), "framework " + fw.party_label);

  if (fws[0].party_label.empty() || fws[1].party_label.empty())
    report.add("party_label", "party labels must be non-empty");
  if (fws[0].party_label == fws[1].party_label)
    report.add("party_label", "the two parties need distinct labels", {fws[0].party_label});

  const auto& cfg = setup.config;
  std::set<std::string> labels{fws[0].party_label, fws[1].party_label};
  std::set<std::string> roled{cfg.parties[0], cfg.parties[1]};
  if (labels != roled)
    report.add("roles", "config must assign one role to each party (" + fws[0].party_label + ", " +
                            fws[1].party_label + ")");
  report.append(validate_transforms(cfg), "config");

  std::set<ArgumentId> own;
  for (const auto& a : fws[0].arguments) own.insert(a.id);
  for (const auto& a : fws[1].arguments)
    if (own.count(a.id))
      report.add("shared_id", "parties share argument id " + a.id, {a.id});
  for (const auto& a : fws[1].arguments) own.insert(a.id);

  // One overall persuasive set: an id names the same argument everywhere.
  std::map<ArgumentId, const Argument*> overall;
  for (const auto& [party, set] : setup.persuasive_sets) {
    if (!labels.count(party)) report.add("persuasive_party", "persuasive set for unknown party " + party);
    std::set<ArgumentId> seen;
    for (const auto& pa : set) {
      const Argument& a = pa.argument;
      check_persuasive(pa, party, report);
      if (!seen.insert(a.id).second)
        report.add("duplicate_id", "persuasive set of " + party + " lists " + a.id + " twice", {a.id});
      if (own.count(a.id))
        report.add("shared_id", "persuasive argument " + a.id + " reuses a party argument id", {a.id});
      auto [it, inserted] = overall.emplace(a.id, &a);
      if (inserted) continue;
      if (it->second->provenance != a.provenance)
        report.add("class_overlap", "classes must be pairwise disjoint: " + a.id + " is both " +
                                        std::string(to_string(it->second->provenance)) + " and " +
                                        std::string(to_string(a.provenance)),
                   {a.id});
      else if (!(*it->second == a))
        report.add("inconsistent_persuasive", "persuasive argument " + a.id + " differs between sets", {a.id});
    }
  }

  for (const auto& [a, b] : setup.norm_conflicts) {
    for (const auto& id : {a, b}) {
      auto it = overall.find(id);
      if (it == overall.end() || it->second->provenance != Provenance::mediator_mandatory)
        report.add("norm_conflict", "norm conflict names non-mandatory argument " + id, {id});
    }
  }
  if (!report.ok()) return report;

  for (const auto& [party, set] : setup.persuasive_sets) {
    try {
      excluded_mandatory_of(set, setup.norm_conflicts);
    } catch (const Error& e) {
      report.add(std::string(to_string(e.code())), e.what());
    }
  }
  return report;
}

MediationSession::MediationSession(SessionSetup setup) : setup_(std::move(setup)) {}

MediationSession MediationSession::create(SessionSetup setup) {
  if (auto report = validate_setup(setup); !report.ok())
    throw Error(ErrorCode::validation, "session rejected", std::move(report));

  MediationSession s(std::move(setup));
  s.current_ = s.setup_.frameworks;
  for (int i = 0; i < 2; ++i) {
    auto it = s.setup_.persuasive_sets.find(s.current_[i].party_label);
    if (it != s.setup_.persuasive_sets.end())
      s.excluded_[i] = excluded_mandatory_of(it->second, s.setup_.norm_conflicts);
  }
  s.snapshots_.push_back(s.snapshot_of(0, s.current_));
  return s;
}

MediationSession MediationSession::replay(SessionSetup setup, const std::vector<Move>& ledger) {
  MediationSession s = create(std::move(setup));
  for (const auto& m : ledger) s.apply_move(m);
  return s;
}

int MediationSession::party_index(std::string_view label) const {
  for (int i = 0; i < 2; ++i)
    if (setup_.frameworks[i].party_label == label) return i;
  return -1;
}

const std::set<ArgumentId>& MediationSession::excluded_mandatory(std::string_view party) const {
  int i = party_index(party);
  if (i < 0) throw Error(ErrorCode::not_found, "unknown party " + std::string(party));
  return excluded_[i];
}

StageSnapshot MediationSession::snapshot_of(int stage_index,
                                            const std::array<QuamFramework, 2>& frameworks) const {
  const auto& cfg = setup_.config;
  StageSnapshot snap;
  snap.stage_index = stage_index;
  std::array<double, 2> by_role{};
  for (int i = 0; i < 2; ++i) {
    PartyState& p = snap.parties[i];
    p.party = frameworks[i].party_label;
    p.goal = frameworks[i].goal().id;
    p.evaluation = evaluate(frameworks[i]);
    p.goal_score = p.evaluation.score(p.goal);
    const Role role = *role_of(cfg, p.party);
    p.mapped_value = map_to_value(cfg, role, p.goal_score);
    by_role[role_slot(role)] = p.goal_score;
  }
  snap.distance = distance(cfg, by_role[0], by_role[1]);
  snap.consensus = consensus(cfg, by_role[0], by_role[1]);
  return snap;
}

std::pair<int, QuamFramework> MediationSession::prepare(const Move& move) const {
  const int expected = stage() + 1;
  if (move.stage_index != expected)
    throw Error(ErrorCode::illegal_move, "stage index must be " + std::to_string(expected) + ", got " +
                                             std::to_string(move.stage_index));
  const int idx = party_index(move.target_party);
  if (idx < 0) throw Error(ErrorCode::illegal_move, "unknown party " + move.target_party);

  const PersuasiveArgument* pa = find_persuasive(setup_.persuasive_sets, move.target_party, move.persuasive_id);
  if (!pa)
    throw Error(ErrorCode::illegal_move, "unknown persuasive argument " + move.persuasive_id + " for " +
                                             move.target_party);
  if (current_[idx].find(move.persuasive_id))
    throw Error(ErrorCode::illegal_move, move.persuasive_id + " was already applied to " + move.target_party);
  if (excluded_[idx].count(move.persuasive_id))
    throw Error(ErrorCode::illegal_move, move.persuasive_id + " is excluded by a higher-priority norm");
  if (move.relation.source != move.persuasive_id)
    throw Error(ErrorCode::validation, "move relation must start at " + move.persuasive_id);

  return {idx, apply_influencer(current_[idx], pa->argument, move.relation)};
}

const StageSnapshot& MediationSession::apply_move(const Move& move) {
  auto [idx, fw] = prepare(move);
  auto next = current_;
  next[idx] = std::move(fw);
  StageSnapshot snap = snapshot_of(move.stage_index, next);

  current_ = std::move(next);
  ledger_.push_back(move);
  snapshots_.push_back(std::move(snap));
  return snapshots_.back();
}

StageSnapshot MediationSession::what_if(const Move& move) const {
  auto [idx, fw] = prepare(move);
  auto next = current_;
  next[idx] = std::move(fw);
  return snapshot_of(move.stage_index, next);
}

void MediationSession::undo() {
  if (ledger_.empty()) throw Error(ErrorCode::empty_ledger, "nothing to undo at stage 0");
  ledger_.pop_back();
  snapshots_.pop_back();

  current_ = setup_.frameworks;
  for (const auto& m : ledger_) {
    const int idx = party_index(m.target_party);
    const auto* pa = find_persuasive(setup_.persuasive_sets, m.target_party, m.persuasive_id);
    current_[idx] = apply_influencer(current_[idx], pa->argument, m.relation);
  }
}

std::vector<TrajectoryRow> MediationSession::trajectory() const {
  std::vector<TrajectoryRow> rows;
  rows.reserve(snapshots_.size());
  for (const auto& s : snapshots_) {
    TrajectoryRow row;
    row.stage = s.stage_index;
    for (int i = 0; i < 2; ++i) {
      row.goal_scores[i] = s.parties[i].goal_score;
      row.mapped_values[i] = s.parties[i].mapped_value;
    }
    row.distance = s.distance;
    row.consensus = s.consensus;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quam
