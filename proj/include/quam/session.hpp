#pragma once

// Staged mediation: two party frameworks, the dispute configuration, the
// mediator's persuasive arguments and an append-only ledger of moves. The
// ledger is the source of truth; snapshots are derived from it.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quam/evaluator.hpp"
#include "quam/framework.hpp"
#include "quam/resolution.hpp"

namespace quam {

struct PersuasiveArgument {
  Argument argument;
  std::vector<Relation> known_relations;
  /// Only meaningful for mandatory arguments.
  std::optional<int> norm_priority;

  bool operator==(const PersuasiveArgument&) const = default;
};

/// Persuasive arguments available against each party, keyed by party label.
using PersuasiveSets = std::map<std::string, std::vector<PersuasiveArgument>>;

/// Unordered pairs of mandatory argument ids whose norms conflict.
using NormConflicts = std::vector<std::pair<ArgumentId, ArgumentId>>;

struct Move {
  int stage_index = 0;
  std::string target_party;
  ArgumentId persuasive_id;
  Relation relation;

  bool operator==(const Move&) const = default;
};

struct PartyState {
  std::string party;
  ArgumentId goal;
  EvaluationResult evaluation;
  double goal_score = 0.0;
  double mapped_value = 0.0;

  bool operator==(const PartyState&) const = default;
};

struct StageSnapshot {
  int stage_index = 0;
  /// In framework order, not role order.
  std::array<PartyState, 2> parties;
  double distance = 0.0;
  bool consensus = false;

  bool operator==(const StageSnapshot&) const = default;
};

struct TrajectoryRow {
  int stage = 0;
  std::array<double, 2> goal_scores{};
  std::array<double, 2> mapped_values{};
  double distance = 0.0;
  bool consensus = false;

  bool operator==(const TrajectoryRow&) const = default;
};

/// Everything a session is built from, before any move.
struct SessionSetup {
  std::array<QuamFramework, 2> frameworks;
  DisputeConfig config;
  PersuasiveSets persuasive_sets;
  NormConflicts norm_conflicts;

  bool operator==(const SessionSetup&) const = default;
};

/// Greedy selection in descending norm priority (ties by ascending id);
/// an argument is dropped when it conflicts with one already kept.
std::vector<PersuasiveArgument> select_conflict_free(const std::vector<PersuasiveArgument>& mandatory,
                                                     const NormConflicts& conflicts);

/// Every problem that would stop a session from being created.
ValidationReport validate_setup(const SessionSetup& setup);

/// Single-writer object: callers serialize apply_move/undo per session.
class MediationSession {
 public:
  static MediationSession create(SessionSetup setup);
  /// create() followed by apply_move for each ledger entry.
  static MediationSession replay(SessionSetup setup, const std::vector<Move>& ledger);

  const StageSnapshot& apply_move(const Move& move);
  StageSnapshot what_if(const Move& move) const;
  void undo();

  std::vector<TrajectoryRow> trajectory() const;

  const SessionSetup& setup() const { return setup_; }
  const std::vector<Move>& ledger() const { return ledger_; }
  const std::vector<StageSnapshot>& snapshots() const { return snapshots_; }
  const StageSnapshot& current() const { return snapshots_.back(); }
  int stage() const { return static_cast<int>(ledger_.size()); }
  /// Framework of party `index` at the current stage.
  const QuamFramework& framework(int index) const { return current_[index]; }
  int party_index(std::string_view label) const;
  /// Mandatory arguments ruled out for `party` by norm priority.
  const std::set<ArgumentId>& excluded_mandatory(std::string_view party) const;

  /// Snapshot of two frameworks under this session's config.
  StageSnapshot snapshot_of(int stage_index, const std::array<QuamFramework, 2>& frameworks) const;

 private:
  explicit MediationSession(SessionSetup setup);

  std::pair<int, QuamFramework> prepare(const Move& move) const;

  SessionSetup setup_;
  std::array<QuamFramework, 2> current_;
  std::array<std::set<ArgumentId>, 2> excluded_;
  std::vector<Move> ledger_;
  std::vector<StageSnapshot> snapshots_;
};

}  // namespace quam
