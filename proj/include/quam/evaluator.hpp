#pragma once

// Final acceptability of every argument in a framework. Each node combines its
// base score with a fold over its attackers and a fold over its supporters;
// pinned (factual/mandatory) influencers with weight 1 override the result.

#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "quam/framework.hpp"

namespace quam {

/// Weight of an influence relation paired with the influencer's score.
struct InfluencePair {
  double weight = 0.0;
  double score = 0.0;
};

/// Result of folding an influence sequence. std::nullopt is the `nil` marker
/// returned for ineffective sequences (empty, or every weight*score is 0).
using FoldResult = std::optional<double>;

enum class InfluenceKind { attack, support };

/// v0 * (1 - pi * v)
double f_att(double v0, double pi, double v);
/// v0 + (1 - v0) * (pi * v)
double f_supp(double v0, double pi, double v);

/// Left fold of f_att / f_supp over `pairs`, or nil when the sequence is
/// ineffective. Order-independent up to rounding.
FoldResult fold_influence(InfluenceKind kind, double v0, std::span<const InfluencePair> pairs);

/// Aggregates base score, attack fold and support fold.
double combine(double v0, FoldResult attack, FoldResult support);

enum class Constraint { c1_pinned_attack, c2_pinned_support };

struct ConstraintFiring {
  Constraint constraint;
  ArgumentId target;
  ArgumentId trigger;

  bool operator==(const ConstraintFiring&) const = default;
};

/// Intermediate values of one node.
struct NodeEvaluation {
  double base_score = 0.0;
  FoldResult attack;
  FoldResult support;
  double score = 0.0;

  bool operator==(const NodeEvaluation&) const = default;
};

struct EvaluationResult {
  std::map<ArgumentId, double> scores;
  std::map<ArgumentId, NodeEvaluation> nodes;
  std::vector<ConstraintFiring> constraint_trace;

  double score(const ArgumentId& id) const { return scores.at(id); }
  bool operator==(const EvaluationResult&) const = default;
};

struct ConstraintConflict {
  ArgumentId target;
  ArgumentId attacker;
  ArgumentId supporter;

  bool operator==(const ConstraintConflict&) const = default;
};

/// std::monostate when no argument has both a weight-1 pinned attacker and a
/// weight-1 pinned supporter; otherwise the first such configuration by id.
using ConflictCheck = std::variant<std::monostate, ConstraintConflict>;

ConflictCheck check_constraint_conflict(const QuamFramework& fw);

/// Throws ErrorCode::validation for malformed frameworks and
/// ErrorCode::constraint_conflict when check_constraint_conflict fails.
EvaluationResult evaluate(const QuamFramework& fw);

}  // namespace quam
