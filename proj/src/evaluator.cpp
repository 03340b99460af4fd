#include "quam/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quam {

namespace {

void require_unit(double v, const char* what) {
  if (!(std::isfinite(v) && v >= 0.0 && v <= 1.0))
    throw Error(ErrorCode::domain, std::string(what) + " out of [0,1]: " + std::to_string(v));
}

struct Influencer {
  const Argument* source;
  double weight;
};

}  // namespace

double f_att(double v0, double pi, double v) {
  require_unit(v0, "score");
  require_unit(pi, "weight");
  require_unit(v, "influencer score");
  return v0 - v0 * (pi * v);
}

double f_supp(double v0, double pi, double v) {
  require_unit(v0, "score");
  require_unit(pi, "weight");
  require_unit(v, "influencer score");
  return v0 + (1.0 - v0) * (pi * v);
}

FoldResult fold_influence(InfluenceKind kind, double v0, std::span<const InfluencePair> pairs) {
  require_unit(v0, "base score");
  for (const auto& p : pairs) {
    require_unit(p.weight, "weight");
    require_unit(p.score, "influencer score");
  }
  const bool effective = std::any_of(pairs.begin(), pairs.end(),
                                     [](const InfluencePair& p) { return p.weight * p.score != 0.0; });
  if (!effective) return std::nullopt;

  double acc = v0;
  for (const auto& p : pairs)
    acc = kind == InfluenceKind::attack ? f_att(acc, p.weight, p.score) : f_supp(acc, p.weight, p.score);
  return acc;
}

double combine(double v0, FoldResult attack, FoldResult support) {
  require_unit(v0, "base score");
  if (attack) require_unit(*attack, "attack fold");
  if (support) require_unit(*support, "support fold");
  if (attack && !support) return *attack;
  if (!attack && support) return *support;
  if (!attack && !support) return v0;
  return (*attack + *support) / 2.0;
}

ConflictCheck check_constraint_conflict(const QuamFramework& fw) {
  std::map<ArgumentId, ArgumentId> attacker;
  std::map<ArgumentId, ArgumentId> supporter;
  for (const auto& r : fw.relations) {
    const Argument* src = fw.find(r.source);
    if (!src || !is_pinned(src->provenance) || r.weight != 1.0) continue;
    auto& slot = r.polarity == Polarity::attack ? attacker : supporter;
    auto [it, inserted] = slot.emplace(r.target, r.source);
    if (!inserted && r.source < it->second) it->second = r.source;
  }
  for (const auto& [target, att] : attacker)
    if (auto it = supporter.find(target); it != supporter.end())
      return ConstraintConflict{target, att, it->second};
  return std::monostate{};
}

EvaluationResult evaluate(const QuamFramework& fw) {
  if (auto report = validate_framework(fw); !report.ok())
    throw Error(ErrorCode::validation, "cannot evaluate invalid framework '" + fw.party_label + "'",
                std::move(report));
  if (auto check = check_constraint_conflict(fw); auto* c = std::get_if<ConstraintConflict>(&check))
    throw Error(ErrorCode::constraint_conflict,
                "argument " + c->target + " has weight-1 pinned attacker " + c->attacker +
                    " and weight-1 pinned supporter " + c->supporter);

  std::map<ArgumentId, std::vector<Influencer>> attackers;
  std::map<ArgumentId, std::vector<Influencer>> supporters;
  for (const auto& r : fw.relations) {
    auto& bucket = r.polarity == Polarity::attack ? attackers[r.target] : supporters[r.target];
    bucket.push_back({fw.find(r.source), r.weight});
  }
  // Fixed influencer order keeps rounding identical across equal inputs.
  auto by_source = [](const Influencer& a, const Influencer& b) { return a.source->id < b.source->id; };
  for (auto& [_, v] : attackers) std::sort(v.begin(), v.end(), by_source);
  for (auto& [_, v] : supporters) std::sort(v.begin(), v.end(), by_source);

  EvaluationResult result;
  std::vector<InfluencePair> pairs;
  for (const auto& id : topological_order(fw)) {
    const Argument& arg = *fw.find(id);

    auto fold = [&](InfluenceKind kind, const std::vector<Influencer>& influencers,
                    const Argument*& pinned_trigger) -> FoldResult {
      pairs.clear();
      for (const auto& inf : influencers) {
        double s = result.scores.at(inf.source->id);
        pairs.push_back({inf.weight, s});
        if (!pinned_trigger && is_pinned(inf.source->provenance) && inf.weight == 1.0 && s == 1.0)
          pinned_trigger = inf.source;
      }
      return fold_influence(kind, arg.base_score, pairs);
    };

    static const std::vector<Influencer> none;
    auto att_it = attackers.find(id);
    auto sup_it = supporters.find(id);
    const Argument* c1 = nullptr;
    const Argument* c2 = nullptr;

    NodeEvaluation node;
    node.base_score = arg.base_score;
    node.attack = fold(InfluenceKind::attack, att_it == attackers.end() ? none : att_it->second, c1);
    node.support = fold(InfluenceKind::support, sup_it == supporters.end() ? none : sup_it->second, c2);
    node.score = combine(arg.base_score, node.attack, node.support);

    if (c1) {
      node.score = 0.0;
      result.constraint_trace.push_back({Constraint::c1_pinned_attack, id, c1->id});
    } else if (c2) {
      node.score = 1.0;
      result.constraint_trace.push_back({Constraint::c2_pinned_support, id, c2->id});
    }
    result.scores.emplace(id, node.score);
    result.nodes.emplace(id, node);
  }
  return result;
}

}  // namespace quam
