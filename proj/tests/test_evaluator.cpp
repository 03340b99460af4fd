#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "quam/evaluator.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace quam;
using namespace quam::testing;

namespace {
constexpr double kTol = 1e-9;

std::vector<InfluencePair> to_pairs(const std::vector<PairValue>& v) {
  std::vector<InfluencePair> out;
  for (const auto& p : v) out.push_back({p.weight, p.score});
  return out;
}
}  // namespace

TEST_CASE("f_att") {
  CHECK(f_att(1, 0.5, 1) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(f_att(0.37, 0.8, 0) == 0.37);
  // 0.8 - 0.8 * (0.5 * 0.5)
  CHECK(std::abs(f_att(0.8, 0.5, 0.5) - 0.6) < kTol);
  CHECK_THROWS_AS(f_att(1.1, 0.5, 0.5), Error);
  CHECK_THROWS_AS(f_att(0.5, -0.1, 0.5), Error);
}

TEST_CASE("f_supp") {
  // 0.9 + 0.1 * (0.9 * 0.7)
  CHECK(std::abs(f_supp(0.9, 0.9, 0.7) - 0.963) < kTol);
  CHECK(f_supp(1, 0.3, 0.8) == 1.0);
  CHECK(f_supp(0.42, 0, 0.9) == 0.42);
  CHECK_THROWS_AS(f_supp(0.5, 0.5, 2.0), Error);
}

TEST_CASE("fold_influence") {
  const std::vector<InfluencePair> supermarket{{0.5, 0.9}, {0.7, 0.9}, {0.7, 0.7}, {0.9, 0.9}, {0.4, 0.7}};
  auto supp = fold_influence(InfluenceKind::support, 1, supermarket);
  REQUIRE(supp);
  CHECK(*supp == 1.0);

  CHECK_FALSE(fold_influence(InfluenceKind::attack, 0.7, {}));

  const std::vector<InfluencePair> two{{0.5, 0.5}, {1, 0.5}};
  auto att = fold_influence(InfluenceKind::attack, 0.8, two);
  REQUIRE(att);
  CHECK(std::abs(*att - 0.3) < kTol);
}

TEST_CASE("all-zero products make a sequence ineffective") {
  const std::vector<InfluencePair> zeros{{0, 0.9}, {0.8, 0}, {0, 0}};
  CHECK_FALSE(fold_influence(InfluenceKind::attack, 0.4, zeros));
  CHECK_FALSE(fold_influence(InfluenceKind::support, 0.4, zeros));
}

TEST_CASE("combine cases") {
  CHECK(combine(1, 0.5, 1) == 0.75);
  CHECK(combine(0.6, std::nullopt, std::nullopt) == 0.6);
  CHECK(combine(0.9, 0.3, std::nullopt) == 0.3);
  CHECK(combine(0.2, std::nullopt, 0.7) == 0.7);
}

TEST_CASE("fold matches the closed forms and is permutation invariant") {
  Rng rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = pick(rng, 1, 6);
    std::vector<PairValue> pairs;
    for (int i = 0; i < n; ++i) pairs.push_back({unit(rng), unit(rng)});
    const double v0 = unit(rng);
    const bool effective = std::any_of(pairs.begin(), pairs.end(), [](auto& p) { return p.weight * p.score != 0; });

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<InfluencePair> permuted;
      for (int i : perm) permuted.push_back({pairs[static_cast<std::size_t>(i)].weight, pairs[static_cast<std::size_t>(i)].score});
      auto att = fold_influence(InfluenceKind::attack, v0, permuted);
      auto sup = fold_influence(InfluenceKind::support, v0, permuted);
      REQUIRE(att.has_value() == effective);
      REQUIRE(sup.has_value() == effective);
      if (effective) {
        CHECK(std::abs(*att - closed_form_attack(v0, pairs)) < kTol);
        CHECK(std::abs(*sup - closed_form_support(v0, pairs)) < kTol);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("saturated base scores") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PairValue> pairs;
    for (int i = 0, n = pick(rng, 1, 6); i < n; ++i) pairs.push_back({unit(rng), unit(rng)});
    auto p = to_pairs(pairs);
    if (auto s = fold_influence(InfluenceKind::support, 1.0, p)) CHECK(*s == 1.0);
    if (auto a = fold_influence(InfluenceKind::attack, 0.0, p)) CHECK(*a == 0.0);
  }
}

TEST_CASE("supermarket after the safety norm move") {
  auto fw = apply_influencer(supermarket_framework(), safety_norm(), safety_norm_attack());
  auto r = evaluate(fw);
  CHECK(std::abs(r.score("theta_s") - 0.75) < kTol);
  CHECK(r.nodes.at("theta_s").attack == 0.5);
  CHECK(r.nodes.at("theta_s").support == 1.0);
  CHECK(r.score("b1") == 0.9);
  CHECK(r.score("b3") == 0.7);
  CHECK(r.score("p6") == 1.0);
  CHECK(r.constraint_trace.empty());
  CHECK(std::holds_alternative<std::monostate>(check_constraint_conflict(fw)));
}

TEST_CASE("customer framework at stage 0") {
  auto r = evaluate(customer_framework());
  CHECK(r.score("a2") == 0.7);
  CHECK(std::abs(r.score("a1") - 0.963) < kTol);
  CHECK(r.score("a3") == 0.9);
  CHECK(r.score("theta_z") == 1.0);
}

TEST_CASE("weight-1 pinned attacker forces the target to 0") {
  auto fw = apply_influencer(customer_framework(), arg("f", ArgumentClass::con, 1, Provenance::mediator_factual),
                             rel("f", "theta_z", Polarity::attack, 1.0));
  auto r = evaluate(fw);
  CHECK(r.score("theta_z") == 0.0);
  REQUIRE(r.constraint_trace.size() == 1);
  CHECK(r.constraint_trace[0] == ConstraintFiring{Constraint::c1_pinned_attack, "theta_z", "f"});
}

TEST_CASE("weight-1 pinned supporter forces the target to 1, and propagates") {
  QuamFramework fw;
  fw.party_label = "p";
  fw.arguments = {arg("g", ArgumentClass::goal, 1), arg("c", ArgumentClass::con, 0.2),
                  arg("m", ArgumentClass::pro, 1, Provenance::mediator_mandatory)};
  fw.relations = {rel("c", "g", Polarity::attack, 1.0), rel("m", "c", Polarity::support, 1.0)};
  auto r = evaluate(fw);
  CHECK(r.score("c") == 1.0);
  CHECK(r.constraint_trace == std::vector<ConstraintFiring>{{Constraint::c2_pinned_support, "c", "m"}});
  // The overridden score feeds the goal as an ordinary attacker.
  CHECK(r.score("g") == 0.0);
}

TEST_CASE("pinned influencer below weight 1 does not override") {
  auto fw = apply_influencer(customer_framework(), arg("f", ArgumentClass::con, 1, Provenance::mediator_factual),
                             rel("f", "theta_z", Polarity::attack, 0.9));
  auto r = evaluate(fw);
  CHECK(r.constraint_trace.empty());
  CHECK(r.score("theta_z") > 0.0);
}

TEST_CASE("check_constraint_conflict") {
  QuamFramework fw;
  fw.party_label = "p";
  fw.arguments = {arg("g", ArgumentClass::goal, 1), arg("a", ArgumentClass::pro, 0.5),
                  arg("b", ArgumentClass::con, 1, Provenance::mediator_factual),
                  arg("c", ArgumentClass::pro, 1, Provenance::mediator_mandatory)};
  fw.relations = {rel("a", "g", Polarity::support, 0.5), rel("b", "a", Polarity::attack, 1.0),
                  rel("c", "a", Polarity::support, 1.0)};
  auto check = check_constraint_conflict(fw);
  REQUIRE(std::holds_alternative<ConstraintConflict>(check));
  CHECK(std::get<ConstraintConflict>(check) == ConstraintConflict{"a", "b", "c"});
  try {
    evaluate(fw);
    FAIL("expected constraint conflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::constraint_conflict);
  }

  fw.relations[1].weight = 0.9;
  CHECK(std::holds_alternative<std::monostate>(check_constraint_conflict(fw)));
  CHECK(evaluate(fw).score("a") == 1.0);
}

TEST_CASE("scores stay in [0,1] and agree with unweighted semantics at unit weights") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    FrameworkOptions opt;
    opt.unit_weights = chance(rng, 0.5);
    auto fw = random_framework(rng, "r", opt);
    auto r = evaluate(fw);
    for (const auto& [id, s] : r.scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    if (opt.unit_weights) {
      UnweightedOracle oracle(fw);
      for (const auto& a : fw.arguments) CHECK(std::abs(r.score(a.id) - oracle.score(a.id)) < kTol);
    }
  }
}

TEST_CASE("goal score is monotone in a single attacker or supporter") {
  Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 600; ++trial) {
    auto fw = random_framework(rng, "r", {.extra_edge_probability = 0.0});
    const auto goal = fw.goal().id;
    for (std::size_t i = 0; i < fw.relations.size(); ++i) {
      if (fw.relations[i].target != goal) continue;
      const double before = evaluate(fw).score(goal);
      const bool attack = fw.relations[i].polarity == Polarity::attack;

      auto heavier = fw;
      heavier.relations[i].weight = std::min(1.0, fw.relations[i].weight + 0.25);
      const double after_weight = evaluate(heavier).score(goal);

      auto stronger = fw;
      auto src = std::find_if(stronger.arguments.begin(), stronger.arguments.end(),
                               [&](auto& a) { return a.id == fw.relations[i].source; });
      src->base_score = std::min(1.0, src->base_score + 0.25);
      const double after_score = evaluate(stronger).score(goal);

      if (attack) {
        CHECK(after_weight <= before + 1e-12);
        CHECK(after_score <= before + 1e-12);
      } else {
        CHECK(after_weight >= before - 1e-12);
        CHECK(after_score >= before - 1e-12);
      }
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("no target records both overrides when the conflict check passes") {
  Rng rng(23);
  int with_trace = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto fw = random_framework(rng, "r", {.allow_pinned = true});
    if (!std::holds_alternative<std::monostate>(check_constraint_conflict(fw))) continue;
    auto r = evaluate(fw);
    std::map<ArgumentId, int> seen;
    for (const auto& c : r.constraint_trace) {
      ++seen[c.target];
      const Argument* trig = fw.find(c.trigger);
      CHECK(is_pinned(trig->provenance));
      CHECK(r.score(c.trigger) == 1.0);
    }
    for (const auto& [_, n] : seen) CHECK(n == 1);
    with_trace += !r.constraint_trace.empty();
  }
  CHECK(with_trace > 0);
}
