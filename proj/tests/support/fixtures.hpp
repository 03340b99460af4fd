#pragma once

// The compensation dispute used across the suites: a customer who fell at a
// supermarket entrance (payee) against the supermarket (payer).

#include <string>

#include "quam/session.hpp"

#ifndef QUAM_FIXTURE_DIR
#define QUAM_FIXTURE_DIR "tests/fixtures"
#endif

namespace quam::testing {

inline std::string fixture_path(const std::string& name) { return std::string(QUAM_FIXTURE_DIR) + "/" + name; }

inline Argument arg(std::string id, ArgumentClass kind, double bs, Provenance prov = Provenance::party) {
  return Argument{std::move(id), "", kind, prov, bs};
}

inline Relation rel(std::string s, std::string t, Polarity p, double w) {
  return Relation{std::move(s), std::move(t), p, w};
}

inline QuamFramework customer_framework() {
  QuamFramework fw;
  fw.party_label = "zhang";
  fw.arguments = {arg("theta_z", ArgumentClass::goal, 1.0), arg("a1", ArgumentClass::pro, 0.9),
                  arg("a2", ArgumentClass::pro, 0.7), arg("a3", ArgumentClass::pro, 0.9)};
  fw.relations = {rel("a1", "theta_z", Polarity::support, 0.9), rel("a3", "theta_z", Polarity::support, 0.5),
                  rel("a2", "a1", Polarity::support, 0.9)};
  return fw;
}

inline QuamFramework supermarket_framework() {
  QuamFramework fw;
  fw.party_label = "supermarket";
  fw.arguments = {arg("theta_s", ArgumentClass::goal, 1.0), arg("b1", ArgumentClass::pro, 0.9),
                  arg("b2", ArgumentClass::pro, 0.9),     arg("b3", ArgumentClass::pro, 0.7),
                  arg("b4", ArgumentClass::pro, 0.9),     arg("b5", ArgumentClass::pro, 0.7)};
  fw.relations = {rel("b1", "theta_s", Polarity::support, 0.5), rel("b2", "theta_s", Polarity::support, 0.7),
                  rel("b3", "theta_s", Polarity::support, 0.7), rel("b4", "theta_s", Polarity::support, 0.9),
                  rel("b5", "theta_s", Polarity::support, 0.4)};
  return fw;
}

/// Mandatory norm: operators of business premises owe safety protection.
inline Argument safety_norm() { return arg("p6", ArgumentClass::con, 1.0, Provenance::mediator_mandatory); }

inline Relation safety_norm_attack() { return rel("p6", "theta_s", Polarity::attack, 0.5); }

inline DisputeConfig compensation_config() {
  DisputeConfig c;
  c.variable_class = VariableClass::cuv;
  c.x = 0.2;
  c.y = 1.0;
  c.parties = {"supermarket", "zhang"};
  c.floors = {0.0, 0.0};
  return c;
}

inline PersuasiveSets compensation_persuasive_sets() {
  auto pa = [](std::string id, Provenance p) {
    return PersuasiveArgument{arg(std::move(id), ArgumentClass::con, 1.0, p), {}, std::nullopt};
  };
  PersuasiveSets sets;
  auto& s = sets["supermarket"];
  s.push_back(pa("p1", Provenance::mediator_factual));
  s.push_back(pa("p2", Provenance::mediator_factual));
  s.push_back(pa("p3", Provenance::mediator_factual));
  auto p4 = pa("p4", Provenance::mediator_opinion);
  p4.argument.base_score = 0.8;
  auto p5 = pa("p5", Provenance::mediator_opinion);
  p5.argument.base_score = 0.6;
  s.push_back(p4);
  s.push_back(p5);
  s.push_back(PersuasiveArgument{safety_norm(), {safety_norm_attack()}, 1});
  return sets;
}

inline SessionSetup compensation_setup() {
  SessionSetup setup;
  setup.frameworks = {customer_framework(), supermarket_framework()};
  setup.config = compensation_config();
  setup.persuasive_sets = compensation_persuasive_sets();
  return setup;
}

inline Move safety_norm_move(int stage = 1) { return Move{stage, "supermarket", "p6", safety_norm_attack()}; }

}  // namespace quam::testing
