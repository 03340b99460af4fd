#pragma once

// From goal acceptability to values of the disputed variable, and from there
// to consensus and the residual distance between the two parties.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "quam/error.hpp"

namespace quam {

/// Binary unilateral / binary joint / continuous unilateral / continuous joint.
enum class VariableClass { buv, bjv, cuv, cjv };

/// goal_1 / payer / p1 are the first role of their class, the others the second.
enum class Role { goal_1, goal_0, payer, payee, p1, p2 };

enum class BjvDistance {
  consistent,  // 1 - |tau1(sf1) - tau0(sf2)|, zero exactly at consensus
  literal,     // 1 - |tau1(sf2) - tau0(sf1)|
};

/// value = slope * sf + intercept on the clamped domain [floor, 1].
struct AffineMap {
  double slope = 0.0;
  double intercept = 0.0;

  bool operator==(const AffineMap&) const = default;
};

struct DisputeConfig {
  VariableClass variable_class = VariableClass::cuv;
  /// Indifference threshold of the binary classes, in (0,1).
  double k = 0.5;
  /// Target value of the first role (payer / p1) ...
  double x = 0.0;
  /// ... and of the second role (payee / p2).
  double y = 1.0;
  /// Party labels holding the first and second role.
  std::array<std::string, 2> parties;
  /// Acceptability at maximal concession, per role, in [0,1).
  std::array<double, 2> floors{0.0, 0.0};
  /// Replaces the default linear map of a role when set.
  std::array<std::optional<AffineMap>, 2> transforms;
  BjvDistance bjv_distance = BjvDistance::consistent;

  bool operator==(const DisputeConfig&) const = default;
};

inline constexpr double kInequalityTolerance = 1e-9;

bool is_binary(VariableClass c);
std::array<Role, 2> roles_of(VariableClass c);
/// 0 for the first role of its class, 1 for the second.
int role_slot(Role r);
/// Role played by `party` under `config`, if any.
std::optional<Role> role_of(const DisputeConfig& config, std::string_view party);

/// Binary transformation; sf == k counts as rejecting the goal.
int tau(Role polarity, double sf, double k);

/// Value the party playing `role` accepts at acceptability `sf`.
double map_to_value(const DisputeConfig& config, Role role, double sf);

/// The map actually used for a continuous role (custom or default linear).
AffineMap effective_transform(const DisputeConfig& config, Role role);

/// Monotonicity, endpoint, codomain and target-order checks, plus the
/// basic ranges of k, x, y and the floors.
ValidationReport validate_transforms(const DisputeConfig& config);

/// sf1 belongs to the first-role party, sf2 to the second.
bool consensus(const DisputeConfig& config, double sf1, double sf2);
double distance(const DisputeConfig& config, double sf1, double sf2);

/// Target value of a role: what the party holds out for at full acceptability.
double target_value(const DisputeConfig& config, Role role);

std::string_view to_string(VariableClass c);
std::string_view to_string(Role r);
std::optional<VariableClass> parse_variable_class(std::string_view s);
std::optional<Role> parse_role(std::string_view s);

}  // namespace quam
