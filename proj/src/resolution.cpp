#include "quam/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace quam {

namespace {

constexpr double kGridStep = 1e-3;
constexpr double kEndpointTolerance = 1e-9;
constexpr double kMonotoneSlack = 1e-12;

void require_score(double sf) {
  if (!(std::isfinite(sf) && sf >= 0.0 && sf <= 1.0))
    throw Error(ErrorCode::domain, "acceptability out of [0,1]: " + std::to_string(sf));
}

void require_role(const DisputeConfig& config, Role role) {
  auto roles = roles_of(config.variable_class);
  if (role != roles[0] && role != roles[1])
    throw Error(ErrorCode::invalid_config, std::string("role ") + std::string(to_string(role)) +
                                               " does not belong to " +
                                               std::string(to_string(config.variable_class)));
}

// Codomain of a continuous role: [lo, hi], and whether it decreases in sf.
struct Shape {
  double lo;
  double hi;
  bool decreasing;
};

Shape shape_of(const DisputeConfig& c, Role role) {
  switch (role) {
    case Role::payer: return {c.x, 1.0, true};
    case Role::payee: return {0.0, c.y, false};
    case Role::p1: return {0.0, c.x, false};
    case Role::p2: return {0.0, c.y, false};
    default: return {0.0, 1.0, false};
  }
}

double continuous_value(const DisputeConfig& c, Role role, double sf) {
  const int slot = role_slot(role);
  const double floor = c.floors[slot];
  const double s = std::clamp(sf, floor, 1.0);
  if (const auto& custom = c.transforms[slot]) return custom->slope * s + custom->intercept;

  const double t = (s - floor) / (1.0 - floor);
  switch (role) {
    case Role::payer: return 1.0 - (1.0 - c.x) * t;
    case Role::payee: return c.y * t;
    case Role::p1: return c.x * t;
    case Role::p2: return c.y * t;
    default: break;
  }
  throw Error(ErrorCode::invalid_config, "not a continuous role");
}

void check_map(const DisputeConfig& c, Role role, ValidationReport& report) {
  const std::string name(to_string(role));
  const int slot = role_slot(role);
  const double floor = c.floors[slot];
  if (const auto& custom = c.transforms[slot];
      custom && !(std::isfinite(custom->slope) && std::isfinite(custom->intercept))) {
    report.add("transform_params", name + " map parameters must be finite");
    return;
  }
  const Shape shape = shape_of(c, role);

  bool monotone = true;
  bool in_codomain = true;
  double prev = continuous_value(c, role, floor);
  const auto steps = static_cast<int>(std::ceil((1.0 - floor) / kGridStep));
  for (int i = 0; i <= steps; ++i) {
    const double s = i == steps ? 1.0 : floor + i * kGridStep;
    const double v = continuous_value(c, role, s);
    if (shape.decreasing ? v > prev + kMonotoneSlack : v < prev - kMonotoneSlack) monotone = false;
    if (v < shape.lo - kEndpointTolerance || v > shape.hi + kEndpointTolerance) in_codomain = false;
    prev = v;
  }
  if (!monotone)
    report.add("monotonicity",
               name + " map must be " + (shape.decreasing ? "non-increasing" : "non-decreasing"));
  if (!in_codomain) report.add("codomain", name + " map leaves its codomain");

  const double at_floor = continuous_value(c, role, floor);
  const double at_one = continuous_value(c, role, 1.0);
  const double want_floor = shape.decreasing ? 1.0 : 0.0;
  const double want_one = shape.decreasing ? shape.lo : shape.hi;
  if (std::abs(at_floor - want_floor) > kEndpointTolerance)
    report.add("endpoint", name + " map must give " + std::to_string(want_floor) + " at its floor");
  if (std::abs(at_one - want_one) > kEndpointTolerance)
    report.add("endpoint", name + " map must give its target value at acceptability 1");
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

bool is_binary(VariableClass c) { return c == VariableClass::buv || c == VariableClass::bjv; }

std::array<Role, 2> roles_of(VariableClass c) {
  switch (c) {
    case VariableClass::buv:
    case VariableClass::bjv: return {Role::goal_1, Role::goal_0};
    case VariableClass::cuv: return {Role::payer, Role::payee};
    case VariableClass::cjv: return {Role::p1, Role::p2};
  }
  return {Role::goal_1, Role::goal_0};
}

int role_slot(Role r) {
  return (r == Role::goal_1 || r == Role::payer || r == Role::p1) ? 0 : 1;
}

std::optional<Role> role_of(const DisputeConfig& config, std::string_view party) {
  auto roles = roles_of(config.variable_class);
  for (int i = 0; i < 2; ++i)
    if (config.parties[i] == party) return roles[i];
  return std::nullopt;
}

int tau(Role polarity, double sf, double k) {
  require_score(sf);
  if (!(k > 0.0 && k < 1.0)) throw Error(ErrorCode::domain, "threshold k must lie in (0,1)");
  const bool accepted = sf > k;
  switch (polarity) {
    case Role::goal_1: return accepted ? 1 : 0;
    case Role::goal_0: return accepted ? 0 : 1;
    default: break;
  }
  throw Error(ErrorCode::invalid_config, "tau needs a goal-1 or goal-0 polarity");
}

double map_to_value(const DisputeConfig& config, Role role, double sf) {
  require_score(sf);
  require_role(config, role);
  if (is_binary(config.variable_class)) return tau(role, sf, config.k);
  return continuous_value(config, role, sf);
}

AffineMap effective_transform(const DisputeConfig& config, Role role) {
  require_role(config, role);
  if (is_binary(config.variable_class))
    throw Error(ErrorCode::invalid_config, "binary classes use a threshold, not an affine map");
  const int slot = role_slot(role);
  if (const auto& custom = config.transforms[slot]) return *custom;
  const double floor = config.floors[slot];
  const double v_floor = continuous_value(config, role, floor);
  const double v_one = continuous_value(config, role, 1.0);
  const double slope = (v_one - v_floor) / (1.0 - floor);
  return {slope, v_one - slope};
}

double target_value(const DisputeConfig& config, Role role) {
  switch (role) {
    case Role::goal_1: return 1.0;
    case Role::goal_0: return 0.0;
    case Role::payer:
    case Role::p1: return config.x;
    case Role::payee:
    case Role::p2: return config.y;
  }
  return 0.0;
}

ValidationReport validate_transforms(const DisputeConfig& config) {
  ValidationReport report;
  if (is_binary(config.variable_class)) {
    if (!(config.k > 0.0 && config.k < 1.0)) report.add("k_range", "threshold k must lie in (0,1)");
    return report;
  }

  if (!in_unit(config.x)) report.add("target_range", "target x out of [0,1]");
  if (!in_unit(config.y)) report.add("target_range", "target y out of [0,1]");
  const auto roles = roles_of(config.variable_class);
  for (int slot = 0; slot < 2; ++slot) {
    const double f = config.floors[slot];
    if (!(std::isfinite(f) && f >= 0.0 && f < 1.0))
      report.add("floor_range", std::string(to_string(roles[slot])) + " floor must lie in [0,1)");
  }
  if (!report.ok()) return report;

  if (config.variable_class == VariableClass::cuv && !(config.x < config.y))
    report.add("target_order", "payer and payee targets: x < y required");
  if (config.variable_class == VariableClass::cjv && !(config.x + config.y > 1.0))
    report.add("target_order", "party targets: x + y > 1 required");

  for (Role r : roles) check_map(config, r, report);
  return report;
}

bool consensus(const DisputeConfig& config, double sf1, double sf2) {
  const auto roles = roles_of(config.variable_class);
  const double v1 = map_to_value(config, roles[0], sf1);
  const double v2 = map_to_value(config, roles[1], sf2);
  switch (config.variable_class) {
    case VariableClass::buv: return v1 == v2;
    case VariableClass::bjv: return v1 == 1.0 - v2;
    case VariableClass::cuv: return v1 >= v2 - kInequalityTolerance;
    case VariableClass::cjv: return v1 + v2 <= 1.0 + kInequalityTolerance;
  }
  return false;
}

double distance(const DisputeConfig& config, double sf1, double sf2) {
  const auto roles = roles_of(config.variable_class);
  switch (config.variable_class) {
    case VariableClass::buv:
      return std::abs(tau(Role::goal_1, sf1, config.k) - tau(Role::goal_0, sf2, config.k));
    case VariableClass::bjv:
      if (config.bjv_distance == BjvDistance::literal)
        return 1 - std::abs(tau(Role::goal_1, sf2, config.k) - tau(Role::goal_0, sf1, config.k));
      return 1 - std::abs(tau(Role::goal_1, sf1, config.k) - tau(Role::goal_0, sf2, config.k));
    case VariableClass::cuv:
    case VariableClass::cjv: {
      if (consensus(config, sf1, sf2)) return 0.0;
      const double v1 = map_to_value(config, roles[0], sf1);
      const double v2 = map_to_value(config, roles[1], sf2);
      return config.variable_class == VariableClass::cuv ? v2 - v1 : v1 + v2 - 1.0;
    }
  }
  return 0.0;
}

std::string_view to_string(VariableClass c) {
  switch (c) {
    case VariableClass::buv: return "BUV";
    case VariableClass::bjv: return "BJV";
    case VariableClass::cuv: return "CUV";
    case VariableClass::cjv: return "CJV";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::goal_1: return "goal-1";
    case Role::goal_0: return "goal-0";
    case Role::payer: return "payer";
    case Role::payee: return "payee";
    case Role::p1: return "p1";
    case Role::p2: return "p2";
  }
  return "?";
}

std::optional<VariableClass> parse_variable_class(std::string_view s) {
  for (auto c : {VariableClass::buv, VariableClass::bjv, VariableClass::cuv, VariableClass::cjv})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  for (auto r : {Role::goal_1, Role::goal_0, Role::payer, Role::payee, Role::p1, Role::p2})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

}  // namespace quam
