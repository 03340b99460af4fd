#include "quam/error.hpp"

#include <algorithm>

namespace quam {

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

void ValidationReport::add(std::string code, std::string message, std::vector<std::string> ids) {
  violations.push_back({std::move(code), std::move(message), std::move(ids)});
}

void ValidationReport::append(const ValidationReport& other, std::string_view prefix) {
  for (Violation v : other.violations) {
    if (!prefix.empty()) v.message = std::string(prefix) + ": " + v.message;
    violations.push_back(std::move(v));
  }
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += v.code;
    out += ": ";
    out += v.message;
  }
  return out;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::validation: return "validation";
    case ErrorCode::cycle: return "cycle";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::dangling_target: return "dangling_target";
    case ErrorCode::constraint_conflict: return "constraint_conflict";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::illegal_move: return "illegal_move";
    case ErrorCode::empty_ledger: return "empty_ledger";
    case ErrorCode::missing_priority: return "missing_priority";
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::schema: return "schema";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, ValidationReport report)
    : std::runtime_error(report.ok() ? message : message + "\n" + report.to_string()),
      code_(code),
      report_(std::move(report)) {}

}  // namespace quam
