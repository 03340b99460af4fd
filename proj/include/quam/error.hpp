#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quam {

/// A single broken invariant, with the ids it concerns.
struct Violation {
  std::string code;
  std::string message;
  std::vector<std::string> ids;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
  void add(std::string code, std::string message, std::vector<std::string> ids = {});
  void append(const ValidationReport& other, std::string_view prefix = {});
  std::string to_string() const;
};

enum class ErrorCode {
  domain,               // numeric argument outside its interval
  validation,           // structural invariant broken; see report()
  cycle,                // relation graph is not acyclic
  duplicate_id,
  dangling_target,
  constraint_conflict,  // weight-1 factual/mandatory attacker and supporter on one target
  invalid_config,
  illegal_move,
  empty_ledger,
  missing_priority,
  syntax,
  schema,
  not_found,
  io,
};

std::string_view to_string(ErrorCode code);

/// The one exception type thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, ValidationReport report);

  ErrorCode code() const noexcept { return code_; }
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ErrorCode code_;
  ValidationReport report_;
};

}  // namespace quam
