#pragma once

// Data model of one party's argument graph: a single goal argument, pro and
// con arguments with base scores, and weighted acyclic influence relations.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quam/error.hpp"

namespace quam {

using ArgumentId = std::string;

enum class ArgumentClass { goal, pro, con };

/// Who contributed an argument. Mediator arguments are split by the kind of
/// knowledge they carry.
enum class Provenance {
  party,
  mediator_opinion,
  mediator_factual,
  mediator_mandatory,
  mediator_dispositive,
};

enum class Polarity { support, attack };

/// Factual and mandatory arguments are pinned at base score 1 and accept no
/// influencers.
constexpr bool is_pinned(Provenance p) {
  return p == Provenance::mediator_factual || p == Provenance::mediator_mandatory;
}

constexpr bool is_mediator(Provenance p) { return p != Provenance::party; }

struct Argument {
  ArgumentId id;
  std::string text;
  ArgumentClass kind = ArgumentClass::pro;
  Provenance provenance = Provenance::party;
  double base_score = 0.0;

  bool operator==(const Argument&) const = default;
};

struct Relation {
  ArgumentId source;
  ArgumentId target;
  Polarity polarity = Polarity::support;
  double weight = 0.0;

  bool operator==(const Relation&) const = default;
};

struct QuamFramework {
  std::string party_label;
  std::vector<Argument> arguments;
  std::vector<Relation> relations;

  const Argument* find(std::string_view id) const;
  /// Throws if the framework has no goal argument.
  const Argument& goal() const;

  bool operator==(const QuamFramework&) const = default;
};

/// Every violated invariant of `fw`; empty when the framework is well formed.
ValidationReport validate_framework(const QuamFramework& fw);

/// Sources before targets, ties broken by ascending id. Throws
/// ErrorCode::cycle when the relation graph has a cycle.
std::vector<ArgumentId> topological_order(const QuamFramework& fw);

/// A copy of `fw` extended by one influencer and its single relation.
QuamFramework apply_influencer(const QuamFramework& fw, const Argument& arg, const Relation& rel);

std::string_view to_string(ArgumentClass c);
std::string_view to_string(Provenance p);
std::string_view to_string(Polarity p);
std::optional<ArgumentClass> parse_argument_class(std::string_view s);
std::optional<Provenance> parse_provenance(std::string_view s);
std::optional<Polarity> parse_polarity(std::string_view s);

}  // namespace quam
