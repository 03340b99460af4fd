#pragma once

// Versioned JSON document holding a whole mediation: setup, move ledger and
// cached snapshots. Parsing is strict (unknown fields are rejected) and loading
// recomputes every snapshot from the ledger.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quam/session.hpp"

namespace quam::io {

using nlohmann::json;

inline constexpr std::string_view kFormatVersion = "1.0";

struct SessionDocument {
  std::string version{kFormatVersion};
  SessionSetup setup;
  std::vector<Move> ledger;
  /// As found in the file; never trusted, only compared on replay.
  std::optional<std::vector<json>> stored_snapshots;

  /// Identity ignores the cached snapshots.
  bool operator==(const SessionDocument& o) const {
    return version == o.version && setup == o.setup && ledger == o.ledger;
  }
};

/// Rounds to at most 9 fractional digits, the precision of the file format.
double quantize(double v);
/// Fixed-point rendering, e.g. format_fixed(0.75, 6) == "0.750000".
std::string format_fixed(double v, int digits);

/// Syntax and schema only. Throws ErrorCode::syntax (with line/column) or
/// ErrorCode::schema (with the JSON path of the offending field).
SessionDocument parse_document(std::string_view text);
/// Re-checks every invariant and replays the ledger.
MediationSession load_session(const SessionDocument& doc);
MediationSession parse_session(std::string_view text);

SessionDocument to_document(const MediationSession& session);
/// Stored snapshots are emitted when present.
std::string serialize_document(const SessionDocument& doc);
/// Canonical text for a session, snapshots recomputed.
std::string serialize_session(const MediationSession& session);

json to_json(const QuamFramework& fw);
json to_json(const StageSnapshot& snapshot);
json to_json(const Move& move);
json to_json(const ValidationReport& report);
json to_json(const std::vector<TrajectoryRow>& rows, const MediationSession& session);
json to_json(const SessionDocument& doc);
/// Schema-checked Move; `relation.source` defaults to the argument id.
Move move_from_json(const json& j);

struct ReplayStage {
  enum class Status { match, mismatch, missing, unexpected };
  int stage = 0;
  Status status = Status::match;
};

struct ReplayReport {
  std::vector<ReplayStage> stages;
  /// Missing stored snapshots are reported but do not fail the replay.
  bool ok() const;
};

/// Recomputes snapshots from the ledger and compares them with the stored
/// ones at file precision.
ReplayReport replay_document(const SessionDocument& doc);

std::string read_file(const std::string& path);
/// Write to a sibling temporary, then rename over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace quam::io
