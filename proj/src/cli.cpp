#include "quam/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "quam/io.hpp"

namespace quam::cli {

namespace {

constexpr int kDigits = 6;

std::string fx(double v) { return io::format_fixed(v, kDigits); }
std::string fx(const FoldResult& v) { return v ? fx(*v) : std::string("nil"); }

// QUAM_LOG=debug traces steps on stderr.
bool debug_enabled() {
  const char* level = std::getenv("QUAM_LOG");
  return level && std::string_view(level) == "debug";
}

void debug(std::ostream& err, const std::string& msg) {
  if (debug_enabled()) err << "[quam] " << msg << '\n';
}

void print_party(std::ostream& out, const MediationSession& s, int index) {
  const auto& fw = s.framework(index);
  const auto& party = s.current().parties[index];
  out << "party " << fw.party_label << " (stage " << s.stage() << ")\n";
  for (const auto& id : topological_order(fw)) {
    const auto& node = party.evaluation.nodes.at(id);
    out << "  SF(" << id << ")=" << fx(node.score);
    if (node.attack || node.support) out << "  att=" << fx(node.attack) << " supp=" << fx(node.support);
    if (id == party.goal) out << "  [goal]";
    out << '\n';
  }
  for (const auto& c : party.evaluation.constraint_trace)
    out << "  " << (c.constraint == Constraint::c1_pinned_attack ? "C1" : "C2") << ' ' << c.target << " <- "
        << c.trigger << '\n';
}

void print_snapshot(std::ostream& out, const StageSnapshot& snap, std::string_view tag) {
  out << "stage " << snap.stage_index << " (" << tag << ")\n";
  for (const auto& p : snap.parties)
    out << "  " << p.party << ": SF(" << p.goal << ")=" << fx(p.goal_score) << " value=" << fx(p.mapped_value) << '\n';
  out << "  distance=" << fx(snap.distance) << " consensus=" << (snap.consensus ? "true" : "false") << '\n';
}

int cmd_validate(const std::string& file, std::ostream& out) {
  const auto doc = io::parse_document(io::read_file(file));
  ValidationReport report = validate_setup(doc.setup);
  if (report.ok()) {
    try {
      io::load_session(doc);
    } catch (const Error& e) {
      report.add(std::string(to_string(e.code())), e.what());
    }
  }
  if (report.ok()) {
    out << "valid\n";
    return kExitOk;
  }
  out << "invalid\n";
  for (const auto& v : report.violations) out << "  " << v.code << ": " << v.message << '\n';
  return kExitDomain;
}

int cmd_evaluate(const std::string& file, const std::string& party, std::ostream& out) {
  const auto session = io::parse_session(io::read_file(file));
  if (!party.empty()) {
    const int idx = session.party_index(party);
    if (idx < 0) throw Error(ErrorCode::not_found, "unknown party " + party);
    print_party(out, session, idx);
    return kExitOk;
  }
  for (int i = 0; i < 2; ++i) print_party(out, session, i);
  const auto& snap = session.current();
  out << "distance=" << fx(snap.distance) << " consensus=" << (snap.consensus ? "true" : "false") << '\n';
  return kExitOk;
}

struct MoveArgs {
  std::string party;
  std::string arg;
  std::string target;
  std::string polarity;
  double weight = 0.0;
  bool commit = false;
};

int cmd_move(const std::string& file, const MoveArgs& a, std::ostream& out, std::ostream& err) {
  auto session = io::parse_session(io::read_file(file));
  Move move;
  move.stage_index = session.stage() + 1;
  move.target_party = a.party;
  move.persuasive_id = a.arg;
  move.relation = {a.arg, a.target, a.polarity == "A" ? Polarity::attack : Polarity::support, a.weight};

  if (!a.commit) {
    print_snapshot(out, session.what_if(move), "what-if");
    return kExitOk;
  }
  print_snapshot(out, session.apply_move(move), "committed");
  io::write_file_atomic(file, io::serialize_session(session));
  debug(err, "wrote " + file + " at stage " + std::to_string(session.stage()));
  return kExitOk;
}

int cmd_trajectory(const std::string& file, const std::string& format, std::ostream& out) {
  const auto session = io::parse_session(io::read_file(file));
  const auto rows = session.trajectory();
  const auto& fws = session.setup().frameworks;
  if (format == "json") {
    out << io::to_json(rows, session).dump(2) << '\n';
    return kExitOk;
  }
  if (format == "csv") {
    out << "stage";
    for (const auto& fw : fws) out << ',' << fw.party_label << "_sf," << fw.party_label << "_value";
    out << ",distance,consensus\n";
    for (const auto& r : rows) {
      out << r.stage;
      for (int i = 0; i < 2; ++i) out << ',' << fx(r.goal_scores[i]) << ',' << fx(r.mapped_values[i]);
      out << ',' << fx(r.distance) << ',' << (r.consensus ? "true" : "false") << '\n';
    }
    return kExitOk;
  }

  std::vector<std::string> header{"stage"};
  for (const auto& fw : fws) {
    header.push_back(fw.party_label + " SF");
    header.push_back(fw.party_label + " value");
  }
  header.push_back("distance");
  header.push_back("consensus");
  std::vector<std::size_t> width;
  for (const auto& h : header) width.push_back(std::max<std::size_t>(h.size(), 9));
  auto cell = [&](std::size_t col, const std::string& v) {
    out << std::left << std::setw(static_cast<int>(width[col])) << v << (col + 1 < width.size() ? "  " : "\n");
  };
  for (std::size_t c = 0; c < header.size(); ++c) cell(c, header[c]);
  for (const auto& r : rows) {
    cell(0, std::to_string(r.stage));
    for (int i = 0; i < 2; ++i) {
      cell(1 + 2 * i, fx(r.goal_scores[i]));
      cell(2 + 2 * i, fx(r.mapped_values[i]));
    }
    cell(5, fx(r.distance));
    cell(6, r.consensus ? "true" : "false");
  }
  return kExitOk;
}

int cmd_replay(const std::string& file, std::ostream& out) {
  const auto doc = io::parse_document(io::read_file(file));
  const auto report = io::replay_document(doc);
  for (const auto& st : report.stages) {
    out << "stage " << st.stage << ": ";
    switch (st.status) {
      case io::ReplayStage::Status::match: out << "match\n"; break;
      case io::ReplayStage::Status::mismatch: out << "MISMATCH\n"; break;
      case io::ReplayStage::Status::missing: out << "not stored\n"; break;
      case io::ReplayStage::Status::unexpected: out << "stored but not reproduced\n"; break;
    }
  }
  out << (report.ok() ? "replay ok\n" : "replay mismatch\n");
  return report.ok() ? kExitOk : kExitDomain;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted bipolar argument evaluation and staged mediation sessions", "quam"};
  app.require_subcommand(1);

  std::string file;
  std::string party;
  std::string format = "table";
  MoveArgs move;

  auto* validate = app.add_subcommand("validate", "Check a session document against every invariant");
  validate->add_option("file", file, "Session document")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Print final scores at the current stage");
  evaluate->add_option("file", file, "Session document")->required();
  evaluate->add_option("--party", party, "Only this party");

  auto* mv = app.add_subcommand("move", "Preview (or commit) one mediator move");
  mv->add_option("file", file, "Session document")->required();
  mv->add_option("--party", move.party, "Party to persuade")->required();
  mv->add_option("--arg", move.arg, "Persuasive argument id")->required();
  mv->add_option("--target", move.target, "Argument the move influences")->required();
  mv->add_option("--polarity", move.polarity, "A (attack) or S (support)")
      ->required()
      ->check(CLI::IsMember({"A", "S"}));
  mv->add_option("--weight", move.weight, "Relation weight in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
  mv->add_flag("--commit", move.commit, "Append the move to the ledger and rewrite the file");

  auto* traj = app.add_subcommand("trajectory", "Distance and mapped values per stage");
  traj->add_option("file", file, "Session document")->required();
  traj->add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));

  auto* replay = app.add_subcommand("replay", "Recompute snapshots from the ledger and compare");
  replay->add_option("file", file, "Session document")->required();

  std::vector<std::string> argv_store{"quam"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    debug(err, "command " + app.get_subcommands().front()->get_name() + " on " + file);
    if (validate->parsed()) return cmd_validate(file, out);
    if (evaluate->parsed()) return cmd_evaluate(file, party, out);
    if (mv->parsed()) return cmd_move(file, move, out, err);
    if (traj->parsed()) return cmd_trajectory(file, format, out);
    if (replay->parsed()) return cmd_replay(file, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace quam::cli
