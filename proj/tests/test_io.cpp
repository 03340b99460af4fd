#include <doctest.h>

#include <filesystem>

#include <unistd.h>

#include "quam/io.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/properties.hpp"

using namespace quam;
using namespace quam::testing;
using quam::io::json;

namespace {

std::string fixture(const std::string& name) { return io::read_file(fixture_path(name)); }

Error error_of(std::string_view text) {
  try {
    io::parse_session(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("document was accepted");
  return Error(ErrorCode::io, "");
}

std::string edited(const std::string& name, const std::function<void(json&)>& edit) {
  json j = json::parse(fixture(name));
  edit(j);
  return j.dump(2);
}

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("the stage-0 fixture loads and evaluates") {
  auto s = io::parse_session(fixture("compensation_stage0.json"));
  CHECK(s.stage() == 0);
  CHECK(s.current().parties[1].party == "supermarket");
  CHECK(s.current().parties[1].goal_score == 1.0);
  CHECK(s.setup() == compensation_setup());
}

TEST_CASE("the committed fixture carries the p6 move") {
  auto s = io::parse_session(fixture("compensation_p6.json"));
  REQUIRE(s.ledger().size() == 1);
  CHECK(s.ledger()[0] == safety_norm_move());
  CHECK(std::abs(s.current().parties[1].goal_score - 0.75) < 1e-9);
}

TEST_CASE("fixtures survive serialize(parse(text)) byte for byte") {
  for (const char* name : {"compensation_stage0.json", "compensation_p6.json", "cyclic.json"}) {
    CAPTURE(std::string(name));
    const std::string text = fixture(name);
    const auto doc = io::parse_document(text);
    CHECK(io::serialize_document(doc) == text);
    CHECK(io::parse_document(io::serialize_document(doc)) == doc);
  }
}

TEST_CASE("random sessions round-trip") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    auto rs = random_session(rng, kAllClasses[trial % 4], {.allow_con = chance(rng, 0.7)});
    auto& cfg = rs.setup.config;
    if (!is_binary(cfg.variable_class) && chance(rng, 0.3)) {
      cfg.floors = {0.0, 0.0};
      const auto roles = roles_of(cfg.variable_class);
      // Explicit maps at file precision, otherwise equal to the defaults.
      for (int i = 0; i < 2; ++i) {
        auto m = effective_transform(cfg, roles[i]);
        cfg.transforms[i] = AffineMap{io::quantize(m.slope), io::quantize(m.intercept)};
      }
    }
    if (trial % 4 == 1 && chance(rng, 0.5)) rs.setup.config.bjv_distance = BjvDistance::literal;
    auto s = MediationSession::create(rs.setup);
    for (const char* id : {"m_pro", "m_con"}) {
      const auto& fw = s.framework(rs.moved);
      const auto& t = fw.arguments[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(fw.arguments.size()) - 1))];
      const Polarity pol = std::string(id) == "m_pro" ? Polarity::support : Polarity::attack;
      s.apply_move({s.stage() + 1, "q", id, {id, t.id, pol, unit(rng)}});
    }
    const std::string text = io::serialize_session(s);
    auto back = io::parse_session(text);
    CHECK(back.setup() == s.setup());
    CHECK(back.ledger() == s.ledger());
    CHECK(back.snapshots() == s.snapshots());
    CHECK(io::serialize_session(back) == text);
    CHECK(io::replay_document(io::parse_document(text)).ok());
  }
}

TEST_CASE("quantize and format_fixed") {
  CHECK(io::quantize(0.1234567891234) == 0.123456789);
  CHECK(io::quantize(0.75) == 0.75);
  CHECK(io::format_fixed(0.75, 6) == "0.750000");
  CHECK(io::format_fixed(-0.0, 6) == "0.000000");
  CHECK(io::format_fixed(-1e-12, 6) == "0.000000");
}

TEST_CASE("schema violations name the field") {
  SUBCASE("weight above 1") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["frameworks"][0]["relations"][0]["weight"] = 1.2; }));
    CHECK(e.code() == ErrorCode::schema);
    CHECK(contains(e.what(), "weight out of [0,1]"));
    CHECK(contains(e.what(), "/frameworks/0/relations/0/weight"));
  }
  SUBCASE("unknown field") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["config"]["colour"] = "blue"; }));
    CHECK(e.code() == ErrorCode::schema);
    CHECK(contains(e.what(), "/config/colour: unknown field"));
  }
  SUBCASE("missing field") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["frameworks"][1].erase("party"); }));
    CHECK(contains(e.what(), "/frameworks/1/party: missing required field"));
  }
  SUBCASE("wrong version") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["version"] = "0.9"; }));
    CHECK(contains(e.what(), "unsupported format version"));
  }
  SUBCASE("bad enum") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["config"]["variable_class"] = "XYZ"; }));
    CHECK(e.code() == ErrorCode::schema);
  }
  SUBCASE("score given as a string") {
    auto e = error_of(edited("compensation_stage0.json", [](json& j) { j["frameworks"][0]["arguments"][1]["base_score"] = "0.9"; }));
    CHECK(contains(e.what(), "expected a number"));
  }
}

TEST_CASE("syntax errors carry a position") {
  const std::string text = fixture("compensation_stage0.json");
  auto e = error_of(text.substr(0, text.size() / 2));
  CHECK(e.code() == ErrorCode::syntax);
  CHECK(contains(e.what(), "line "));
  CHECK(contains(e.what(), "column "));

  auto bad = error_of("{\n  \"version\": \"1.0\",\n  oops\n}");
  CHECK(contains(bad.what(), "line 3"));
}

TEST_CASE("invariant violations surface the core report") {
  auto cyclic = io::parse_document(fixture("cyclic.json"));
  try {
    io::load_session(cyclic);
    FAIL("cyclic framework accepted");
  } catch (const Error& e) {
    CHECK(e.report().has("cycle"));
  }
}

TEST_CASE("replay compares stored snapshots") {
  SUBCASE("untouched file matches") {
    auto r = io::replay_document(io::parse_document(fixture("compensation_p6.json")));
    CHECK(r.ok());
    REQUIRE(r.stages.size() == 2);
    for (const auto& st : r.stages) CHECK(st.status == io::ReplayStage::Status::match);
  }
  SUBCASE("tampered distance is a mismatch") {
    auto text = edited("compensation_p6.json", [](json& j) { j["snapshots"][1]["distance"] = 0.5; });
    auto r = io::replay_document(io::parse_document(text));
    CHECK_FALSE(r.ok());
    CHECK(r.stages[0].status == io::ReplayStage::Status::match);
    CHECK(r.stages[1].status == io::ReplayStage::Status::mismatch);
  }
  SUBCASE("missing snapshots are reported but pass") {
    auto text = edited("compensation_p6.json", [](json& j) { j.erase("snapshots"); });
    auto r = io::replay_document(io::parse_document(text));
    CHECK(r.ok());
    CHECK(r.stages[1].status == io::ReplayStage::Status::missing);
  }
  SUBCASE("surplus stored snapshot fails") {
    auto text = edited("compensation_p6.json", [](json& j) { j["snapshots"].push_back(j["snapshots"][1]); });
    auto r = io::replay_document(io::parse_document(text));
    CHECK_FALSE(r.ok());
    CHECK(r.stages.back().status == io::ReplayStage::Status::unexpected);
  }
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / ("quam_io_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto path = (dir / "doc.json").string();
  io::write_file_atomic(path, "first\n");
  io::write_file_atomic(path, "second\n");
  CHECK(io::read_file(path) == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(io::read_file(path), Error);
}

TEST_CASE("moves parse with a defaulted relation source") {
  auto m = io::move_from_json(json::parse(R"({"stage":1,"party":"supermarket","argument":"p6",
      "relation":{"target":"theta_s","polarity":"attack","weight":0.5}})"));
  CHECK(m == safety_norm_move());
  CHECK(io::move_from_json(io::to_json(m)) == m);
  CHECK_THROWS_AS(io::move_from_json(json::parse(R"({"stage":1,"party":"s","argument":"p6"})")), Error);
}
