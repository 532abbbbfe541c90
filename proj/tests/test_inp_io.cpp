#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include "wdsgen/rng.hpp"
#include "wdsgen/inp_io.hpp"
#include "wdsgen/units.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wdsgen;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> corpus_paths() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(WDSGEN_DATA_DIR))
    if (e.path().extension() == ".inp") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

bool close(double a, double b, double tol = 1e-9) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

void check_models_equal(const NetworkModel& a, const NetworkModel& b) {
  REQUIRE(a.junctions.size() == b.junctions.size());
  REQUIRE(a.reservoirs.size() == b.reservoirs.size());
  REQUIRE(a.tanks.size() == b.tanks.size());
  REQUIRE(a.pipes.size() == b.pipes.size());
  REQUIRE(a.pumps.size() == b.pumps.size());
  REQUIRE(a.valves.size() == b.valves.size());
  for (std::size_t i = 0; i < a.junctions.size(); ++i) {
    CHECK(a.junctions[i].name == b.junctions[i].name);
    CHECK(close(a.junctions[i].elevation, b.junctions[i].elevation));
    CHECK(close(a.junctions[i].base_demand, b.junctions[i].base_demand));
    CHECK(a.junctions[i].demand_pattern == b.junctions[i].demand_pattern);
  }
  for (std::size_t i = 0; i < a.pipes.size(); ++i) {
    CHECK(a.pipes[i].name == b.pipes[i].name);
    CHECK(a.pipes[i].start == b.pipes[i].start);
    CHECK(a.pipes[i].end == b.pipes[i].end);
    CHECK(close(a.pipes[i].length, b.pipes[i].length));
    CHECK(close(a.pipes[i].diameter, b.pipes[i].diameter));
    CHECK(close(a.pipes[i].roughness, b.pipes[i].roughness));
    CHECK(a.pipes[i].status == b.pipes[i].status);
  }
  for (std::size_t i = 0; i < a.tanks.size(); ++i) {
    CHECK(close(a.tanks[i].elevation, b.tanks[i].elevation));
    CHECK(close(a.tanks[i].init_level, b.tanks[i].init_level));
    CHECK(close(a.tanks[i].diameter, b.tanks[i].diameter));
  }
  for (std::size_t i = 0; i < a.pumps.size(); ++i) {
    CHECK(a.pumps[i].kind == b.pumps[i].kind);
    CHECK(a.pumps[i].head_curve == b.pumps[i].head_curve);
    CHECK(close(a.pumps[i].power_kw, b.pumps[i].power_kw));
  }
  for (std::size_t i = 0; i < a.valves.size(); ++i) {
    CHECK(a.valves[i].kind == b.valves[i].kind);
    CHECK(close(a.valves[i].setting, b.valves[i].setting));
    CHECK(close(a.valves[i].diameter, b.valves[i].diameter));
    CHECK(a.valves[i].status == b.valves[i].status);
  }
  REQUIRE(a.patterns.size() == b.patterns.size());
  for (const auto& [name, series] : a.patterns) {
    REQUIRE(b.patterns.count(name) == 1);
    const auto& other = b.patterns.at(name);
    REQUIRE(series.size() == other.size());
    for (std::size_t i = 0; i < series.size(); ++i) CHECK(close(series[i], other[i]));
  }
  REQUIRE(a.curves.size() == b.curves.size());
  for (const auto& [name, pts] : a.curves) {
    const auto& other = b.curves.at(name);
    REQUIRE(pts.size() == other.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(close(pts[i].first, other[i].first));
      CHECK(close(pts[i].second, other[i].second));
    }
  }
  REQUIRE(a.coordinates.size() == b.coordinates.size());
  CHECK(a.headloss_formula == b.headloss_formula);
  CHECK(close(a.times.duration_h, b.times.duration_h));
  CHECK(close(a.times.time_step_h, b.times.time_step_h));
}

}  // namespace

TEST_CASE("hanoi parses to its catalog component counts") {
  const auto m = parse_inp(read_file(std::string(WDSGEN_DATA_DIR) + "/hanoi.inp"));
  CHECK(m.junctions.size() == 31);
  CHECK(m.pipes.size() == 34);
  CHECK(m.reservoirs.size() == 1);
  CHECK(m.tanks.empty());
  CHECK(m.pumps.empty());
  CHECK(m.flow_unit == FlowUnit::CMH);
  CHECK(m.times.duration_h == 24.0);
}

TEST_CASE("minimal file with empty sections") {
  const auto m = parse_inp("[JUNCTIONS]\n[RESERVOIRS]\n[PIPES]\n[END]\n");
  CHECK(m.junctions.empty());
  CHECK(m.patterns.empty());
  CHECK(m.node_count() == 0);
}

TEST_CASE("unsupported sections are skipped with an audit trail") {
  const auto m = parse_inp(
      "[TITLE]\nsome words\n[JUNCTIONS]\nJ 1 0\n[RESERVOIRS]\nR 10\n"
      "[PIPES]\nP R J 10 100 100\n[QUALITY]\nJ 2\n[END]\n");
  REQUIRE(m.skipped_sections.size() == 2);
  CHECK(m.skipped_sections[0] == "QUALITY");
  CHECK(m.skipped_sections[1] == "TITLE");
}

TEST_CASE("parser reports malformed content with line numbers") {
  CHECK_THROWS_AS(parse_inp("[JUNCTIONS]\nJ notanumber\n[END]\n"), MalformedSection);
  CHECK_THROWS_MATCHES(parse_inp("[JUNCTIONS]\nJ1 0 zz\n[END]\n"), MalformedSection,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("line 2")));
  CHECK_THROWS_AS(parse_inp("orphan line\n[END]\n"), MalformedSection);
}

TEST_CASE("dangling references and duplicates are rejected") {
  CHECK_THROWS_AS(
      parse_inp("[JUNCTIONS]\nJ 1 0\n[RESERVOIRS]\nR 1\n[PIPES]\nP R NOPE 1 1 1\n[END]\n"),
      DanglingReference);
  CHECK_THROWS_AS(
      parse_inp("[JUNCTIONS]\nJ 1 0\nJ 2 0\n[RESERVOIRS]\nR 1\n[PIPES]\nP R J 1 1 1\n[END]\n"),
      DuplicateName);
  CHECK_THROWS_AS(
      parse_inp("[JUNCTIONS]\nJ 1 0 GHOSTPAT\n[RESERVOIRS]\nR 1\n"
                "[PIPES]\nP R J 1 1 1\n[END]\n"),
      DanglingReference);
}

TEST_CASE("non-UTF-8 bytes are rejected") {
  std::string bad = "[JUNCTIONS]\nJ\xFF 1 0\n[END]\n";
  CHECK_THROWS_AS(parse_inp(bad), MalformedSection);
}

TEST_CASE("negative base demand is preserved and flagged") {
  const auto m = parse_inp(
      "[JUNCTIONS]\nJ 5 -3\n[RESERVOIRS]\nR 10\n[PIPES]\nP R J 10 100 100\n[END]\n");
  CHECK(m.junctions[0].base_demand == -3.0);
  REQUIRE_FALSE(m.warnings.empty());
  CHECK(m.warnings[0].find("negative base demand") != std::string::npos);
}

TEST_CASE("round-trip over the bundled corpus") {
  for (const auto& path : corpus_paths()) {
    INFO(path);
    const auto m1 = parse_inp(read_file(path));
    const auto text = serialize_inp(m1);
    const auto m2 = parse_inp(text);
    check_models_equal(m1, m2);
    // And a second round trip is textually identical.
    CHECK(serialize_inp(m2) == text);
  }
}

TEST_CASE("si round-trip: serialize(si) reparses to the same si model") {
  for (const auto& path : corpus_paths()) {
    INFO(path);
    const auto m1 = convert_to_si(parse_inp(read_file(path)));
    const auto m2 = convert_to_si(parse_inp(serialize_inp(m1)));
    check_models_equal(m1, m2);
  }
}

TEST_CASE("empty model serializes to headers only") {
  NetworkModel m;
  const auto text = serialize_inp(m);
  CHECK(text.find("[JUNCTIONS]") != std::string::npos);
  CHECK(text.find("[END]") != std::string::npos);
  const auto m2 = parse_inp(text);
  CHECK(m2.node_count() == 0);
}

TEST_CASE("pattern values survive serialization within 1e-9") {
  NetworkModel m;
  m.junctions.push_back({"J", 1.0, 2.0, "PAT"});
  m.reservoirs.push_back({"R", 10.0, ""});
  m.pipes.push_back({"P", "R", "J", 100, 150, 120, 0, LinkStatus::Open});
  auto& pat = m.patterns["PAT"];
  Rng rng(3);
  for (int i = 0; i < 24; ++i) pat.push_back(rng.uniform(0.1, 2.0));
  const auto m2 = parse_inp(serialize_inp(m));
  REQUIRE(m2.patterns.at("PAT").size() == 24);
  for (int i = 0; i < 24; ++i)
    CHECK(m2.patterns.at("PAT")[static_cast<std::size_t>(i)] ==
          Catch::Approx(pat[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("unit conversion to SI") {
  SECTION("GPM demands") {
    const auto m = convert_to_si(parse_inp(
        "[JUNCTIONS]\nJ 0 100\n[RESERVOIRS]\nR 10\n[PIPES]\nP R J 100 12 120\n"
        "[OPTIONS]\nUNITS GPM\n[END]\n"));
    CHECK(m.junctions[0].base_demand == Catch::Approx(0.0063090196).epsilon(1e-7));
    CHECK(m.junctions[0].base_demand == Catch::Approx(100.0 * oracle::kGpmToM3s));
    // 12 inch diameter.
    CHECK(m.pipes[0].diameter == Catch::Approx(12.0 * oracle::kInchToM));
    CHECK(m.pipes[0].diameter == Catch::Approx(0.3048));
    // 100 ft length.
    CHECK(m.pipes[0].length == Catch::Approx(100.0 * oracle::kFtToM));
  }
  SECTION("LPS is divided by 1000 and conversion is idempotent") {
    const auto base = parse_inp(
        "[JUNCTIONS]\nJ 3 250\n[RESERVOIRS]\nR 10\n[PIPES]\nP R J 100 200 120\n"
        "[OPTIONS]\nUNITS LPS\n[END]\n");
    const auto m1 = convert_to_si(base);
    CHECK(m1.junctions[0].base_demand == Catch::Approx(0.25));
    CHECK(m1.pipes[0].diameter == Catch::Approx(0.2));
    CHECK(m1.junctions[0].elevation == 3.0); // meters already
    const auto m2 = convert_to_si(m1);
    CHECK(m2.junctions[0].base_demand == m1.junctions[0].base_demand);
    CHECK(m2.pipes[0].diameter == m1.pipes[0].diameter);
    CHECK(m2.si);
  }
  SECTION("CMH") {
    const auto m = convert_to_si(parse_inp(
        "[JUNCTIONS]\nJ 0 3600\n[RESERVOIRS]\nR 10\n[PIPES]\nP R J 100 200 120\n"
        "[OPTIONS]\nUNITS CMH\n[END]\n"));
    CHECK(m.junctions[0].base_demand == Catch::Approx(1.0));
  }
  SECTION("unsupported unit tag") {
    CHECK_THROWS_AS(parse_inp("[OPTIONS]\nUNITS FURLONGS\n[END]\n"), UnsupportedUnit);
  }
}

TEST_CASE("referential integrity holds after parsing the corpus") {
  for (const auto& path : corpus_paths()) {
    const auto m = parse_inp(read_file(path));
    for (const auto& j : m.junctions)
      if (!j.demand_pattern.empty()) CHECK(m.patterns.count(j.demand_pattern) == 1);
    for (const auto& p : m.pumps)
      if (p.kind == PumpKind::Head) CHECK(m.curves.count(p.head_curve) == 1);
  }
}

TEST_CASE("weird file: CRLF, comments, skipped sections, GPV flag") {
  const auto m = parse_inp(read_file(std::string(WDSGEN_DATA_DIR) + "/weird.inp"));
  CHECK(m.junctions.size() == 3);
  CHECK(m.reservoirs.size() == 2);
  CHECK(m.valves.size() == 1);
  CHECK(m.valves[0].kind == ValveKind::GPV);
  CHECK(m.valves[0].status == LinkStatus::Closed);
  bool flagged = false;
  for (const auto& w : m.warnings)
    if (w.find("unsupported-for-simulation") != std::string::npos) flagged = true;
  CHECK(flagged);
  CHECK(m.headloss_formula == HeadlossFormula::DarcyWeisbach);
  CHECK(m.patterns.at("WK").size() == 6);
}
