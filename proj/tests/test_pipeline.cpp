#include <catch2/catch_amalgamated.hpp>

#include "wdsgen/inp_io.hpp"
#include "wdsgen/pipeline.hpp"
#include "wdsgen/units.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace wdsgen;
namespace fs = std::filesystem;

namespace {

NetworkModel load_si(const std::string& file) {
  std::ifstream in(std::string(WDSGEN_DATA_DIR) + "/" + file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto m = convert_to_si(parse_inp(ss.str()));
  m.name = file.substr(0, file.find('.'));
  return m;
}

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("wdsgen_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig small_run(const NetworkModel& model, const fs::path& out, int n) {
  RunConfig run;
  run.num_samples = n;
  run.duration_h = 24;
  run.time_step_h = 1;
  run.gen_batch_size = 4;
  run.backup_times = 2;
  run.output_path = out.string();
  run.master_seed = 1234;
  StrategyEntry dem;
  dem.parameter = "junction_input_demand";
  dem.kind = StrategyKind::ADG;
  run.sampling.entries.push_back(dem);
  (void)model;
  return run;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

}  // namespace

TEST_CASE("file name grammar round-trips and rejects malformed names") {
  const auto name = layout::file_name("head_pump", "pump_curve_y", 3, "curve", "input");
  CHECK(name == "head_pump_pump_curve_y_3_curve_input.csv");
  const auto parsed = layout::parse_file_name(name);
  REQUIRE(parsed.has_value());
  CHECK(parsed->component == "head_pump");
  CHECK(parsed->parameter == "pump_curve_y");
  CHECK(parsed->shard == 3);
  CHECK(parsed->type == "curve");
  CHECK(parsed->io == "input");

  CHECK_FALSE(layout::parse_file_name("junction_pressure_0_dynamic.csv"));   // io missing
  CHECK_FALSE(layout::parse_file_name("junction_pressure_x_dynamic_output")); // bad shard
  CHECK_FALSE(layout::parse_file_name("mystery_pressure_0_dynamic_output"));  // unknown component
  CHECK_FALSE(layout::parse_file_name("junction_pressure_0_fancy_output"));   // bad type
}

TEST_CASE("folder name grammar") {
  CHECK(layout::folder_name("hanoi", 1, 24) == "hanoi_1GB_24H");
  CHECK(layout::folder_name("net_x", 232, 8760) == "net_x_232GB_1Y");
  const auto p = layout::parse_folder_name("net_x_232GB_1Y");
  REQUIRE(p.has_value());
  CHECK(p->network == "net_x");
  CHECK(p->capacity_gb == 232);
  CHECK(p->duration == "1Y");
  CHECK_FALSE(layout::parse_folder_name("hanoi_24H"));
  CHECK_FALSE(layout::parse_folder_name("hanoi_1TB_24H"));
  CHECK_FALSE(layout::parse_folder_name("hanoi_1GB_36H"));
}

TEST_CASE("table write-read round trip is bitwise") {
  const auto dir = fresh_dir("table");
  Rng rng(9);
  std::vector<double> vals;
  TableWriter w(dir / "junction_demand_0_dynamic_output.csv", {"a", "b", "c"});
  std::vector<std::vector<double>> expect;
  for (int r = 0; r < 50; ++r) {
    std::vector<double> row{rng.normal(0, 1), rng.uniform(-1e9, 1e9),
                            rng.uniform01() * 1e-8};
    w.append_row(r, row);
    expect.push_back(row);
  }
  w.flush();
  const auto t = read_table(dir / "junction_demand_0_dynamic_output.csv");
  REQUIRE(t.columns == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 50);
  for (std::size_t r = 0; r < 50; ++r) {
    CHECK(t.index[r] == static_cast<long long>(r));
    for (std::size_t c = 0; c < 3; ++c) {
      // Bitwise equality, not approximate.
      CHECK(t.rows[r][c] == expect[r][c]);
    }
  }
}

TEST_CASE("run config YAML round trip") {
  RunConfig c;
  c.num_samples = 77;
  c.duration_h = 8760;
  c.skip_names = {"n1", "n2"};
  c.pressure_range = {5.0, 120.0};
  c.adg.zero_dem_rate = 0.07;
  c.adg.p_commercial = {0.26, 0.31};
  StrategyEntry e;
  e.parameter = "pipe_diameter";
  e.kind = StrategyKind::Factor;
  e.lb = 0.45;
  e.ub = 0.55;
  c.sampling.entries.push_back(e);

  const auto node = run_config_to_yaml(c);
  const auto back = run_config_from_yaml(node);
  CHECK(back.num_samples == 77);
  CHECK(back.duration_h == 8760);
  CHECK(back.skip_names == c.skip_names);
  CHECK(back.pressure_range == c.pressure_range);
  CHECK(back.adg.zero_dem_rate == Catch::Approx(0.07));
  CHECK(back.adg.p_commercial.first == Catch::Approx(0.26));
  REQUIRE(back.sampling.find("pipe_diameter") != nullptr);
  CHECK(back.sampling.find("pipe_diameter")->kind == StrategyKind::Factor);
}

TEST_CASE("metadata document carries the full key set and round-trips") {
  const auto model = load_si("hanoi.inp");
  RunConfig run;
  run.inp_paths = {"hanoi.inp"};
  const std::vector<long long> tracers{0, 1, 2, 5};
  const auto meta = build_metadata(run, model, tracers);

  // Every recorded metadata key must be present.
  for (const char* key :
       {"adj_list", "backup_times", "batch_size", "duration", "extreme_dem_rate", "fcv_tune",
        "fractional_cpu_usage", "gen_batch_size", "gpv_tune", "head_pump_tune", "index_tracers",
        "inp_paths", "junction_tune", "max_extreme_dem_junctions", "mem_per_worker",
        "noise_range", "num_cpus", "num_samples", "odims", "okeys", "onames", "output_path",
        "p_commercial", "pbv_tune", "pipe_tune", "power_pump_tune", "pressure_range",
        "profile_commercial", "profile_extreme", "profile_household", "prv_tune", "psv_tune",
        "ray_temp_path", "reservoir_tune", "save_success_inp", "sim_outputs", "skip_names",
        "summer_amplitude_range", "summer_rolling_rate", "summer_start", "tank_tune",
        "tcv_tune", "temp_path", "time_consistency", "time_step", "verbose",
        "yearly_pattern_num_harmonics", "yield_worker_generator", "zero_dem_rate"}) {
    INFO(key);
    CHECK(meta[key].IsDefined());
  }
  CHECK(meta["adj_list"].size() == 34);
  CHECK(meta["onames"]["junction"].size() == 31);

  const auto text = write_metadata_markdown(meta, "hanoi");
  const auto back = parse_metadata_markdown(text);
  CHECK(back["num_samples"].as<int>() == meta["num_samples"].as<int>());
  CHECK(back["index_tracers"].as<std::vector<long long>>() == tracers);
  CHECK(back["adj_list"].size() == 34);
  CHECK(back["adj_list"][0][1].as<std::string>() == "p1");
  CHECK(back["zero_dem_rate"].as<double>() == meta["zero_dem_rate"].as<double>());
}

TEST_CASE("generate_dataset produces a conforming 10-scenario dataset") {
  const auto model = load_si("hanoi.inp");
  const auto out = fresh_dir("gen10");
  auto run = small_run(model, out, 10);
  const auto report = generate_dataset(run, model);
  CHECK(report.accepted == 10);

  const auto dir = report.dataset_dir;
  CHECK(layout::parse_folder_name(dir.filename().string()).has_value());

  // Pattern tables: 10 * 24 = 240 rows; static tables: 10 rows.
  const auto demand_in = read_table(dir / "junction_input_demand_0_dynamic_input.csv");
  CHECK(demand_in.rows.size() == 240);
  CHECK(demand_in.columns.size() == 31);
  const auto pressure = read_table(dir / "junction_pressure_0_dynamic_output.csv");
  CHECK(pressure.rows.size() == 240);
  const auto elev = read_table(dir / "junction_elevation_0_static_input.csv");
  CHECK(elev.rows.size() == 10);
  CHECK(elev.columns.size() == 31);
  const auto flow = read_table(dir / "pipe_flowrate_0_dynamic_output.csv");
  CHECK(flow.rows.size() == 240);
  CHECK(flow.columns.size() == 34);

  // Every csv name obeys the grammar; metadata exists; validation passes.
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv")
      CHECK(layout::parse_file_name(e.path().filename().string()).has_value());
  const auto problems = validate_dataset(dir);
  for (const auto& p : problems) INFO(p);
  CHECK(problems.empty());

  // Scenario indices: 240 rows indexed scenario*24+t in order.
  for (std::size_t r = 0; r < pressure.index.size(); ++r)
    CHECK(pressure.index[r] == static_cast<long long>(r));
}

TEST_CASE("num_samples 0 is rejected at config validation") {
  const auto model = load_si("toy3.inp");
  auto run = small_run(model, fresh_dir("zero"), 0);
  CHECK_THROWS_AS(generate_dataset(run, model), std::invalid_argument);
}

TEST_CASE("kill and resume reproduces the uninterrupted dataset bitwise") {
  const auto model = load_si("hanoi.inp");

  // Same configured output path for both runs so every recorded byte,
  // including the metadata, is comparable.
  const auto out = fresh_dir("resume");
  auto run = small_run(model, out, 8);
  const auto full = generate_dataset(run, model);
  const auto full_dir = out / "full_reference";
  fs::rename(full.dataset_dir, full_dir);

  GenerateOptions opts;
  opts.after_accept = [](std::size_t accepted) { return accepted < 4; }; // die at 50%
  CHECK_THROWS_AS(generate_dataset(run, model, opts), InterruptedRun);
  CHECK(fs::exists(out / "hanoi_pending_24H" / "checkpoint.yaml"));
  const auto resumed = generate_dataset(run, model); // picks up the checkpoint
  CHECK(resumed.resumed);
  CHECK(resumed.accepted == 8);

  const auto ca = dir_contents(full_dir);
  const auto cb = dir_contents(resumed.dataset_dir);
  REQUIRE(ca.size() == cb.size());
  for (const auto& [rel, bytes] : ca) {
    INFO(rel);
    REQUIRE(cb.count(rel) == 1);
    CHECK(cb.at(rel) == bytes);
  }
}

TEST_CASE("unreachable quota reports the dominant failing rule") {
  const auto model = load_si("toy3.inp");
  const auto out = fresh_dir("quota");
  auto run = small_run(model, out, 5);
  // Elevations sampled far above the source head: nothing validates.
  StrategyEntry elev;
  elev.parameter = "junction_elevation";
  elev.kind = StrategyKind::Sampling;
  elev.lb = 0.7;
  elev.ub = 0.9;
  run.sampling.entries.push_back(elev);
  run.acceptance_window = 40;
  run.min_acceptance_rate = 0.05;
  try {
    generate_dataset(run, model);
    FAIL("expected QuotaUnreachable");
  } catch (const QuotaUnreachable& e) {
    CHECK(e.dominant_rule == "pressure_in_range");
  }
}

TEST_CASE("skip names drop node columns and their adjacent links") {
  const auto model = load_si("toy3.inp");
  const auto out = fresh_dir("skip");
  auto run = small_run(model, out, 2);
  run.skip_names = {"J2"};
  const auto report = generate_dataset(run, model);
  const auto pressure = read_table(report.dataset_dir / "junction_pressure_0_dynamic_output.csv");
  CHECK(pressure.columns == std::vector<std::string>{"J1", "J3"});
  // P2 (J1-J2) and P3 (J2-J3) touch J2 and disappear.
  const auto flow = read_table(report.dataset_dir / "pipe_flowrate_0_dynamic_output.csv");
  CHECK(flow.columns == std::vector<std::string>{"P1"});
  const auto meta_problems = validate_dataset(report.dataset_dir);
  CHECK(meta_problems.empty());
}

TEST_CASE("save_success_inp dumps a reloadable INP per scenario") {
  const auto model = load_si("toy3.inp");
  const auto out = fresh_dir("inpdump");
  auto run = small_run(model, out, 2);
  run.save_success_inp = true;
  const auto report = generate_dataset(run, model);
  const auto inp0 = report.dataset_dir / "inp" / "scenario_0.inp";
  REQUIRE(fs::exists(inp0));
  std::ifstream in(inp0, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dumped = parse_inp(ss.str());
  CHECK(dumped.junctions.size() == 3);
  // Multiplier patterns embedded for external cross-checking.
  CHECK(dumped.patterns.count("dm_J1") == 1);
  CHECK(dumped.patterns.at("dm_J1").size() == 24);
}

TEST_CASE("validate_dataset flags corruption") {
  const auto model = load_si("toy3.inp");
  const auto out = fresh_dir("corrupt");
  auto run = small_run(model, out, 3);
  const auto report = generate_dataset(run, model);
  REQUIRE(validate_dataset(report.dataset_dir).empty());

  SECTION("truncated shard") {
    const auto victim = report.dataset_dir / "junction_pressure_0_dynamic_output.csv";
    auto text = dir_contents(report.dataset_dir).at("junction_pressure_0_dynamic_output.csv");
    std::ofstream out2(victim, std::ios::binary | std::ios::trunc);
    out2 << text.substr(0, text.size() / 2);
    out2.close();
    const auto problems = validate_dataset(report.dataset_dir);
    REQUIRE_FALSE(problems.empty());
    bool named = false;
    for (const auto& p : problems)
      if (p.find("junction_pressure_0_dynamic_output.csv") != std::string::npos) named = true;
    CHECK(named);
  }
  SECTION("alien file name") {
    std::ofstream bad(report.dataset_dir / "junction_pressure_0_weird_output.csv");
    bad << "index,x\n0,1\n";
    bad.close();
    const auto problems = validate_dataset(report.dataset_dir);
    REQUIRE_FALSE(problems.empty());
    CHECK(problems[0].find("five-token") != std::string::npos);
  }
}

TEST_CASE("sharding splits tables at the row cap and keeps shard indices") {
  const auto model = load_si("toy3.inp");
  const auto out = fresh_dir("shard");
  auto run = small_run(model, out, 4);
  run.shard_max_rows = 50; // 4 * 24 = 96 dynamic rows -> 2 shards
  const auto report = generate_dataset(run, model);
  CHECK(fs::exists(report.dataset_dir / "junction_pressure_0_dynamic_output.csv"));
  CHECK(fs::exists(report.dataset_dir / "junction_pressure_1_dynamic_output.csv"));
  const auto t0 = read_table(report.dataset_dir / "junction_pressure_0_dynamic_output.csv");
  const auto t1 = read_table(report.dataset_dir / "junction_pressure_1_dynamic_output.csv");
  CHECK(t0.rows.size() + t1.rows.size() == 96);
}
