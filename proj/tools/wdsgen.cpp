// Command-line front end: profile networks, tune sampling configurations,
// generate datasets, validate them, and render diagnostic images.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wdsgen/hspo.hpp"
#include "wdsgen/inp_io.hpp"
#include "wdsgen/pipeline.hpp"
#include "wdsgen/plotting.hpp"
#include "wdsgen/profiler.hpp"
#include "wdsgen/run_config.hpp"
#include "wdsgen/stats.hpp"
#include "wdsgen/units.hpp"

namespace fs = std::filesystem;
using namespace wdsgen;

namespace {

NetworkModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot open INP file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto m = convert_to_si(parse_inp(ss.str()));
  m.name = fs::path(path).stem().string();
  return m;
}

// Shard-aware read of one logical table.
Table read_all_shards(const fs::path& dir, const std::string& component,
                      const std::string& parameter, const std::string& type,
                      const std::string& io) {
  Table merged;
  for (int shard = 0;; ++shard) {
    const auto p = dir / layout::file_name(component, parameter, shard, type, io);
    if (!fs::exists(p)) {
      if (shard == 0)
        throw std::runtime_error("dataset has no " + component + " " + parameter + " " + io +
                                 " table");
      break;
    }
    auto t = read_table(p);
    if (shard == 0) merged.columns = t.columns;
    merged.index.insert(merged.index.end(), t.index.begin(), t.index.end());
    for (auto& r : t.rows) merged.rows.push_back(std::move(r));
  }
  return merged;
}

YAML::Node dataset_metadata(const fs::path& dir) {
  std::ifstream in(dir / "metadata.md", std::ios::binary);
  if (!in.good()) throw std::runtime_error("dataset has no metadata.md");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_metadata_markdown(ss.str());
}

int cmd_profile(const std::string& inp, const std::string& out_path) {
  const auto model = load_model(inp);
  const auto prof = profile_network(model);
  const auto table = profile_table(prof);
  if (out_path.empty()) {
    std::cout << table;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << table;
    std::cout << "profile written to " << out_path << "\n";
  }
  return 0;
}

int cmd_optimize(const std::string& inp, const std::string& config_path, int epochs,
                 std::uint64_t seed, const std::string& out_path, int n_cases,
                 int swarm_size, int iterations) {
  const auto model = load_model(inp);
  RunConfig run;
  if (!config_path.empty()) run = load_run_config(config_path);
  if (run.sampling.entries.empty()) run.sampling = blueprint_config(profile_network(model));

  SwarmConfig swarm;
  swarm.max_epochs = epochs;
  swarm.n_cases = n_cases;
  swarm.swarm_size = swarm_size;
  swarm.max_iterations = iterations;
  swarm.workers = static_cast<unsigned>(std::max(1, run.num_cpus));

  const auto rules = RuleSet::defaults(run.pressure_range.first, run.pressure_range.second,
                                       {run.skip_names.begin(), run.skip_names.end()});
  ADGConfig adg = run.adg;
  adg.duration_h = run.duration_h;
  adg.time_step_h = run.time_step_h;
  const auto result = hspo_run(model, run.sampling, swarm, adg, rules, run.times(), seed);

  run.sampling = result.config;
  run.inp_paths = {inp};
  run.master_seed = seed;
  const auto dest = out_path.empty() ? fs::path(inp).stem().string() + "_tuned.yaml" : out_path;
  save_run_config(run, dest);
  std::cout << "tuned configuration written to " << dest << "\n";
  for (std::size_t e = 0; e < result.epoch_fitness.size(); ++e)
    std::cout << "epoch " << (e + 1) << " best composite fitness " << result.epoch_fitness[e]
              << "\n";
  return 0;
}

int cmd_generate(const std::string& inp, const std::string& config_path, int n,
                 const std::string& duration, const std::string& out_dir, std::uint64_t seed,
                 bool seed_set, int workers) {
  RunConfig run;
  if (!config_path.empty()) run = load_run_config(config_path);
  std::string inp_path = inp;
  if (inp_path.empty() && !run.inp_paths.empty()) inp_path = run.inp_paths[0];
  if (inp_path.empty()) throw std::runtime_error("no INP file: pass --inp or set inp_paths");
  const auto model = load_model(inp_path);
  if (run.sampling.entries.empty()) {
    StrategyEntry dem;
    dem.parameter = "junction_input_demand";
    dem.kind = StrategyKind::ADG;
    run.sampling.entries.push_back(dem);
  }
  if (n > 0) run.num_samples = n;
  if (!duration.empty()) {
    if (duration == "24h" || duration == "24H") run.duration_h = 24;
    else if (duration == "1y" || duration == "1Y") run.duration_h = 8760;
    else throw std::runtime_error("duration must be 24h or 1y");
  }
  if (!out_dir.empty()) run.output_path = out_dir;
  if (seed_set) run.master_seed = seed;
  if (workers > 0) run.num_cpus = workers;
  run.inp_paths = {inp_path};

  const auto report = generate_dataset(run, model);
  std::cout << "dataset written to " << report.dataset_dir.string() << "\n";
  std::cout << "accepted " << report.accepted << " of " << report.candidates
            << " candidate scenarios\n";
  for (const auto& [rule, count] : report.rejections)
    std::cout << "rejected by " << rule << ": " << count << "\n";
  return 0;
}

int cmd_validate(const std::string& dir) {
  const auto problems = validate_dataset(dir);
  if (problems.empty()) {
    std::cout << "dataset conforms: " << dir << "\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "error: " << p << "\n";
  return 1;
}

int cmd_plot(const std::string& dir_s, const std::string& what, std::string out_path) {
  const fs::path dir(dir_s);
  const auto meta = dataset_metadata(dir);
  const auto num_samples = meta["num_samples"].as<std::size_t>();
  const auto steps = static_cast<std::size_t>(
      std::llround(meta["duration"].as<double>() / meta["time_step"].as<double>()));
  if (out_path.empty()) out_path = what + ".ppm";

  if (what == "demand-corr") {
    const auto t = read_all_shards(dir, "junction", "input_demand", "dynamic", "input");
    // One flattened vector per scenario: all junction series concatenated.
    std::vector<std::vector<double>> scen(num_samples);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const auto s = static_cast<std::size_t>(t.index[r]) / steps;
      for (double v : t.rows[r]) scen[s].push_back(v);
    }
    std::vector<std::vector<double>> corr(num_samples, std::vector<double>(num_samples, 1.0));
    double off_sum = 0.0;
    std::size_t off_n = 0;
    for (std::size_t i = 0; i < num_samples; ++i)
      for (std::size_t j = i + 1; j < num_samples; ++j) {
        const double c = stats::pearson(scen[i], scen[j]);
        corr[i][j] = corr[j][i] = c;
        off_sum += c;
        ++off_n;
      }
    const double mean_off = off_n ? off_sum / static_cast<double>(off_n) : 0.0;
    plot::heatmap(corr, std::max(2, 400 / std::max<int>(1, static_cast<int>(num_samples))))
        .save_ppm(out_path);
    std::cout << "scenario demand correlation: off-diagonal mean " << mean_off << "\n";
    std::cout << "image written to " << out_path << "\n";
    return mean_off < 0.9 ? 0 : 1;
  }
  if (what == "pressure-demand") {
    const auto dem = read_all_shards(dir, "junction", "demand", "dynamic", "output");
    const auto pre = read_all_shards(dir, "junction", "pressure", "dynamic", "output");
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < dem.rows.size(); ++r)
      for (std::size_t c = 0; c < dem.rows[r].size(); ++c) {
        xs.push_back(dem.rows[r][c]);
        ys.push_back(pre.rows[r][c]);
      }
    plot::scatter(xs, ys).save_ppm(out_path);
    std::cout << "pressure-demand cloud of " << xs.size() << " points\n";
    std::cout << "image written to " << out_path << "\n";
    return 0;
  }
  if (what == "demand-ts") {
    const auto t = read_all_shards(dir, "junction", "input_demand", "dynamic", "input");
    const std::size_t show = std::min<std::size_t>(steps, 24 * 7);
    std::vector<std::vector<double>> series(std::min<std::size_t>(3, t.columns.size()));
    for (std::size_t r = 0; r < show && r < t.rows.size(); ++r)
      for (std::size_t s = 0; s < series.size(); ++s)
        series[s].push_back(t.rows[r][s]);
    plot::line_chart(series).save_ppm(out_path);
    std::cout << "demand time series of " << series.size() << " junctions over " << show
              << " steps\n";
    std::cout << "image written to " << out_path << "\n";
    return 0;
  }
  throw std::runtime_error("unknown plot kind '" + what + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario generation toolkit for water distribution networks"};
  app.require_subcommand(1);

  std::string inp, config_path, out_path, dir, what = "demand-corr", duration;
  int epochs = 10, n = 0, workers = 0;
  int n_cases = 100, swarm_size = 20, iterations = 60;
  std::uint64_t seed = 42;
  bool seed_set = false;

  auto* profile = app.add_subcommand("profile", "Print per-parameter statistics of a network");
  profile->add_option("inp", inp, "EPANET INP file")->required();
  profile->add_option("--out", out_path, "write the table to a file");

  auto* optimize = app.add_subcommand("optimize", "Tune sampling bounds with the swarm");
  optimize->add_option("inp", inp, "EPANET INP file")->required();
  optimize->add_option("--config", config_path, "run configuration YAML");
  optimize->add_option("--epochs", epochs, "optimization epochs");
  optimize->add_option("--seed", seed, "master seed");
  optimize->add_option("--out", out_path, "tuned YAML destination");
  optimize->add_option("--cases", n_cases, "simulated cases per fitness evaluation");
  optimize->add_option("--swarm", swarm_size, "particles per swarm");
  optimize->add_option("--iterations", iterations, "swarm iterations per parameter");

  auto* generate = app.add_subcommand("generate", "Generate a validated scenario dataset");
  generate->add_option("--inp", inp, "EPANET INP file (default: config inp_paths)");
  generate->add_option("--config", config_path, "run configuration YAML");
  generate->add_option("--n", n, "number of scenarios");
  generate->add_option("--duration", duration, "24h or 1y");
  generate->add_option("--out", dir, "output directory");
  generate->add_option("--seed", seed, "master seed")->each([&seed_set](const std::string&) {
    seed_set = true;
  });
  generate->add_option("--workers", workers, "simulation workers");

  auto* validate = app.add_subcommand("validate", "Re-check a written dataset");
  validate->add_option("dir", dir, "dataset directory")->required();

  auto* plot = app.add_subcommand("plot", "Render diagnostic images from a dataset");
  plot->add_option("dir", dir, "dataset directory")->required();
  plot->add_option("--what", what, "demand-corr | pressure-demand | demand-ts");
  plot->add_option("--out", out_path, "image destination (.ppm)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (profile->parsed()) return cmd_profile(inp, out_path);
    if (optimize->parsed())
      return cmd_optimize(inp, config_path, epochs, seed, out_path, n_cases, swarm_size,
                          iterations);
    if (generate->parsed())
      return cmd_generate(inp, config_path, n, duration, dir, seed, seed_set, workers);
    if (validate->parsed()) return cmd_validate(dir);
    if (plot->parsed()) return cmd_plot(dir, what, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
