#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wdsgen/adg.hpp"
#include "wdsgen/strategies.hpp"

namespace wdsgen {

inline const std::vector<std::string>& all_sim_outputs() {
  static const std::vector<std::string> v{"pressure", "demand",   "head",           "flowrate",
                                          "velocity", "headloss", "friction_factor"};
  return v;
}

// Run-level configuration: generation quotas, batching, worker sizing,
// checkpointing, rule bounds, the ADG knobs, and the per-component sampling
// plan. Serialized to YAML under the same key names the dataset metadata
// uses.
struct RunConfig {
  double duration_h = 24.0;
  double time_step_h = 1.0;
  int num_samples = 1000;
  int batch_size = 16;       // scenarios simulated per batch
  int gen_batch_size = 64;   // candidate parameter sets drawn per batch
  int num_cpus = 1;
  double mem_per_worker = 1.0; // GB
  double fractional_cpu_usage = 1.0;
  double backup_times = 10.0;  // checkpoint every this many accepted scenarios
  std::string output_path = ".";
  std::string temp_path;
  bool verbose = false;
  std::vector<std::string> sim_outputs = all_sim_outputs();
  std::vector<std::string> skip_names;
  std::pair<double, double> pressure_range{0.0, 151.0};
  bool save_success_inp = false;
  bool time_consistency = true;
  bool yield_worker_generator = true;
  std::vector<std::string> inp_paths;
  std::uint64_t master_seed = 42;
  // Quota guard: abort when the acceptance rate over the trailing window
  // falls below the floor.
  double min_acceptance_rate = 0.01;
  int acceptance_window = 1000;
  std::uint64_t shard_max_rows = 1000000;

  ADGConfig adg;
  SamplingConfig sampling;

  SimulationTimes times() const { return {duration_h, time_step_h}; }

  void check() const {
    if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
    if (duration_h != 24.0 && duration_h != 8760.0)
      throw std::invalid_argument("dataset duration must be 24h or 1y");
    for (const auto& o : sim_outputs) {
      bool known = false;
      for (const auto& k : all_sim_outputs())
        if (k == o) known = true;
      if (!known) throw std::invalid_argument("unknown sim output '" + o + "'");
    }
    sampling.check();
  }
};

inline YAML::Node run_config_to_yaml(const RunConfig& c) {
  YAML::Node n = sampling_config_to_yaml(c.sampling);
  n["duration"] = c.duration_h;
  n["time_step"] = c.time_step_h;
  n["num_samples"] = c.num_samples;
  n["batch_size"] = c.batch_size;
  n["gen_batch_size"] = c.gen_batch_size;
  n["num_cpus"] = c.num_cpus;
  n["mem_per_worker"] = c.mem_per_worker;
  n["fractional_cpu_usage"] = c.fractional_cpu_usage;
  n["backup_times"] = c.backup_times;
  n["output_path"] = c.output_path;
  n["temp_path"] = c.temp_path;
  n["ray_temp_path"] = c.temp_path; // alias kept for metadata compatibility
  n["verbose"] = c.verbose;
  n["sim_outputs"] = c.sim_outputs;
  n["skip_names"] = c.skip_names;
  n["pressure_range"].push_back(c.pressure_range.first);
  n["pressure_range"].push_back(c.pressure_range.second);
  n["save_success_inp"] = c.save_success_inp;
  n["time_consistency"] = c.time_consistency;
  n["yield_worker_generator"] = c.yield_worker_generator;
  n["inp_paths"] = c.inp_paths;
  n["master_seed"] = c.master_seed;
  n["min_acceptance_rate"] = c.min_acceptance_rate;
  n["acceptance_window"] = c.acceptance_window;
  n["shard_max_rows"] = c.shard_max_rows;
  // ADG block, flat under the metadata key names.
  n["extreme_dem_rate"] = c.adg.extreme_dem_rate;
  n["max_extreme_dem_junctions"] = c.adg.max_extreme_dem_junctions;
  n["zero_dem_rate"] = c.adg.zero_dem_rate;
  n["zero_rate_from_baseline"] = c.adg.zero_rate_from_baseline;
  n["p_commercial"].push_back(c.adg.p_commercial.first);
  n["p_commercial"].push_back(c.adg.p_commercial.second);
  n["noise_range"].push_back(c.adg.noise_range.first);
  n["noise_range"].push_back(c.adg.noise_range.second);
  n["summer_start"] = c.adg.summer_start;
  n["summer_amplitude_range"].push_back(c.adg.summer_amplitude_range.first);
  n["summer_amplitude_range"].push_back(c.adg.summer_amplitude_range.second);
  n["summer_rolling_rate"] = c.adg.summer_rolling_rate;
  n["yearly_pattern_num_harmonics"] = c.adg.yearly_harmonics;
  n["profile_household"] = std::vector<std::string>{"low", "high", "medium", "low"};
  n["profile_commercial"] = std::vector<std::string>{"high", "high", "high", "medium"};
  n["profile_extreme"] = std::vector<std::string>{"high", "high", "high", "high"};
  return n;
}

inline RunConfig run_config_from_yaml(const YAML::Node& n) {
  RunConfig c;
  c.sampling = sampling_config_from_yaml(n);
  auto get = [&n](const char* key, auto fallback) {
    using T = decltype(fallback);
    return n[key] ? n[key].as<T>() : fallback;
  };
  c.duration_h = get("duration", c.duration_h);
  c.time_step_h = get("time_step", c.time_step_h);
  c.num_samples = get("num_samples", c.num_samples);
  c.batch_size = get("batch_size", c.batch_size);
  c.gen_batch_size = get("gen_batch_size", c.gen_batch_size);
  c.num_cpus = get("num_cpus", c.num_cpus);
  c.mem_per_worker = get("mem_per_worker", c.mem_per_worker);
  c.fractional_cpu_usage = get("fractional_cpu_usage", c.fractional_cpu_usage);
  c.backup_times = get("backup_times", c.backup_times);
  c.output_path = get("output_path", c.output_path);
  c.temp_path = get("temp_path", c.temp_path);
  c.verbose = get("verbose", c.verbose);
  if (n["sim_outputs"]) c.sim_outputs = n["sim_outputs"].as<std::vector<std::string>>();
  if (n["skip_names"]) c.skip_names = n["skip_names"].as<std::vector<std::string>>();
  if (n["pressure_range"] && n["pressure_range"].size() == 2)
    c.pressure_range = {n["pressure_range"][0].as<double>(),
                        n["pressure_range"][1].as<double>()};
  c.save_success_inp = get("save_success_inp", c.save_success_inp);
  c.time_consistency = get("time_consistency", c.time_consistency);
  c.yield_worker_generator = get("yield_worker_generator", c.yield_worker_generator);
  if (n["inp_paths"]) c.inp_paths = n["inp_paths"].as<std::vector<std::string>>();
  c.master_seed = get("master_seed", c.master_seed);
  c.min_acceptance_rate = get("min_acceptance_rate", c.min_acceptance_rate);
  c.acceptance_window = get("acceptance_window", c.acceptance_window);
  c.shard_max_rows = get("shard_max_rows", c.shard_max_rows);

  c.adg.duration_h = c.duration_h;
  c.adg.time_step_h = c.time_step_h;
  c.adg.extreme_dem_rate = get("extreme_dem_rate", c.adg.extreme_dem_rate);
  c.adg.max_extreme_dem_junctions =
      get("max_extreme_dem_junctions", c.adg.max_extreme_dem_junctions);
  c.adg.zero_dem_rate = get("zero_dem_rate", c.adg.zero_dem_rate);
  c.adg.zero_rate_from_baseline = get("zero_rate_from_baseline", c.adg.zero_rate_from_baseline);
  if (n["p_commercial"] && n["p_commercial"].size() == 2)
    c.adg.p_commercial = {n["p_commercial"][0].as<double>(), n["p_commercial"][1].as<double>()};
  if (n["noise_range"] && n["noise_range"].size() == 2)
    c.adg.noise_range = {n["noise_range"][0].as<double>(), n["noise_range"][1].as<double>()};
  c.adg.summer_start = get("summer_start", c.adg.summer_start);
  if (n["summer_amplitude_range"] && n["summer_amplitude_range"].size() == 2)
    c.adg.summer_amplitude_range = {n["summer_amplitude_range"][0].as<double>(),
                                    n["summer_amplitude_range"][1].as<double>()};
  c.adg.summer_rolling_rate = get("summer_rolling_rate", c.adg.summer_rolling_rate);
  c.adg.yearly_harmonics = get("yearly_pattern_num_harmonics", c.adg.yearly_harmonics);
  return c;
}

inline void save_run_config(const RunConfig& c, const std::string& path) {
  YAML::Emitter em;
  em << run_config_to_yaml(c);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << em.c_str() << '\n';
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_yaml(YAML::LoadFile(path));
}

}  // namespace wdsgen
