#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wdsgen/hspo.hpp"
#include "wdsgen/inp_io.hpp"
#include "wdsgen/layout.hpp"
#include "wdsgen/metadata.hpp"
#include "wdsgen/parallel.hpp"
#include "wdsgen/run_config.hpp"
#include "wdsgen/sampler.hpp"
#include "wdsgen/simulate.hpp"
#include "wdsgen/table_io.hpp"

namespace wdsgen {

struct QuotaUnreachable : std::runtime_error {
  explicit QuotaUnreachable(const std::string& msg, std::string rule)
      : std::runtime_error(msg), dominant_rule(std::move(rule)) {}
  std::string dominant_rule;
};

struct InterruptedRun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct TableKey {
  std::string component, parameter, type, io;
  auto operator<=>(const TableKey&) const = default;
};

}  // namespace detail

// Streams accepted scenarios into the columnar dataset layout: one table per
// (component, parameter, type, io), sharded at shard_max_rows, columns being
// component names with skip_names (and their adjacent links) removed. Rows
// buffer in memory and reach disk on flush(), which the checkpoint cadence
// controls.
class DatasetWriter {
public:
  DatasetWriter(std::filesystem::path dir, const NetworkModel& model, const RunConfig& run)
      : dir_(std::move(dir)), shard_max_rows_(run.shard_max_rows) {
    std::filesystem::create_directories(dir_);
    const std::set<std::string> skip(run.skip_names.begin(), run.skip_names.end());
    std::set<std::string> skip_links;
    for (const auto& [src, link, dst] : model.adjacency())
      if (skip.count(src) || skip.count(dst)) skip_links.insert(link);

    auto filtered = [&](const std::vector<std::string>& names, bool links) {
      std::vector<std::string> out;
      for (const auto& n : names)
        if (!(links ? skip_links.count(n) : skip.count(n))) out.push_back(n);
      return out;
    };
    auto names_of = [](const auto& items) {
      std::vector<std::string> v;
      for (const auto& it : items) v.push_back(it.name);
      return v;
    };

    columns_["junction"] = filtered(names_of(model.junctions), false);
    columns_["reservoir"] = filtered(names_of(model.reservoirs), false);
    columns_["tank"] = filtered(names_of(model.tanks), false);
    columns_["pipe"] = filtered(names_of(model.pipes), true);
    for (const auto& p : model.pumps)
      columns_[p.kind == PumpKind::Head ? "head_pump" : "power_pump"].push_back(p.name);
    for (const auto& v : model.valves) {
      const char* comp = v.kind == ValveKind::PRV   ? "prv"
                         : v.kind == ValveKind::PSV ? "psv"
                         : v.kind == ValveKind::FCV ? "fcv"
                                                    : "tcv";
      if (valve_supported_for_simulation(v.kind) && !skip_links.count(v.name))
        columns_[comp].push_back(v.name);
    }

    // Column index maps for scenario consumption.
    for (std::size_t i = 0; i < model.junctions.size(); ++i)
      node_slot_[model.junctions[i].name] = i;
    for (std::size_t i = 0; i < model.reservoirs.size(); ++i)
      node_slot_[model.reservoirs[i].name] = model.junctions.size() + i;
    for (std::size_t i = 0; i < model.tanks.size(); ++i)
      node_slot_[model.tanks[i].name] = model.junctions.size() + model.reservoirs.size() + i;
    const auto adj = model.adjacency();
    for (std::size_t i = 0; i < adj.size(); ++i) link_slot_[adj[i][1]] = i;

    for (const auto& o : run.sim_outputs) {
      const bool node_output = o == "pressure" || o == "demand" || o == "head";
      for (const auto& [comp, cols] : columns_) {
        if (cols.empty()) continue;
        const bool is_node = comp == "junction" || comp == "reservoir" || comp == "tank";
        if (is_node == node_output)
          output_keys_.push_back({comp, o, "dynamic", "output"});
      }
    }
  }

  const std::filesystem::path& dir() const { return dir_; }

  // Append one accepted scenario (inputs + the seven outputs).
  void write_scenario(long long scenario_index, const ScenarioSample& sample,
                      const ScenarioResult& result, int steps) {
    for (const auto& [param, values] : sample.static_inputs) {
      const auto& info = parameter_info(param);
      const detail::TableKey key{std::string(info.component), parameter_token(param),
                                 "static", "input"};
      append(key, scenario_index, project(values, std::string(info.component), sample));
    }
    for (const auto& [param, series] : sample.series_inputs) {
      const auto& info = parameter_info(param);
      const detail::TableKey key{std::string(info.component), parameter_token(param),
                                 "dynamic", "input"};
      // Series vectors follow model component order; keep only the
      // non-skipped columns.
      const auto kept = ordered_components(key.component, sample);
      for (int t = 0; t < steps; ++t) {
        std::vector<double> row;
        row.reserve(kept.size());
        for (const auto& [name, slot] : kept)
          row.push_back(series[slot][static_cast<std::size_t>(t)]);
        append(key, scenario_index * steps + t, row);
      }
    }
    for (const auto& key : output_keys_) {
      const auto& cols = columns_.at(key.component);
      const bool node_output = key.parameter == "pressure" || key.parameter == "demand" ||
                               key.parameter == "head";
      for (int t = 0; t < steps; ++t) {
        const auto& snap = result.snapshots[static_cast<std::size_t>(t)];
        std::vector<double> row;
        row.reserve(cols.size());
        for (const auto& name : cols) {
          if (node_output) {
            const std::size_t i = node_slot_.at(name);
            row.push_back(key.parameter == "pressure" ? snap.node_pressure[i]
                          : key.parameter == "demand" ? snap.node_demand[i]
                                                      : snap.node_head[i]);
          } else {
            const std::size_t i = link_slot_.at(name);
            row.push_back(key.parameter == "flowrate"   ? snap.link_flow[i]
                          : key.parameter == "velocity" ? snap.link_velocity[i]
                          : key.parameter == "headloss" ? snap.link_headloss[i]
                                                        : snap.link_friction[i]);
          }
        }
        append(key, scenario_index * steps + t, row);
      }
    }
  }

  void flush() {
    for (auto& [key, st] : writers_) st.writer.flush();
  }

  YAML::Node checkpoint_state() const {
    YAML::Node tables(YAML::NodeType::Sequence);
    for (const auto& [key, st] : writers_) {
      YAML::Node t;
      t["component"] = key.component;
      t["parameter"] = key.parameter;
      t["type"] = key.type;
      t["io"] = key.io;
      t["shard"] = st.shard;
      t["bytes"] = st.writer.flushed_bytes();
      t["rows_in_shard"] = st.writer.flushed_rows();
      tables.push_back(t);
    }
    return tables;
  }

  void restore_from_checkpoint(const YAML::Node& tables) {
    for (const auto& t : tables) {
      const detail::TableKey key{t["component"].as<std::string>(),
                                 t["parameter"].as<std::string>(), t["type"].as<std::string>(),
                                 t["io"].as<std::string>()};
      const int shard = t["shard"].as<int>();
      auto& st = writers_[key];
      st.shard = shard;
      // Drop any shards written after the checkpointed one.
      for (int s = shard + 1;; ++s) {
        const auto p = dir_ / layout::file_name(key.component, key.parameter, s, key.type, key.io);
        if (!std::filesystem::exists(p)) break;
        std::filesystem::remove(p);
      }
      st.writer = TableWriter::resume(
          dir_ / layout::file_name(key.component, key.parameter, shard, key.type, key.io),
          columns_.at(key.component), t["bytes"].as<std::uint64_t>(),
          t["rows_in_shard"].as<std::uint64_t>());
    }
  }

  std::uint64_t total_flushed_bytes() const {
    std::uint64_t b = 0;
    for (const auto& [key, st] : writers_) b += st.writer.flushed_bytes();
    return b;
  }

private:
  struct TableState {
    TableWriter writer;
    int shard = 0;
  };

  static std::string parameter_token(const std::string& param_id) {
    const auto& info = parameter_info(param_id);
    return param_id.substr(std::string(info.component).size() + 1);
  }

  // (name, model-order slot) pairs of the non-skipped components of a class.
  std::vector<std::pair<std::string, std::size_t>> ordered_components(
      const std::string& component, const ScenarioSample& sample) const {
    std::vector<std::pair<std::string, std::size_t>> out;
    const auto& cols = columns_.at(component);
    if (component == "junction") {
      std::map<std::string, std::size_t> order;
      for (std::size_t i = 0; i < sample.model.junctions.size(); ++i)
        order[sample.model.junctions[i].name] = i;
      for (const auto& c : cols) out.emplace_back(c, order.at(c));
    }
    return out;
  }

  // Filter a full per-component vector down to the kept columns.
  std::vector<double> project(const std::vector<double>& values, const std::string& component,
                              const ScenarioSample& sample) const {
    const auto& cols = columns_.at(component);
    std::vector<std::string> all;
    const auto& m = sample.model;
    if (component == "junction")
      for (const auto& j : m.junctions) all.push_back(j.name);
    else if (component == "reservoir")
      for (const auto& r : m.reservoirs) all.push_back(r.name);
    else if (component == "tank")
      for (const auto& t : m.tanks) all.push_back(t.name);
    else if (component == "pipe")
      for (const auto& p : m.pipes) all.push_back(p.name);
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < all.size(); ++i) slot[all[i]] = i;
    std::vector<double> out;
    out.reserve(cols.size());
    for (const auto& c : cols) out.push_back(values[slot.at(c)]);
    return out;
  }

  void ensure_table(const detail::TableKey& key) {
    if (writers_.count(key)) return;
    auto& st = writers_[key];
    st.shard = 0;
    st.writer = TableWriter(
        dir_ / layout::file_name(key.component, key.parameter, 0, key.type, key.io),
        columns_.at(key.component));
  }

  void append(const detail::TableKey& key, long long index, std::span<const double> row) {
    ensure_table(key);
    auto& st = writers_.at(key);
    if (st.writer.row_count() >= shard_max_rows_) {
      st.writer.flush();
      ++st.shard;
      st.writer = TableWriter(
          dir_ / layout::file_name(key.component, key.parameter, st.shard, key.type, key.io),
          columns_.at(key.component));
    }
    st.writer.append_row(index, row);
  }

  std::filesystem::path dir_;
  std::uint64_t shard_max_rows_;
  std::map<std::string, std::vector<std::string>> columns_;
  std::map<std::string, std::size_t> node_slot_;
  std::map<std::string, std::size_t> link_slot_;
  std::vector<detail::TableKey> output_keys_;
  std::map<detail::TableKey, TableState> writers_;
};

struct GenerateOptions {
  // Called after each accepted scenario; returning false aborts the run the
  // way a crash would (unflushed rows are lost, the checkpoint survives).
  std::function<bool(std::size_t accepted)> after_accept;
};

struct GenerateReport {
  std::filesystem::path dataset_dir;
  std::size_t accepted = 0;
  std::size_t candidates = 0;
  std::map<std::string, std::size_t> rejections;
  bool resumed = false;
};

namespace detail {

inline void write_checkpoint_atomic(const std::filesystem::path& path, const YAML::Node& n) {
  YAML::Emitter em;
  em << n;
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << em.c_str() << '\n';
    out.flush();
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

// Produce exactly num_samples validated scenarios. Candidates are drawn in
// deterministic per-candidate seed streams (derive_seed(master, candidate)),
// simulated on the worker pool in gen_batch_size batches, consumed in
// candidate order, and written incrementally. Every backup_times accepted
// scenarios the writer flushes and a checkpoint records the candidate
// cursor, the accepted indices (index_tracers), and per-table byte offsets,
// so an interrupted run resumes into a bitwise-identical dataset.
inline GenerateReport generate_dataset(const RunConfig& run, const NetworkModel& model,
                                       const GenerateOptions& options = {}) {
  run.check();
  if (!model.si) throw InvalidModel("generate_dataset requires an SI model");
  const auto times = run.times();
  const int steps = times.steps();

  const std::string network = model.name.empty() ? "network" : model.name;
  const auto out_root = std::filesystem::path(run.output_path);
  std::filesystem::create_directories(out_root);
  const auto pending =
      out_root / (network + "_pending_" + layout::duration_token(run.duration_h));
  const auto checkpoint_path = pending / "checkpoint.yaml";

  if (std::filesystem::exists(pending) && !std::filesystem::exists(checkpoint_path))
    std::filesystem::remove_all(pending); // stale run that never checkpointed

  ADGConfig adg = run.adg;
  adg.duration_h = run.duration_h;
  adg.time_step_h = run.time_step_h;
  ScenarioSampler sampler(model, run.sampling, adg, profile_network(model));
  const std::set<std::string> skip(run.skip_names.begin(), run.skip_names.end());
  const auto rules =
      RuleSet::defaults(run.pressure_range.first, run.pressure_range.second, skip);

  DatasetWriter writer(pending, model, run);
  GenerateReport report;
  std::vector<long long> tracers;
  std::size_t accepted = 0;
  long long next_candidate = 0;

  if (std::filesystem::exists(checkpoint_path)) {
    const auto ck = YAML::LoadFile(checkpoint_path.string());
    accepted = ck["accepted"].as<std::size_t>();
    next_candidate = ck["next_candidate"].as<long long>();
    tracers = ck["index_tracers"].as<std::vector<long long>>();
    writer.restore_from_checkpoint(ck["tables"]);
    report.resumed = true;
  }

  const auto backup_every = static_cast<std::size_t>(std::max(1.0, run.backup_times));
  auto checkpoint = [&] {
    writer.flush();
    YAML::Node ck;
    ck["accepted"] = accepted;
    ck["next_candidate"] = next_candidate;
    ck["index_tracers"] = tracers;
    ck["tables"] = writer.checkpoint_state();
    detail::write_checkpoint_atomic(checkpoint_path, ck);
  };

  struct Slot {
    ScenarioSample sample;
    ScenarioResult result;
    bool ok = false;
    std::string reason;
  };

  std::size_t window_candidates = 0, window_accepts = 0;
  const auto batch = static_cast<std::size_t>(std::max(1, run.gen_batch_size));
  std::vector<Slot> slots(batch);

  while (accepted < static_cast<std::size_t>(run.num_samples)) {
    const long long base = next_candidate;
    const std::size_t todo = batch;
    parallel_for(todo, static_cast<unsigned>(std::max(1, run.num_cpus)), [&](std::size_t k) {
      auto& slot = slots[k];
      slot = Slot{};
      Rng rng(derive_seed(run.master_seed, static_cast<std::uint64_t>(base + static_cast<long long>(k))));
      try {
        slot.sample = sampler.sample(rng);
        ScenarioInputs in;
        in.times = times;
        in.demand_multipliers = slot.sample.demand_multipliers;
        slot.result = simulate_scenario(slot.sample.model, in, rules);
        slot.ok = slot.result.valid;
        slot.reason = slot.result.failure_reason;
      } catch (const std::runtime_error& e) {
        slot.ok = false;
        slot.reason = "solver_error";
      }
    });

    for (std::size_t k = 0; k < todo && accepted < static_cast<std::size_t>(run.num_samples);
         ++k) {
      ++next_candidate;
      ++report.candidates;
      ++window_candidates;
      auto& slot = slots[k];
      if (!slot.ok) {
        ++report.rejections[slot.reason.empty() ? "unknown" : slot.reason];
        if (window_candidates >= static_cast<std::size_t>(run.acceptance_window)) {
          const double rate =
              static_cast<double>(window_accepts) / static_cast<double>(window_candidates);
          if (rate < run.min_acceptance_rate) {
            std::string dominant = "unknown";
            std::size_t worst = 0;
            for (const auto& [r, cnt] : report.rejections)
              if (cnt > worst) {
                worst = cnt;
                dominant = r;
              }
            throw QuotaUnreachable("acceptance rate " + std::to_string(rate) +
                                       " below floor; dominant failing rule: " + dominant,
                                   dominant);
          }
          window_candidates = window_accepts = 0;
        }
        continue;
      }
      ++window_accepts;
      writer.write_scenario(static_cast<long long>(accepted), slot.sample, slot.result, steps);
      tracers.push_back(next_candidate - 1);
      ++accepted;
      if (run.save_success_inp) {
        const auto inp_dir = pending / "inp";
        std::filesystem::create_directories(inp_dir);
        auto dump = slot.sample.model;
        for (const auto& [jname, series] : slot.sample.demand_multipliers) {
          const std::string pat = "dm_" + jname;
          dump.patterns[pat] = series;
          for (auto& j : dump.junctions)
            if (j.name == jname) j.demand_pattern = pat;
        }
        std::ofstream out(inp_dir / ("scenario_" + std::to_string(accepted - 1) + ".inp"),
                          std::ios::binary | std::ios::trunc);
        out << serialize_inp(dump);
      }
      if (accepted % backup_every == 0) checkpoint();
      if (options.after_accept && !options.after_accept(accepted))
        throw InterruptedRun("generation interrupted after " + std::to_string(accepted) +
                             " accepted scenarios");
    }
  }

  writer.flush();
  std::filesystem::remove(checkpoint_path);

  // Metadata, then the capacity-stamped final folder name.
  const auto meta = build_metadata(run, model, tracers);
  {
    std::ofstream out(pending / "metadata.md", std::ios::binary | std::ios::trunc);
    out << write_metadata_markdown(meta, network);
  }
  std::uint64_t bytes = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(pending))
    if (e.is_regular_file()) bytes += e.file_size();
  const int capacity_gb = static_cast<int>(std::max<std::uint64_t>(
      1, (bytes + 1000000000ull - 1) / 1000000000ull));
  const auto final_dir = out_root / layout::folder_name(network, capacity_gb, run.duration_h);
  if (std::filesystem::exists(final_dir)) std::filesystem::remove_all(final_dir);
  std::filesystem::rename(pending, final_dir);

  report.dataset_dir = final_dir;
  report.accepted = accepted;
  return report;
}

// Re-check a written dataset: folder and file name grammar, table shapes
// against the dimension formulas, value sanity, and junction pressures
// against the recorded rule band. Returns human-readable problems; empty
// means the dataset conforms.
inline std::vector<std::string> validate_dataset(const std::filesystem::path& dir) {
  std::vector<std::string> problems;
  if (!std::filesystem::is_directory(dir)) {
    problems.push_back("not a directory: " + dir.string());
    return problems;
  }
  const auto folder = layout::parse_folder_name(dir.filename().string());
  if (!folder) problems.push_back("folder name violates <network>_<capacity>_<duration>: " +
                                  dir.filename().string());

  const auto meta_path = dir / "metadata.md";
  YAML::Node meta;
  std::size_t num_samples = 0;
  std::size_t steps = 0;
  std::pair<double, double> pressure_range{0.0, 151.0};
  std::set<std::string> junction_cols;
  if (!std::filesystem::exists(meta_path)) {
    problems.push_back("missing metadata.md");
  } else {
    std::ifstream in(meta_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      meta = parse_metadata_markdown(ss.str());
      num_samples = meta["num_samples"].as<std::size_t>();
      const double duration = meta["duration"].as<double>();
      const double step = meta["time_step"].as<double>();
      steps = static_cast<std::size_t>(std::llround(duration / step));
      if (meta["pressure_range"] && meta["pressure_range"].size() == 2)
        pressure_range = {meta["pressure_range"][0].as<double>(),
                          meta["pressure_range"][1].as<double>()};
      if (meta["onames"] && meta["onames"]["junction"])
        for (const auto& n : meta["onames"]["junction"])
          junction_cols.insert(n.as<std::string>());
    } catch (const std::exception& e) {
      problems.push_back(std::string("metadata unreadable: ") + e.what());
    }
  }

  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "metadata.md" || name == "checkpoint.yaml") continue;
    if (entry.path().extension() != ".csv") continue;
    const auto parsed = layout::parse_file_name(name);
    if (!parsed) {
      problems.push_back("file name violates the five-token grammar: " + name);
      continue;
    }
    Table t;
    try {
      t = read_table(entry.path());
    } catch (const std::exception& e) {
      problems.push_back(name + ": " + e.what());
      continue;
    }
    if (num_samples > 0 && steps > 0) {
      const auto expected = layout::expected_rows(parsed->type, num_samples, steps, 0);
      if (parsed->type != "curve" && t.rows.size() != expected)
        problems.push_back(name + ": expected " + std::to_string(expected) + " rows, found " +
                           std::to_string(t.rows.size()));
    }
    for (const auto& row : t.rows)
      for (double v : row)
        if (!std::isfinite(v)) {
          problems.push_back(name + ": non-finite value");
          goto next_file;
        }
    if (parsed->component == "junction" && parsed->parameter == "pressure" &&
        parsed->io == "output") {
      for (const auto& row : t.rows)
        for (double v : row)
          if (!(v > pressure_range.first) || !(v <= pressure_range.second)) {
            problems.push_back(name + ": pressure " + std::to_string(v) +
                               " outside rule band");
            goto next_file;
          }
    }
  next_file:;
  }
  return problems;
}

}  // namespace wdsgen
