#pragma once

#include <map>
#include <string>
#include <vector>

#include "wdsgen/adg.hpp"
#include "wdsgen/network.hpp"
#include "wdsgen/profiler.hpp"
#include "wdsgen/rng.hpp"
#include "wdsgen/strategies.hpp"
#include "wdsgen/terrain.hpp"

namespace wdsgen {

// One drawn scenario: the model with sampled statics applied, the demand
// multiplier series, and the raw input values recorded for the dataset.
struct ScenarioSample {
  NetworkModel model;
  std::map<std::string, std::vector<double>> demand_multipliers; // junction -> series
  ProfileAssignment assignment;
  std::map<std::string, std::vector<double>> static_inputs;  // param -> per-component
  std::map<std::string, std::vector<std::vector<double>>> series_inputs; // param -> per-component series
};

// Applies a SamplingConfig to a baseline network, one scenario per call.
// Parameters are visited in catalogue order and all draws come from the
// caller's generator, so a seed fully determines the scenario. Community
// detection runs once here and is shared across scenarios.
class ScenarioSampler {
public:
  ScenarioSampler(const NetworkModel& baseline, SamplingConfig config, ADGConfig adg,
                  NetworkProfile profile, const NetworkProfile* global = nullptr)
      : baseline_(baseline),
        config_(std::move(config)),
        adg_(adg),
        profile_(std::move(profile)),
        global_(global ? *global : NetworkProfile{}) {
    if (!baseline.si) throw InvalidModel("sampler requires an SI baseline");
    config_.check();
    communities_ = junction_communities(baseline_, adg_.louvain_gamma, adg_.louvain_threshold,
                                        derive_seed(0x636f6d6dULL, baseline_.node_count()));
  }

  const std::map<std::string, std::size_t>& communities() const { return communities_; }
  const SamplingConfig& config() const { return config_; }
  SamplingConfig& config() { return config_; }
  const ADGConfig& adg_config() const { return adg_; }

  ScenarioSample sample(Rng& rng) const {
    ScenarioSample out;
    out.model = baseline_;
    for (const auto& info : kParameterCatalog) {
      const std::string id(info.id);
      const auto* entry = config_.find(id);
      if (!entry) continue;
      apply_entry(*entry, out, rng);
    }
    // Demand multipliers: ADG unless the config says otherwise.
    const auto* demand_entry = config_.find("junction_input_demand");
    if (!baseline_.junctions.empty()) {
      if (demand_entry && demand_entry->kind == StrategyKind::ADG) {
        auto ds = generate_demands(out.model, adg_, communities_, rng);
        out.demand_multipliers = std::move(ds.series);
        out.assignment = std::move(ds.assignment);
      } else {
        const auto steps = static_cast<std::size_t>(adg_.steps());
        for (const auto& j : baseline_.junctions) {
          std::vector<double> series(steps, 1.0);
          if (demand_entry && demand_entry->kind != StrategyKind::Keep) {
            Rng& r = rng;
            std::vector<double> base(steps, 1.0);
            if (!j.demand_pattern.empty()) {
              const auto& pat = baseline_.patterns.at(j.demand_pattern);
              for (std::size_t t = 0; t < steps; ++t) base[t] = pat[t % pat.size()];
            }
            series = apply_strategy(*demand_entry, base, profile_.find("junction_input_demand"),
                                    global_.find("junction_input_demand"), r);
          } else if (!j.demand_pattern.empty()) {
            const auto& pat = baseline_.patterns.at(j.demand_pattern);
            for (std::size_t t = 0; t < steps; ++t) series[t] = pat[t % pat.size()];
          }
          out.demand_multipliers[j.name] = std::move(series);
        }
      }
      auto& rec = out.series_inputs["junction_input_demand"];
      for (const auto& j : baseline_.junctions) rec.push_back(out.demand_multipliers.at(j.name));
    }
    record_statics(out);
    return out;
  }

private:
  NetworkModel baseline_;
  SamplingConfig config_;
  ADGConfig adg_;
  NetworkProfile profile_;
  NetworkProfile global_;
  std::map<std::string, std::size_t> communities_;

  template <typename Get, typename Set, typename Range>
  void sample_field(const StrategyEntry& entry, Range& items, Get get, Set set,
                    Rng& rng) const {
    if (items.empty() || entry.kind == StrategyKind::Keep) return;
    std::vector<double> base;
    for (const auto& it : items) base.push_back(get(it));
    const auto vals = apply_strategy(entry, base, profile_.find(entry.parameter),
                                     global_.find(entry.parameter), rng);
    const auto [lo, hi] = physical_range(entry.parameter);
    for (std::size_t i = 0; i < items.size(); ++i)
      set(items[i], std::clamp(vals[i], lo, hi));
  }

  void apply_entry(const StrategyEntry& entry, ScenarioSample& out, Rng& rng) const {
    auto& m = out.model;
    const std::string& id = entry.parameter;
    if (id == "junction_input_demand") return; // handled by the demand stage

    if (id == "junction_elevation" && entry.kind == StrategyKind::Terrain) {
      if (m.junctions.empty()) return;
      std::vector<std::string> names;
      for (const auto& j : m.junctions) names.push_back(j.name);
      const auto [lo, hi] = physical_range(id);
      const std::pair<double, double> bounds{lo + entry.lb * (hi - lo),
                                             lo + entry.ub * (hi - lo)};
      const auto elev = terrain_elevations(m.coordinates, names, entry.terrain_grid_exponent,
                                           bounds, entry.terrain_roughness, bounds, rng);
      for (auto& j : m.junctions) j.elevation = elev.at(j.name);
      return;
    }

    if (entry.kind == StrategyKind::Keep) return;

    if (id == "junction_elevation")
      sample_field(entry, m.junctions, [](const Junction& j) { return j.elevation; },
                   [](Junction& j, double v) { j.elevation = v; }, rng);
    else if (id == "junction_base_demand")
      sample_field(entry, m.junctions, [](const Junction& j) { return j.base_demand; },
                   [](Junction& j, double v) { j.base_demand = v; }, rng);
    else if (id == "reservoir_base_head")
      sample_field(entry, m.reservoirs, [](const Reservoir& r) { return r.base_head; },
                   [](Reservoir& r, double v) { r.base_head = v; }, rng);
    else if (id == "tank_elevation")
      sample_field(entry, m.tanks, [](const Tank& t) { return t.elevation; },
                   [](Tank& t, double v) { t.elevation = v; }, rng);
    else if (id == "tank_diameter")
      sample_field(entry, m.tanks, [](const Tank& t) { return t.diameter; },
                   [](Tank& t, double v) { t.diameter = v; }, rng);
    else if (id == "tank_initial_level")
      sample_field(entry, m.tanks, [](const Tank& t) { return t.init_level; },
                   [](Tank& t, double v) { t.init_level = std::clamp(v, t.min_level, t.max_level); },
                   rng);
    else if (id == "tank_min_volume")
      sample_field(entry, m.tanks, [](const Tank& t) { return t.min_volume; },
                   [](Tank& t, double v) { t.min_volume = v; }, rng);
    else if (id == "pipe_diameter")
      sample_field(entry, m.pipes, [](const Pipe& p) { return p.diameter; },
                   [](Pipe& p, double v) { p.diameter = v; }, rng);
    else if (id == "pipe_length")
      sample_field(entry, m.pipes, [](const Pipe& p) { return p.length; },
                   [](Pipe& p, double v) { p.length = v; }, rng);
    else if (id == "pipe_roughness")
      sample_field(entry, m.pipes, [](const Pipe& p) { return p.roughness; },
                   [](Pipe& p, double v) { p.roughness = std::max(v, 1e-6); }, rng);
    else if (id == "pipe_minor_loss")
      sample_field(entry, m.pipes, [](const Pipe& p) { return p.minor_loss; },
                   [](Pipe& p, double v) { p.minor_loss = std::max(v, 0.0); }, rng);
    else if (id == "head_pump_base_speed" || id == "power_pump_base_speed") {
      const bool head = id[0] == 'h';
      for (auto& p : m.pumps) {
        if ((p.kind == PumpKind::Head) != head) continue;
        std::vector<Pump*> one{&p};
        std::vector<double> base{p.base_speed};
        const auto vals = apply_strategy(entry, base, profile_.find(id), global_.find(id), rng);
        p.base_speed = std::max(vals[0], 0.1);
      }
    } else if (id == "power_pump_power") {
      for (auto& p : m.pumps) {
        if (p.kind != PumpKind::Power) continue;
        std::vector<double> base{p.power_kw};
        const auto vals = apply_strategy(entry, base, profile_.find(id), global_.find(id), rng);
        p.power_kw = std::max(vals[0], 0.0);
      }
    } else if (id.size() > 16 && id.substr(3) == "_initial_setting") {
      const auto kind = id.substr(0, 3) == "prv"   ? ValveKind::PRV
                        : id.substr(0, 3) == "psv" ? ValveKind::PSV
                        : id.substr(0, 3) == "fcv" ? ValveKind::FCV
                                                   : ValveKind::TCV;
      for (auto& v : m.valves) {
        if (v.kind != kind) continue;
        std::vector<double> base{v.setting};
        const auto vals = apply_strategy(entry, base, profile_.find(id), global_.find(id), rng);
        v.setting = std::max(vals[0], 0.0);
      }
    }
    // Statuses, curves, and remaining series parameters stay at Keep.
  }

  void record_statics(ScenarioSample& out) const {
    const auto& m = out.model;
    auto rec = [&out](const std::string& id, std::vector<double> vals) {
      if (!vals.empty()) out.static_inputs[id] = std::move(vals);
    };
    std::vector<double> v;
    auto collect = [&v](auto const& items, auto get) {
      v.clear();
      for (const auto& it : items) v.push_back(get(it));
      return v;
    };
    rec("junction_elevation",
        collect(m.junctions, [](const Junction& j) { return j.elevation; }));
    rec("junction_base_demand",
        collect(m.junctions, [](const Junction& j) { return j.base_demand; }));
    rec("reservoir_base_head",
        collect(m.reservoirs, [](const Reservoir& r) { return r.base_head; }));
    rec("tank_elevation", collect(m.tanks, [](const Tank& t) { return t.elevation; }));
    rec("tank_diameter", collect(m.tanks, [](const Tank& t) { return t.diameter; }));
    rec("tank_initial_level", collect(m.tanks, [](const Tank& t) { return t.init_level; }));
    rec("tank_min_volume", collect(m.tanks, [](const Tank& t) { return t.min_volume; }));
    rec("pipe_diameter", collect(m.pipes, [](const Pipe& p) { return p.diameter; }));
    rec("pipe_length", collect(m.pipes, [](const Pipe& p) { return p.length; }));
    rec("pipe_roughness", collect(m.pipes, [](const Pipe& p) { return p.roughness; }));
    rec("pipe_minor_loss", collect(m.pipes, [](const Pipe& p) { return p.minor_loss; }));
  }
};

}  // namespace wdsgen
