#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wdsgen/parameters.hpp"
#include "wdsgen/profiler.hpp"
#include "wdsgen/rng.hpp"

namespace wdsgen {

struct IllegalStrategyForParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingStats : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StrategyKind {
  Keep,
  Series,
  Sampling,
  Perturbation,
  Factor,
  Substitute,
  Terrain,
  ADG
};

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Keep: return "keep";
    case StrategyKind::Series: return "series";
    case StrategyKind::Sampling: return "sampling";
    case StrategyKind::Perturbation: return "perturbation";
    case StrategyKind::Factor: return "factor";
    case StrategyKind::Substitute: return "substitute";
    case StrategyKind::Terrain: return "terrain";
    case StrategyKind::ADG: return "adg";
  }
  return "keep";
}

inline StrategyKind strategy_from_name(const std::string& s) {
  if (s == "keep") return StrategyKind::Keep;
  if (s == "series") return StrategyKind::Series;
  if (s == "sampling") return StrategyKind::Sampling;
  if (s == "perturbation") return StrategyKind::Perturbation;
  if (s == "factor") return StrategyKind::Factor;
  if (s == "substitute") return StrategyKind::Substitute;
  if (s == "terrain") return StrategyKind::Terrain;
  if (s == "adg") return StrategyKind::ADG;
  throw std::invalid_argument("unknown strategy name '" + s + "'");
}

// One (parameter, strategy, bounds) triple. Bounds are stored normalized to
// [0,1] against the parameter's global physical range (parameters.hpp), so
// the optimizer always works on the unit square.
struct StrategyEntry {
  std::string parameter;
  StrategyKind kind = StrategyKind::Keep;
  double lb = 0.0;
  double ub = 1.0;
  std::vector<double> series;          // Series payload
  double factor_bias = 0.0;            // Factor: constant bias
  double substitute_noise = 0.02;      // Substitute: +/- relative noise
  // Terrain knobs (junction elevation only).
  int terrain_grid_exponent = 7;
  double terrain_roughness = 0.5;

  void check() const {
    if (!(lb <= ub)) throw std::invalid_argument("entry " + parameter + ": lb > ub");
    if (kind == StrategyKind::Terrain && parameter != "junction_elevation")
      throw IllegalStrategyForParameter("terrain is only legal for junction_elevation");
    if (kind == StrategyKind::ADG && parameter != "junction_input_demand")
      throw IllegalStrategyForParameter("adg is only legal for junction_input_demand");
    parameter_info(parameter); // throws on unknown id
  }
};

// The per-parameter sampling plan: the optimizer's D x 2 bound matrix plus
// strategy tags.
struct SamplingConfig {
  std::vector<StrategyEntry> entries;

  const StrategyEntry* find(const std::string& parameter) const {
    for (const auto& e : entries)
      if (e.parameter == parameter) return &e;
    return nullptr;
  }
  StrategyEntry* find(const std::string& parameter) {
    for (auto& e : entries)
      if (e.parameter == parameter) return &e;
    return nullptr;
  }
  void check() const {
    for (const auto& e : entries) e.check();
  }
};

// Default blueprint: adg for junction input demand, terrain for junction
// elevation, factor for pipe diameter, keep for everything else present in
// the model.
inline SamplingConfig blueprint_config(const NetworkProfile& profile) {
  SamplingConfig cfg;
  for (const auto& [id, st] : profile.parameters) {
    StrategyEntry e;
    e.parameter = id;
    if (id == "junction_input_demand") {
      e.kind = StrategyKind::ADG;
    } else if (id == "junction_elevation") {
      e.kind = StrategyKind::Terrain;
      e.lb = std::clamp(normalize(id, st.min), 0.0, 1.0);
      e.ub = std::clamp(normalize(id, std::max(st.max, st.min + 1.0)), e.lb, 1.0);
    } else if (id == "pipe_diameter") {
      e.kind = StrategyKind::Factor;
      e.lb = 0.4; // scale 0.8
      e.ub = 0.6; // scale 1.2
    } else {
      e.kind = StrategyKind::Keep;
    }
    cfg.entries.push_back(std::move(e));
  }
  if (!cfg.find("junction_input_demand")) {
    StrategyEntry e;
    e.parameter = "junction_input_demand";
    e.kind = StrategyKind::ADG;
    cfg.entries.push_back(std::move(e));
  }
  cfg.check();
  return cfg;
}

namespace detail {
// Factor's scale is denormalized against [0, 2]: normalized 0.5 is the
// identity scale 1.
inline double denorm_factor_scale(double x) { return 2.0 * x; }
}  // namespace detail

// Produce per-component values for one parameter of one scenario.
//   Keep          baseline verbatim
//   Series        configured series copied to every component slot
//   Sampling      iid uniform in the denormalized [lb, ub] per value
//   Perturbation  Gaussian with baseline mean/std, GLOBAL stats fallback,
//                 clipped to the physical range
//   Factor        scale*baseline + bias, one (scale, bias) per scenario
//   Substitute    one random donor value shared by all, small noise on top
// Terrain and ADG have dedicated generators and are rejected here.
inline std::vector<double> apply_strategy(const StrategyEntry& entry,
                                          std::span<const double> baseline,
                                          const ParameterStats* stats,
                                          const ParameterStats* global_stats,
                                          Rng& rng) {
  entry.check();
  const auto n = baseline.size();
  std::vector<double> out;
  out.reserve(n);
  switch (entry.kind) {
    case StrategyKind::Keep:
      out.assign(baseline.begin(), baseline.end());
      return out;
    case StrategyKind::Series: {
      if (entry.series.empty())
        throw MissingStats("series strategy for " + entry.parameter + " has no series");
      for (std::size_t i = 0; i < n; ++i) out.push_back(entry.series[i % entry.series.size()]);
      return out;
    }
    case StrategyKind::Sampling: {
      const double lo = denormalize(entry.parameter, entry.lb);
      const double hi = denormalize(entry.parameter, entry.ub);
      for (std::size_t i = 0; i < n; ++i) out.push_back(rng.uniform(lo, hi));
      return out;
    }
    case StrategyKind::Perturbation: {
      const ParameterStats* s = stats && stats->component_count > 0 ? stats : global_stats;
      if (!s) throw MissingStats("no stats for perturbation of " + entry.parameter);
      const auto [plo, phi] = physical_range(entry.parameter);
      for (std::size_t i = 0; i < n; ++i)
        out.push_back(std::clamp(rng.normal(s->mean, s->std), plo, phi));
      return out;
    }
    case StrategyKind::Factor: {
      const double scale = detail::denorm_factor_scale(rng.uniform(entry.lb, entry.ub));
      for (double b : baseline) out.push_back(scale * b + entry.factor_bias);
      return out;
    }
    case StrategyKind::Substitute: {
      if (baseline.empty()) return out;
      const auto pick = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(baseline.size()) - 1));
      const double donor = baseline[pick];
      for (std::size_t i = 0; i < n; ++i)
        out.push_back(donor * rng.uniform(1.0 - entry.substitute_noise,
                                          1.0 + entry.substitute_noise));
      return out;
    }
    case StrategyKind::Terrain:
    case StrategyKind::ADG:
      throw IllegalStrategyForParameter(
          std::string(strategy_name(entry.kind)) +
          " is generated by its dedicated op, not apply_strategy");
  }
  return out;
}

// --- YAML round-trip -------------------------------------------------------
// Entries group under per-component `<component>_tune` maps:
//   junction_tune: { elevation: {strategy: terrain, lb: 0, ub: 0.3}, ... }

inline YAML::Node sampling_config_to_yaml(const SamplingConfig& cfg) {
  YAML::Node root;
  for (const auto& e : cfg.entries) {
    const auto& info = parameter_info(e.parameter);
    const std::string tune = std::string(info.component) + "_tune";
    const std::string key =
        e.parameter.substr(std::string(info.component).size() + 1);
    YAML::Node node;
    node["strategy"] = strategy_name(e.kind);
    node["lb"] = e.lb;
    node["ub"] = e.ub;
    if (!e.series.empty()) node["series"] = e.series;
    if (e.kind == StrategyKind::Factor && e.factor_bias != 0.0)
      node["bias"] = e.factor_bias;
    if (e.kind == StrategyKind::Substitute && e.substitute_noise != 0.02)
      node["noise"] = e.substitute_noise;
    if (e.kind == StrategyKind::Terrain) {
      node["grid_exponent"] = e.terrain_grid_exponent;
      node["roughness"] = e.terrain_roughness;
    }
    root[tune][key] = node;
  }
  return root;
}

inline SamplingConfig sampling_config_from_yaml(const YAML::Node& root) {
  SamplingConfig cfg;
  for (const auto& p : kParameterCatalog) {
    const std::string tune = std::string(p.component) + "_tune";
    if (!root[tune]) continue;
    const std::string key = std::string(p.id).substr(p.component.size() + 1);
    const auto node = root[tune][key];
    if (!node) continue;
    StrategyEntry e;
    e.parameter = std::string(p.id);
    e.kind = strategy_from_name(node["strategy"].as<std::string>("keep"));
    e.lb = node["lb"].as<double>(0.0);
    e.ub = node["ub"].as<double>(1.0);
    if (node["series"]) e.series = node["series"].as<std::vector<double>>();
    if (node["bias"]) e.factor_bias = node["bias"].as<double>();
    if (node["noise"]) e.substitute_noise = node["noise"].as<double>();
    if (node["grid_exponent"]) e.terrain_grid_exponent = node["grid_exponent"].as<int>();
    if (node["roughness"]) e.terrain_roughness = node["roughness"].as<double>();
    cfg.entries.push_back(std::move(e));
  }
  cfg.check();
  return cfg;
}

}  // namespace wdsgen
