#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wdsgen/network.hpp"
#include "wdsgen/parameters.hpp"
#include "wdsgen/stats.hpp"
#include "wdsgen/text.hpp"

namespace wdsgen {

struct ParameterStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0; // sample standard deviation (n-1)
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t dimension = 1;      // series length, 1 for scalars
  std::size_t component_count = 0;
};

// Per-parameter statistics for one network, or pooled across networks when
// scope == kGlobalScope. Raw samples are retained so pooled quantiles are
// exact; source networks are small enough that streaming summaries would be
// a complication without a payoff.
struct NetworkProfile {
  static constexpr const char* kGlobalScope = "GLOBAL";
  std::string scope;
  std::map<std::string, ParameterStats> parameters;
  std::map<std::string, std::vector<double>> samples;

  const ParameterStats* find(const std::string& id) const {
    auto it = parameters.find(id);
    return it == parameters.end() ? nullptr : &it->second;
  }
};

inline ParameterStats profile_parameter(std::span<const double> values,
                                        std::size_t dimension,
                                        std::size_t component_count) {
  if (values.empty()) throw EmptyInput("profile_parameter: no values");
  for (double v : values)
    if (!std::isfinite(v)) throw EmptyInput("profile_parameter: non-finite value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  ParameterStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.mean = stats::mean(values);
  s.std = stats::sample_std(values);
  s.q1 = stats::quantile_sorted(sorted, 0.25);
  s.q3 = stats::quantile_sorted(sorted, 0.75);
  s.dimension = dimension == 0 ? 1 : dimension;
  s.component_count = component_count;
  return s;
}

namespace detail {

struct RawParameter {
  std::vector<double> values;
  std::size_t dimension = 1;
  std::size_t component_count = 0;
};

// Flatten every catalogue parameter present in the model into raw samples.
inline std::map<std::string, RawParameter> collect_parameters(const NetworkModel& m) {
  std::map<std::string, RawParameter> out;
  auto add_scalar = [&out](const std::string& id, double v) {
    auto& rp = out[id];
    rp.values.push_back(v);
    rp.component_count += 1;
    rp.dimension = 1;
  };
  auto add_series = [&out](const std::string& id, std::span<const double> v) {
    if (v.empty()) return;
    auto& rp = out[id];
    rp.values.insert(rp.values.end(), v.begin(), v.end());
    rp.component_count += 1;
    rp.dimension = std::max(rp.dimension, v.size());
  };

  for (const auto& j : m.junctions) {
    add_scalar("junction_elevation", j.elevation);
    add_scalar("junction_base_demand", j.base_demand);
    if (!j.demand_pattern.empty())
      add_series("junction_input_demand", m.patterns.at(j.demand_pattern));
  }
  for (const auto& r : m.reservoirs) {
    add_scalar("reservoir_base_head", r.base_head);
    if (!r.head_pattern.empty())
      add_series("reservoir_head_pattern", m.patterns.at(r.head_pattern));
  }
  for (const auto& t : m.tanks) {
    add_scalar("tank_elevation", t.elevation);
    add_scalar("tank_diameter", t.diameter);
    add_scalar("tank_initial_level", t.init_level);
    add_scalar("tank_min_volume", t.min_volume);
  }
  for (const auto& p : m.pipes) {
    add_scalar("pipe_diameter", p.diameter);
    add_scalar("pipe_length", p.length);
    add_scalar("pipe_roughness", p.roughness);
    add_scalar("pipe_minor_loss", p.minor_loss);
    add_scalar("pipe_initial_status", p.status == LinkStatus::Closed ? 0.0 : 1.0);
  }
  for (const auto& p : m.pumps) {
    const bool head = p.kind == PumpKind::Head;
    const std::string prefix = head ? "head_pump" : "power_pump";
    add_scalar(prefix + "_initial_status", 1.0);
    add_scalar(prefix + "_base_speed", p.base_speed);
    if (head) {
      const auto& pts = m.curves.at(p.head_curve);
      std::vector<double> xs, ys;
      for (const auto& [x, y] : pts) {
        xs.push_back(x);
        ys.push_back(y);
      }
      add_series("head_pump_pump_curve_x", xs);
      add_series("head_pump_pump_curve_y", ys);
      if (!p.energy_pattern.empty())
        add_series("head_pump_energy_pattern", m.patterns.at(p.energy_pattern));
    } else {
      add_scalar("power_pump_power", p.power_kw);
    }
  }
  for (const auto& v : m.valves) {
    std::string prefix;
    switch (v.kind) {
      case ValveKind::PRV: prefix = "prv"; break;
      case ValveKind::PSV: prefix = "psv"; break;
      case ValveKind::FCV: prefix = "fcv"; break;
      case ValveKind::TCV: prefix = "tcv"; break;
      default: continue; // GPV/PBV: unsupported-for-simulation, not profiled
    }
    add_scalar(prefix + "_initial_status", v.status == LinkStatus::Closed ? 0.0 : 1.0);
    add_scalar(prefix + "_initial_setting", v.setting);
    add_scalar(prefix + "_diameter", v.diameter);
  }
  return out;
}

}  // namespace detail

// One ParameterStats per catalogue parameter actually present in the model.
inline NetworkProfile profile_network(const NetworkModel& m) {
  NetworkProfile prof;
  prof.scope = m.name.empty() ? "unnamed" : m.name;
  for (auto& [id, raw] : detail::collect_parameters(m)) {
    prof.parameters[id] = profile_parameter(raw.values, raw.dimension, raw.component_count);
    prof.samples[id] = std::move(raw.values);
  }
  return prof;
}

// Pool per-network profiles into the GLOBAL scope. Quantiles come from the
// retained pooled samples; component counts sum.
inline NetworkProfile merge_global(const std::vector<NetworkProfile>& profiles) {
  if (profiles.empty()) throw EmptyInput("merge_global: no profiles");
  NetworkProfile out;
  out.scope = NetworkProfile::kGlobalScope;
  std::map<std::string, std::size_t> dims, counts;
  for (const auto& p : profiles) {
    for (const auto& [id, st] : p.parameters) {
      auto it = p.samples.find(id);
      if (it == p.samples.end()) continue;
      auto& pool = out.samples[id];
      pool.insert(pool.end(), it->second.begin(), it->second.end());
      dims[id] = std::max(dims[id], st.dimension);
      counts[id] += st.component_count;
    }
  }
  for (auto& [id, pool] : out.samples)
    out.parameters[id] = profile_parameter(pool, dims[id], counts[id]);
  return out;
}

// Self-describing text table: one row per (scope, parameter, statistic).
inline std::string profile_table(const NetworkProfile& p) {
  std::ostringstream out;
  out << "scope\tparameter\tstatistic\tvalue\n";
  for (const auto& [id, st] : p.parameters) {
    auto row = [&](const char* stat, double v) {
      out << p.scope << '\t' << id << '\t' << stat << '\t' << text::format_double(v) << '\n';
    };
    row("min", st.min);
    row("max", st.max);
    row("mean", st.mean);
    row("std", st.std);
    row("q1", st.q1);
    row("q3", st.q3);
    row("dimension", static_cast<double>(st.dimension));
    row("component_count", static_cast<double>(st.component_count));
  }
  return out.str();
}

}  // namespace wdsgen
