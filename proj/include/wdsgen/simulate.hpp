#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wdsgen/hydraulics.hpp"
#include "wdsgen/network.hpp"

namespace wdsgen {

// A scenario: one simulated time series of snapshots plus its validation
// verdict.
struct ScenarioResult {
  std::vector<std::string> node_names; // junctions, reservoirs, tanks
  std::vector<std::string> link_names; // pipes, pumps, valves
  std::size_t junction_count = 0;
  std::vector<HydraulicState> snapshots;
  std::size_t input_steps = 0; // steps the inputs were provided for
  bool converged = true;
  bool valid = true;
  std::string failure_reason;
  std::vector<std::string> flags; // tank overflow/underflow etc.
};

struct Rule {
  std::string id;
  std::function<bool(const ScenarioResult&)> predicate;
};

struct RuleSet {
  std::vector<Rule> rules;

  // Default rule stack: pressures of all (non-skipped) junctions inside
  // (lo, hi], solver convergence, and input/output length agreement.
  static RuleSet defaults(double pressure_lo = 0.0, double pressure_hi = 151.0,
                          std::set<std::string> skip_names = {}) {
    RuleSet rs;
    rs.rules.push_back(
        {"pressure_in_range",
         [pressure_lo, pressure_hi, skip = std::move(skip_names)](const ScenarioResult& r) {
           for (const auto& snap : r.snapshots)
             for (std::size_t i = 0; i < r.junction_count; ++i) {
               if (skip.count(r.node_names[i])) continue;
               const double p = snap.node_pressure[i];
               if (!(p > pressure_lo) || !(p <= pressure_hi)) return false;
             }
           return true;
         }});
    rs.rules.push_back(
        {"no_solver_divergence", [](const ScenarioResult& r) { return r.converged; }});
    rs.rules.push_back({"time_consistency", [](const ScenarioResult& r) {
                          return r.snapshots.size() == r.input_steps;
                        }});
    return rs;
  }
};

// 1 iff every rule holds; stores the first failing rule id on the result.
inline bool validate_scenario(ScenarioResult& result, const RuleSet& rules) {
  for (const auto& r : rules.rules)
    if (!r.predicate(result)) {
      result.valid = false;
      result.failure_reason = r.id;
      return false;
    }
  result.valid = true;
  result.failure_reason.clear();
  return true;
}

// Sampled inputs of one scenario that vary in time. Multiplier series are
// indexed modulo their length, so a 24-value pattern tiles a week.
struct ScenarioInputs {
  SimulationTimes times;
  // junction name -> demand multiplier series; junctions absent here fall
  // back to their model demand pattern, or constant 1.
  std::map<std::string, std::vector<double>> demand_multipliers;
};

namespace detail {

inline double series_at(const std::vector<double>& s, std::size_t t, double fallback = 1.0) {
  if (s.empty()) return fallback;
  return s[t % s.size()];
}

}  // namespace detail

// Extended-period simulation: one steady-state solve per step with tank
// levels integrated explicitly between steps (volume change = net inflow *
// dt, clamped to the level band with a flag). Solver divergence marks the
// scenario invalid instead of throwing.
inline ScenarioResult simulate_scenario(const NetworkModel& model,
                                        const ScenarioInputs& inputs,
                                        const RuleSet& rules = RuleSet::defaults(),
                                        SolverOptions opts = {}) {
  ScenarioResult result;
  const int steps = inputs.times.steps();
  result.input_steps = static_cast<std::size_t>(steps);

  SteadyStateSolver solver(model, opts);
  result.node_names = solver.node_names();
  result.link_names = solver.link_names();
  result.junction_count = model.junctions.size();

  // Per-junction multiplier series: explicit inputs win, then the model's
  // own demand pattern, then constant 1.
  std::vector<const std::vector<double>*> mult(model.junctions.size(), nullptr);
  static const std::vector<double> kUnit{1.0};
  for (std::size_t i = 0; i < model.junctions.size(); ++i) {
    const auto& j = model.junctions[i];
    if (auto it = inputs.demand_multipliers.find(j.name); it != inputs.demand_multipliers.end())
      mult[i] = &it->second;
    else if (!j.demand_pattern.empty())
      mult[i] = &model.patterns.at(j.demand_pattern);
    else
      mult[i] = &kUnit;
  }

  const double dt_seconds = inputs.times.time_step_h * 3600.0;
  std::vector<double> tank_level;
  std::vector<double> tank_area;
  for (const auto& t : model.tanks) {
    tank_level.push_back(t.init_level);
    tank_area.push_back(detail::pipe_area(t.diameter));
  }

  std::vector<double> demands(model.junctions.size());
  std::vector<double> fixed(model.reservoirs.size() + model.tanks.size());
  const std::size_t link_base = model.pipes.size() + model.pumps.size();
  (void)link_base;

  for (int t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < model.junctions.size(); ++i)
      demands[i] = model.junctions[i].base_demand *
                   detail::series_at(*mult[i], static_cast<std::size_t>(t));
    for (std::size_t i = 0; i < model.reservoirs.size(); ++i) {
      const auto& r = model.reservoirs[i];
      double h = r.base_head;
      if (!r.head_pattern.empty())
        h *= detail::series_at(model.patterns.at(r.head_pattern), static_cast<std::size_t>(t));
      fixed[i] = h;
    }
    for (std::size_t i = 0; i < model.tanks.size(); ++i)
      fixed[model.reservoirs.size() + i] = model.tanks[i].elevation + tank_level[i];

    HydraulicState snap;
    try {
      snap = solver.solve(demands, fixed);
    } catch (const NonConvergence&) {
      result.converged = false;
      break;
    }

    // Integrate tank levels from this step's net inflow.
    for (std::size_t i = 0; i < model.tanks.size(); ++i) {
      const std::size_t node = model.junctions.size() + model.reservoirs.size() + i;
      const double net_inflow = -snap.node_demand[node]; // demand = -inflow
      double level = tank_level[i] + net_inflow * dt_seconds / tank_area[i];
      const auto& tk = model.tanks[i];
      if (level > tk.max_level) {
        result.flags.push_back("tank " + tk.name + " overflow at step " + std::to_string(t));
        level = tk.max_level;
      } else if (level < tk.min_level) {
        result.flags.push_back("tank " + tk.name + " underflow at step " + std::to_string(t));
        level = tk.min_level;
      }
      tank_level[i] = level;
    }

    result.snapshots.push_back(std::move(snap));
  }

  validate_scenario(result, rules);
  return result;
}

}  // namespace wdsgen
