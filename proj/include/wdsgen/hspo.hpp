#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdsgen/parallel.hpp"
#include "wdsgen/sampler.hpp"
#include "wdsgen/simulate.hpp"
#include "wdsgen/stats.hpp"

namespace wdsgen {

// Upper Tukey fence: q3 + 1.5 IQR, the spread measure behind the diversity
// fitness term.
inline double ubiqr(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("ubiqr of empty range");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = stats::quantile_sorted(sorted, 0.25);
  const double q3 = stats::quantile_sorted(sorted, 0.75);
  return q3 + 1.5 * (q3 - q1);
}

inline double f_range(double lb, double ub) { return std::abs(ub - lb); }

struct FitnessBreakdown {
  double f_success = 0.0;
  double f_ubiqr = 0.0;
  double f_range = 0.0;
  double f_pso = 0.0;
};

inline double compose_fitness(double f_success, double f_ubiqr, double f_rng, double alpha) {
  return f_success * (alpha * f_ubiqr + (1.0 - alpha) * f_rng);
}

struct SwarmConfig {
  int swarm_size = 20;
  double inertia = 0.729;
  double cognitive = 1.494;
  double social = 1.494;
  int max_iterations = 60;
  double alpha = 0.5;  // fitness mixing weight
  int n_cases = 100;
  int max_epochs = 10;
  double epoch_tolerance = 1e-3;
  unsigned workers = 1;
};

// Everything a fitness evaluation needs besides the candidate bounds.
struct FitnessContext {
  const ScenarioSampler* sampler = nullptr;
  RuleSet rules;
  SimulationTimes times;
  double baseline_ubiqr = 0.0;
  int n_cases = 100;
  std::uint64_t eval_seed = 0;
  double alpha = 0.5;
  unsigned workers = 1;
  bool zero_baseline_logged = false; // set when UBIQR falls back to 0
};

// Pooled junction output demand of the baseline itself (multipliers straight
// from the source model), the denominator of the diversity ratio.
inline double baseline_output_demand_ubiqr(const NetworkModel& model,
                                           const SimulationTimes& times,
                                           const RuleSet& rules) {
  ScenarioInputs in;
  in.times = times;
  const auto r = simulate_scenario(model, in, rules);
  std::vector<double> pool;
  for (const auto& snap : r.snapshots)
    for (std::size_t j = 0; j < r.junction_count; ++j) pool.push_back(snap.node_demand[j]);
  if (pool.empty()) return 0.0;
  return ubiqr(pool);
}

// Average success rate over n_cases sampled scenarios plus the pooled output
// demand of the valid ones: one simulation batch feeds both the success and
// the diversity terms.
struct SuccessEvaluation {
  double f_success = 0.0;
  std::vector<double> pooled_output_demand;
};

inline SuccessEvaluation evaluate_success(const ScenarioSampler& sampler, const RuleSet& rules,
                                          const SimulationTimes& times, int n_cases,
                                          std::uint64_t eval_seed, unsigned workers) {
  struct CaseResult {
    bool valid = false;
    std::vector<double> demands;
  };
  std::vector<CaseResult> results(static_cast<std::size_t>(n_cases));
  parallel_for(static_cast<std::size_t>(n_cases), workers, [&](std::size_t i) {
    Rng rng(derive_seed(eval_seed, i));
    auto& slot = results[i];
    try {
      const auto sample = sampler.sample(rng);
      ScenarioInputs in;
      in.times = times;
      in.demand_multipliers = sample.demand_multipliers;
      auto r = simulate_scenario(sample.model, in, rules);
      slot.valid = r.valid;
      if (r.valid)
        for (const auto& snap : r.snapshots)
          for (std::size_t j = 0; j < r.junction_count; ++j)
            slot.demands.push_back(snap.node_demand[j]);
    } catch (const std::runtime_error&) {
      // NoFixedHead, NonConvergence, UnsupportedValveBehavior, InvalidModel:
      // the sampled case simply does not validate.
      slot.valid = false;
    }
  });
  SuccessEvaluation out;
  int ok = 0;
  for (auto& r : results) {
    if (!r.valid) continue;
    ++ok;
    out.pooled_output_demand.insert(out.pooled_output_demand.end(), r.demands.begin(),
                                    r.demands.end());
  }
  out.f_success = static_cast<double>(ok) / static_cast<double>(n_cases);
  return out;
}

inline double f_success(const ScenarioSampler& sampler, const RuleSet& rules,
                        const SimulationTimes& times, int n_cases, std::uint64_t eval_seed,
                        unsigned workers = 1) {
  return evaluate_success(sampler, rules, times, n_cases, eval_seed, workers).f_success;
}

inline double f_ubiqr_ratio(std::span<const double> generated, double baseline_ubiqr,
                            bool* zero_logged = nullptr) {
  if (baseline_ubiqr == 0.0 || generated.empty()) {
    if (zero_logged) *zero_logged = true;
    return 0.0;
  }
  return ubiqr(generated) / baseline_ubiqr;
}

// Full composite evaluation of the sampler's current config, with the range
// term taken from `range_parameter`'s bounds.
inline FitnessBreakdown evaluate_fitness(FitnessContext& ctx, const std::string& range_parameter) {
  const auto* entry = ctx.sampler->config().find(range_parameter);
  FitnessBreakdown fb;
  fb.f_range = entry ? f_range(entry->lb, entry->ub) : 0.0;
  const auto ev = evaluate_success(*ctx.sampler, ctx.rules, ctx.times, ctx.n_cases,
                                   ctx.eval_seed, ctx.workers);
  fb.f_success = ev.f_success;
  bool zero = false;
  fb.f_ubiqr = f_ubiqr_ratio(ev.pooled_output_demand, ctx.baseline_ubiqr, &zero);
  if (zero) ctx.zero_baseline_logged = true;
  fb.f_pso = compose_fitness(fb.f_success, fb.f_ubiqr, fb.f_range, ctx.alpha);
  return fb;
}

// --- particle swarm core ----------------------------------------------------

struct PsoResult {
  double lb = 0.0;
  double ub = 1.0;
  double fitness = 0.0;
  int iterations = 0;
};

namespace detail {
// Project onto { (lb, ub) : 0 <= lb <= ub <= 1 }: clamp, then collapse an
// inverted pair to its midpoint.
inline void project_bounds(double& lb, double& ub) {
  lb = std::clamp(lb, 0.0, 1.0);
  ub = std::clamp(ub, 0.0, 1.0);
  if (lb > ub) {
    const double mid = 0.5 * (lb + ub);
    lb = ub = std::clamp(mid, 0.0, 1.0);
  }
}
}  // namespace detail

// Standard velocity/position PSO maximizing f over the projected unit
// square. Evaluations within one iteration may run on `workers` threads.
inline PsoResult pso_maximize(const std::function<double(double, double)>& f,
                              const SwarmConfig& cfg, Rng& rng, unsigned eval_workers = 1) {
  struct Particle {
    double lb, ub, vlb, vub;
    double best_lb, best_ub, best_fit;
  };
  std::vector<Particle> swarm(static_cast<std::size_t>(cfg.swarm_size));
  std::vector<double> fits(swarm.size());
  for (auto& p : swarm) {
    p.lb = rng.uniform01();
    p.ub = rng.uniform01();
    detail::project_bounds(p.lb, p.ub);
    p.vlb = rng.uniform(-0.1, 0.1);
    p.vub = rng.uniform(-0.1, 0.1);
  }
  parallel_for(swarm.size(), eval_workers,
               [&](std::size_t i) { fits[i] = f(swarm[i].lb, swarm[i].ub); });
  PsoResult best;
  best.fitness = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    auto& p = swarm[i];
    p.best_lb = p.lb;
    p.best_ub = p.ub;
    p.best_fit = fits[i];
    if (fits[i] > best.fitness) {
      best.fitness = fits[i];
      best.lb = p.lb;
      best.ub = p.ub;
    }
  }

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    for (auto& p : swarm) {
      const double r1a = rng.uniform01(), r1b = rng.uniform01();
      const double r2a = rng.uniform01(), r2b = rng.uniform01();
      p.vlb = cfg.inertia * p.vlb + cfg.cognitive * r1a * (p.best_lb - p.lb) +
              cfg.social * r2a * (best.lb - p.lb);
      p.vub = cfg.inertia * p.vub + cfg.cognitive * r1b * (p.best_ub - p.ub) +
              cfg.social * r2b * (best.ub - p.ub);
      p.lb += p.vlb;
      p.ub += p.vub;
      detail::project_bounds(p.lb, p.ub);
    }
    parallel_for(swarm.size(), eval_workers,
                 [&](std::size_t i) { fits[i] = f(swarm[i].lb, swarm[i].ub); });
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      auto& p = swarm[i];
      if (fits[i] > p.best_fit) {
        p.best_fit = fits[i];
        p.best_lb = p.lb;
        p.best_ub = p.ub;
      }
      if (fits[i] > best.fitness) {
        best.fitness = fits[i];
        best.lb = p.lb;
        best.ub = p.ub;
      }
    }
    best.iterations = iter + 1;
  }
  return best;
}

// Optimize one parameter's bounds while the rest of the configuration stays
// frozen. Falls back to the incumbent bounds when the swarm fails to beat
// them under the same evaluation seed.
struct ParameterOptimization {
  double lb, ub;
  FitnessBreakdown fitness;
  bool improved = false;
};

inline ParameterOptimization pso_optimize_parameter(ScenarioSampler& sampler,
                                                    const std::string& parameter,
                                                    FitnessContext& ctx,
                                                    const SwarmConfig& swarm, Rng& rng) {
  auto* entry = sampler.config().find(parameter);
  if (!entry) throw std::invalid_argument("no config entry for " + parameter);
  const double inc_lb = entry->lb, inc_ub = entry->ub;
  const auto incumbent = evaluate_fitness(ctx, parameter);

  auto objective = [&sampler, &ctx, &parameter](double lb, double ub) {
    // Each particle evaluation gets its own sampler copy with the candidate
    // bounds patched in; the shared eval seed keeps comparisons exact.
    ScenarioSampler local = sampler;
    auto* e = local.config().find(parameter);
    e->lb = lb;
    e->ub = ub;
    FitnessContext local_ctx = ctx;
    local_ctx.sampler = &local;
    local_ctx.workers = 1; // parallelism lives at the particle level
    return evaluate_fitness(local_ctx, parameter).f_pso;
  };
  const auto best = pso_maximize(objective, swarm, rng, swarm.workers);

  ParameterOptimization out;
  if (best.fitness > incumbent.f_pso) {
    entry->lb = best.lb;
    entry->ub = best.ub;
    out.lb = best.lb;
    out.ub = best.ub;
    out.improved = true;
    FitnessContext fx = ctx;
    out.fitness = evaluate_fitness(fx, parameter);
  } else {
    out.lb = inc_lb;
    out.ub = inc_ub;
    out.fitness = incumbent;
  }
  return out;
}

// --- divide-and-conquer outer loop -------------------------------------------

struct HspoResult {
  SamplingConfig config;
  std::vector<double> epoch_fitness;        // accepted composite after each epoch
  std::vector<std::string> optimized_order; // parameters visited, in order
  double baseline_ubiqr = 0.0;
};

inline bool bound_optimizable(StrategyKind k) {
  return k == StrategyKind::Sampling || k == StrategyKind::Perturbation ||
         k == StrategyKind::Factor;
}

// Per epoch: shuffle the optimizable parameter list, optimize each with a
// swarm while the others stay frozen, and lock accepted winners. Stops at
// max_epochs or when an epoch improves the best composite by less than the
// tolerance. One run-wide evaluation seed keeps every incumbent comparison
// and the recorded fitness history on the same Monte-Carlo sample.
inline HspoResult hspo_run(const NetworkModel& model, const SamplingConfig& blueprint,
                           const SwarmConfig& swarm, const ADGConfig& adg,
                           const RuleSet& rules, const SimulationTimes& times,
                           std::uint64_t master_seed) {
  ScenarioSampler sampler(model, blueprint, adg, profile_network(model));
  HspoResult out;
  out.baseline_ubiqr = baseline_output_demand_ubiqr(model, times, rules);

  std::vector<std::string> optimizable;
  for (const auto& e : sampler.config().entries)
    if (bound_optimizable(e.kind)) optimizable.push_back(e.parameter);
  if (optimizable.empty()) {
    out.config = sampler.config();
    return out;
  }

  FitnessContext ctx;
  ctx.sampler = &sampler;
  ctx.rules = rules;
  ctx.times = times;
  ctx.baseline_ubiqr = out.baseline_ubiqr;
  ctx.n_cases = swarm.n_cases;
  ctx.alpha = swarm.alpha;
  ctx.workers = swarm.workers;
  ctx.eval_seed = derive_seed(master_seed, 0xF17);

  Rng rng(derive_seed(master_seed, 0x5EED));
  double best_composite = -1.0;
  for (int epoch = 0; epoch < swarm.max_epochs; ++epoch) {
    auto order = optimizable;
    rng.shuffle(order);
    double epoch_best = best_composite;
    for (const auto& param : order) {
      const auto res = pso_optimize_parameter(sampler, param, ctx, swarm, rng);
      out.optimized_order.push_back(param);
      epoch_best = std::max(epoch_best, res.fitness.f_pso);
    }
    out.epoch_fitness.push_back(epoch_best);
    if (epoch > 0 && epoch_best - best_composite < swarm.epoch_tolerance) {
      best_composite = std::max(best_composite, epoch_best);
      break;
    }
    best_composite = std::max(best_composite, epoch_best);
  }
  out.config = sampler.config();
  return out;
}

}  // namespace wdsgen
