#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "wdsgen/louvain.hpp"
#include "wdsgen/network.hpp"
#include "wdsgen/rng.hpp"
#include "wdsgen/savgol.hpp"
#include "wdsgen/stats.hpp"

namespace wdsgen {

enum class ConsumptionLevel { Low, Medium, High };
enum class ProfileKind { Household, Commercial, Extreme, ZeroDemand };

// Consumption profile: one level per 6-hour segment of the day.
struct DemandProfile {
  ProfileKind kind = ProfileKind::Household;
  std::array<ConsumptionLevel, 4> segment_levels{};
};

inline DemandProfile demand_profile(ProfileKind kind) {
  using L = ConsumptionLevel;
  switch (kind) {
    case ProfileKind::Household:
      return {kind, {L::Low, L::High, L::Medium, L::Low}};
    case ProfileKind::Commercial:
      return {kind, {L::High, L::High, L::High, L::Medium}};
    case ProfileKind::Extreme:
      return {kind, {L::High, L::High, L::High, L::High}};
    case ProfileKind::ZeroDemand:
      return {kind, {L::Low, L::Low, L::Low, L::Low}};
  }
  return {};
}

// Level boundaries: Low = [0, q1), Medium = [q1, q3), High = [q3, 1].
struct ConsumptionBounds {
  double q1 = 0.25;
  double q3 = 0.75;

  std::pair<double, double> range(ConsumptionLevel l) const {
    switch (l) {
      case ConsumptionLevel::Low: return {0.0, q1};
      case ConsumptionLevel::Medium: return {q1, q3};
      case ConsumptionLevel::High: return {q3, 1.0};
    }
    return {0.0, 1.0};
  }
};

struct ADGConfig {
  double duration_h = 24.0;
  double time_step_h = 1.0;
  std::pair<double, double> p_commercial{0.25, 0.35};
  double extreme_dem_rate = 0.02;
  int max_extreme_dem_junctions = 2;
  double zero_dem_rate = 0.05;
  bool zero_rate_from_baseline = false; // rate = zero-base-demand share instead
  std::pair<double, double> noise_range{0.01, 0.05}; // eps_t std, normalized scale
  double summer_start = 5.0 / 12.0;  // normalized year position (June)
  std::pair<double, double> summer_amplitude_range{0.2, 0.8};
  double summer_rolling_rate = 0.20;
  int yearly_harmonics = 4;
  double daily_noise_std = 0.03;     // z_t inside the daily transform
  double yearly_noise_std = 0.08;    // z_t inside the yearly transform
  double daily_wave_amplitude = 0.15;
  int consumption_samples = 100;     // N uniforms behind the q1/q3 levels
  int savgol_window = 7;
  int savgol_order = 2;
  double louvain_gamma = 1.0;
  double louvain_threshold = 1e-7;

  int steps() const { return static_cast<int>(std::llround(duration_h / time_step_h)); }
  int steps_per_day() const {
    return std::max(1, static_cast<int>(std::llround(24.0 / time_step_h)));
  }
  // Period of the yearly component: the day for short-term runs, the full
  // year for anything longer. Longer-than-a-day scenarios shorter than a
  // year see a slice of the year-long pattern.
  int yearly_period_steps() const {
    if (duration_h <= 24.0) return steps();
    return static_cast<int>(std::llround(8760.0 / time_step_h));
  }
};

// Draw n uniforms in [0,1] and take their q1/q3 as the level boundaries.
inline ConsumptionBounds consumption_levels(Rng& rng, int n) {
  if (n < 4) throw std::invalid_argument("consumption_levels needs n >= 4");
  std::vector<double> samples(static_cast<std::size_t>(n));
  for (auto& s : samples) s = rng.uniform01();
  std::sort(samples.begin(), samples.end());
  return {stats::quantile_sorted(samples, 0.25), stats::quantile_sorted(samples, 0.75)};
}

// Daily multiplier series. One day template is built from per-step uniform
// draws inside the active segment's level range, then tiled across the
// duration; each step adds a smooth diurnal wave (cos+sin at the hour's
// phase) and white noise so repeated days are not verbatim copies. The
// result is Savitzky-Golay smoothed and min-max normalized.
inline std::vector<double> daily_pattern(const DemandProfile& profile,
                                         const ConsumptionBounds& bounds,
                                         const ADGConfig& cfg, Rng& rng) {
  if (profile.kind == ProfileKind::ZeroDemand)
    throw std::invalid_argument("zero-demand series are emitted upstream");
  const int steps = cfg.steps();
  const int spd = cfg.steps_per_day();

  std::vector<double> day_template(static_cast<std::size_t>(spd));
  for (int s = 0; s < spd; ++s) {
    const double hour = static_cast<double>(s) * cfg.time_step_h;
    const int segment = std::min(3, static_cast<int>(hour / 6.0));
    const auto [lo, hi] = bounds.range(profile.segment_levels[static_cast<std::size_t>(segment)]);
    day_template[static_cast<std::size_t>(s)] = rng.uniform(lo, hi);
  }

  std::vector<double> raw(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    const double hour = std::fmod(static_cast<double>(t) * cfg.time_step_h, 24.0);
    const double phase = 2.0 * std::numbers::pi * hour / 24.0;
    raw[static_cast<std::size_t>(t)] = day_template[static_cast<std::size_t>(t % spd)] +
                                       cfg.daily_wave_amplitude * (std::cos(phase) + std::sin(phase)) +
                                       rng.normal(0.0, cfg.daily_noise_std);
  }
  if (steps >= cfg.savgol_window && cfg.savgol_window >= 3)
    raw = smooth_savgol(raw, cfg.savgol_window, cfg.savgol_order);
  return stats::minmax_normalize(raw);
}

// Fourier series with H harmonics over the given period; coefficients in
// [0,1) supplied by the caller as {A0, A1, B1, ..., AH, BH}.
inline double fourier_value(std::span<const double> coeffs, int harmonics, double t,
                            double period) {
  double y = coeffs[0];
  for (int n = 1; n <= harmonics; ++n) {
    const double w = 2.0 * std::numbers::pi * n * t / period;
    y += coeffs[static_cast<std::size_t>(2 * n - 1)] * std::cos(w) +
         coeffs[static_cast<std::size_t>(2 * n)] * std::sin(w);
  }
  return y;
}

// Seasonal cosine peaking at s_peak.
inline double seasonal_value(double amplitude, double s_peak, double t, double period) {
  return amplitude * std::cos(2.0 * std::numbers::pi * (t - s_peak) / period);
}

// Yearly multiplier series: random-coefficient Fourier component plus a
// seasonal cosine peaking in summer (occasionally rolled elsewhere in the
// year) plus white noise, normalized over the full period and cut to the
// scenario length.
inline std::vector<double> yearly_pattern(const ADGConfig& cfg, Rng& rng) {
  const int steps = cfg.steps();
  const int period = std::max(1, cfg.yearly_period_steps());
  const int gen_len = std::max(steps, period);

  std::vector<double> coeffs(static_cast<std::size_t>(2 * cfg.yearly_harmonics + 1));
  for (auto& c : coeffs) c = rng.uniform01();
  const double amplitude =
      rng.uniform(cfg.summer_amplitude_range.first, cfg.summer_amplitude_range.second);
  double s_peak = cfg.summer_start * static_cast<double>(period);
  if (rng.bernoulli(cfg.summer_rolling_rate))
    s_peak = rng.uniform(0.0, static_cast<double>(period));

  std::vector<double> raw(static_cast<std::size_t>(gen_len));
  for (int t = 0; t < gen_len; ++t)
    raw[static_cast<std::size_t>(t)] =
        fourier_value(coeffs, cfg.yearly_harmonics, t, period) +
        seasonal_value(amplitude, s_peak, t, period) +
        rng.normal(0.0, cfg.yearly_noise_std);
  auto norm = stats::minmax_normalize(raw);
  norm.resize(static_cast<std::size_t>(steps));
  return norm;
}

// Who gets which consumption profile in one scenario.
struct ProfileAssignment {
  std::map<std::string, ProfileKind> profiles;
  double p_commercial = 0.0;
  std::size_t commercial_target = 0; // floor(p * N), before special profiles
  std::vector<std::string> extreme_junctions;
  std::vector<std::string> zero_junctions;
};

// Assign whole communities to Commercial until floor(p*N) nodes are covered
// (the boundary community splits), leave the rest Household, then overlay
// the Extreme and ZeroDemand special profiles.
inline ProfileAssignment assign_profiles(const NetworkModel& model,
                                         const std::map<std::string, std::size_t>& communities,
                                         const ADGConfig& cfg, Rng& rng) {
  ProfileAssignment out;
  const std::size_t n = model.junctions.size();
  if (n == 0) return out;

  out.p_commercial = rng.uniform(cfg.p_commercial.first, cfg.p_commercial.second);
  out.commercial_target =
      static_cast<std::size_t>(std::floor(out.p_commercial * static_cast<double>(n)));

  // Junction lists per community, in ascending community id, preserving
  // model junction order inside each community.
  std::map<std::size_t, std::vector<std::string>> by_comm;
  for (const auto& j : model.junctions) {
    const auto it = communities.find(j.name);
    const std::size_t c = it == communities.end() ? 0 : it->second;
    by_comm[c].push_back(j.name);
  }

  std::size_t assigned = 0;
  for (const auto& [c, members] : by_comm)
    for (const auto& name : members)
      if (assigned < out.commercial_target) {
        out.profiles[name] = ProfileKind::Commercial;
        ++assigned;
      } else {
        out.profiles[name] = ProfileKind::Household;
      }

  // Extreme scenario: a couple of junctions run hot all day.
  if (rng.bernoulli(cfg.extreme_dem_rate) && cfg.max_extreme_dem_junctions > 0) {
    const auto count = static_cast<std::size_t>(std::min<std::int64_t>(
        rng.uniform_int(1, cfg.max_extreme_dem_junctions), static_cast<std::int64_t>(n)));
    std::vector<std::string> pool;
    pool.reserve(n);
    for (const auto& j : model.junctions) pool.push_back(j.name);
    rng.shuffle(pool);
    for (std::size_t i = 0; i < count; ++i) {
      out.profiles[pool[i]] = ProfileKind::Extreme;
      out.extreme_junctions.push_back(pool[i]);
    }
  }

  // Zero-demand junctions, drawn from the remaining household/commercial pool.
  std::size_t zero_count;
  if (cfg.zero_rate_from_baseline) {
    zero_count = 0;
    for (const auto& j : model.junctions)
      if (j.base_demand == 0.0) ++zero_count;
  } else {
    zero_count = static_cast<std::size_t>(
        std::llround(cfg.zero_dem_rate * static_cast<double>(n)));
  }
  std::vector<std::string> pool;
  for (const auto& j : model.junctions)
    if (out.profiles[j.name] == ProfileKind::Household ||
        out.profiles[j.name] == ProfileKind::Commercial)
      pool.push_back(j.name);
  rng.shuffle(pool);
  zero_count = std::min(zero_count, pool.size());
  for (std::size_t i = 0; i < zero_count; ++i) {
    out.profiles[pool[i]] = ProfileKind::ZeroDemand;
    out.zero_junctions.push_back(pool[i]);
  }
  return out;
}

struct DemandSet {
  std::map<std::string, std::vector<double>> series; // junction -> multipliers
  ProfileAssignment assignment;
};

// Demand multiplier series for every junction of one scenario: the additive
// daily + yearly + noise model. The yearly pattern and the consumption level
// boundaries are scenario-wide; daily draws and the noise stream are
// per-junction, so fluctuations across junctions stay independent.
inline DemandSet generate_demands(const NetworkModel& model, const ADGConfig& cfg,
                                  const std::map<std::string, std::size_t>& communities,
                                  Rng& rng) {
  if (model.junctions.empty()) throw EmptyInput("generate_demands: model has no junctions");
  DemandSet out;
  out.assignment = assign_profiles(model, communities, cfg, rng);
  const auto bounds = consumption_levels(rng, cfg.consumption_samples);
  const auto yearly = yearly_pattern(cfg, rng);
  const auto steps = static_cast<std::size_t>(cfg.steps());

  for (const auto& j : model.junctions) {
    const auto kind = out.assignment.profiles.at(j.name);
    if (kind == ProfileKind::ZeroDemand) {
      out.series[j.name] = std::vector<double>(steps, 0.0);
      continue;
    }
    const auto daily = daily_pattern(demand_profile(kind), bounds, cfg, rng);
    const double noise_std = rng.uniform(cfg.noise_range.first, cfg.noise_range.second);
    std::vector<double> sum(steps);
    for (std::size_t t = 0; t < steps; ++t)
      sum[t] = daily[t] + yearly[t] + rng.normal(0.0, noise_std);
    out.series[j.name] = stats::minmax_normalize(sum);
  }
  return out;
}

inline DemandSet generate_demands(const NetworkModel& model, const ADGConfig& cfg, Rng& rng) {
  const auto communities =
      junction_communities(model, cfg.louvain_gamma, cfg.louvain_threshold, rng.next_u64());
  return generate_demands(model, cfg, communities, rng);
}

}  // namespace wdsgen
