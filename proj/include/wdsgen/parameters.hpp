#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wdsgen {

// The hydraulic parameter catalogue: one id per (component, parameter) pair
// the toolkit profiles, samples, and records. Ids are snake_case and double
// as column name prefixes in the dataset layout.
enum class ParamCategory { Static, PatternSeries, CurveSeries, Status };

struct ParamInfo {
  std::string_view id;
  std::string_view component; // file-name component token
  ParamCategory category;
  // Global physical range in SI; sampling bounds are stored normalized to
  // [0,1] against this interval. Status parameters carry a dummy range.
  double lo;
  double hi;
};

inline constexpr std::array<ParamInfo, 38> kParameterCatalog{{
    {"junction_elevation", "junction", ParamCategory::Static, 0.0, 154.75},
    {"junction_base_demand", "junction", ParamCategory::Static, 0.0, 5.0},
    {"junction_input_demand", "junction", ParamCategory::PatternSeries, -1.388, 4.814},
    {"reservoir_base_head", "reservoir", ParamCategory::Static, 0.0, 500.0},
    {"reservoir_head_pattern", "reservoir", ParamCategory::PatternSeries, 0.91, 70.42},
    {"tank_elevation", "tank", ParamCategory::Static, 2.0, 571.12},
    {"tank_diameter", "tank", ParamCategory::Static, 0.3048, 58.309},
    {"tank_initial_level", "tank", ParamCategory::Static, 0.5, 548.64},
    {"tank_min_volume", "tank", ParamCategory::Static, 0.0, 95965.597},
    {"pipe_diameter", "pipe", ParamCategory::Static, 0.001, 5.1816},
    {"pipe_length", "pipe", ParamCategory::Static, 0.01, 17003.20},
    {"pipe_roughness", "pipe", ParamCategory::Static, 0.0015, 8333.3333},
    {"pipe_minor_loss", "pipe", ParamCategory::Static, 0.0, 1000.0},
    {"pipe_initial_status", "pipe", ParamCategory::Status, 0.0, 1.0},
    {"head_pump_initial_status", "head_pump", ParamCategory::Status, 0.0, 1.0},
    {"power_pump_initial_status", "power_pump", ParamCategory::Status, 0.0, 1.0},
    {"prv_initial_status", "prv", ParamCategory::Status, 0.0, 1.0},
    {"psv_initial_status", "psv", ParamCategory::Status, 0.0, 1.0},
    {"fcv_initial_status", "fcv", ParamCategory::Status, 0.0, 1.0},
    {"tcv_initial_status", "tcv", ParamCategory::Status, 0.0, 1.0},
    {"head_pump_base_speed", "head_pump", ParamCategory::Static, 0.9, 1.0},
    {"power_pump_base_speed", "power_pump", ParamCategory::Static, 0.9, 1.0},
    {"head_pump_efficiency_x", "head_pump", ParamCategory::CurveSeries, 0.0, 0.5},
    {"head_pump_efficiency_y", "head_pump", ParamCategory::CurveSeries, 0.0, 77.0},
    {"power_pump_efficiency_x", "power_pump", ParamCategory::CurveSeries, 0.0, 0.5},
    {"power_pump_efficiency_y", "power_pump", ParamCategory::CurveSeries, 0.0, 77.0},
    {"head_pump_pump_curve_x", "head_pump", ParamCategory::CurveSeries, 0.0, 0.88},
    {"head_pump_pump_curve_y", "head_pump", ParamCategory::CurveSeries, 0.0, 211.02},
    {"head_pump_energy_pattern", "head_pump", ParamCategory::PatternSeries, 0.024093, 0.1234},
    {"power_pump_power", "power_pump", ParamCategory::Static, 372.85, 186424.97},
    {"prv_initial_setting", "prv", ParamCategory::Static, 0.0, 154.75},
    {"psv_initial_setting", "psv", ParamCategory::Static, 38.69, 49.23},
    {"fcv_initial_setting", "fcv", ParamCategory::Static, 0.0, 0.9},
    {"tcv_initial_setting", "tcv", ParamCategory::Static, 0.0, 4.031018e11},
    {"prv_diameter", "prv", ParamCategory::Static, 0.001, 5.1816},
    {"psv_diameter", "psv", ParamCategory::Static, 0.001, 5.1816},
    {"fcv_diameter", "fcv", ParamCategory::Static, 0.001, 5.1816},
    {"tcv_diameter", "tcv", ParamCategory::Static, 0.001, 5.1816},
}};

inline const ParamInfo* find_parameter(std::string_view id) {
  for (const auto& p : kParameterCatalog)
    if (p.id == id) return &p;
  return nullptr;
}

inline const ParamInfo& parameter_info(std::string_view id) {
  if (const auto* p = find_parameter(id)) return *p;
  throw std::out_of_range("unknown parameter id: " + std::string(id));
}

// Physical range used to (de)normalize sampling bounds.
inline std::pair<double, double> physical_range(std::string_view id) {
  const auto& p = parameter_info(id);
  return {p.lo, p.hi};
}

inline double denormalize(std::string_view id, double x) {
  const auto [lo, hi] = physical_range(id);
  return lo + x * (hi - lo);
}

inline double normalize(std::string_view id, double v) {
  const auto [lo, hi] = physical_range(id);
  return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

}  // namespace wdsgen
