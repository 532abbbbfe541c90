#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wdsgen/network.hpp"

namespace wdsgen {

struct UnsupportedUnit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace units {

constexpr double kFootM = 0.3048;           // exact
constexpr double kInchM = 0.0254;           // exact
constexpr double kUsGallonL = 3.785411784;  // exact
constexpr double kImpGallonL = 4.54609;     // exact
constexpr double kCubicFootM3 = kFootM * kFootM * kFootM;
constexpr double kHorsepowerKw = 0.7457;
// EPANET pressure convention: 0.4333 psi per foot of water column.
constexpr double kPsiM = kFootM / 0.4333;

inline bool is_us_customary(FlowUnit u) {
  switch (u) {
    case FlowUnit::CFS:
    case FlowUnit::GPM:
    case FlowUnit::MGD:
    case FlowUnit::IMGD:
    case FlowUnit::AFD:
      return true;
    default:
      return false;
  }
}

// One original flow unit -> m^3/s.
inline double flow_to_m3s(FlowUnit u) {
  switch (u) {
    case FlowUnit::LPS: return 1e-3;
    case FlowUnit::LPM: return 1e-3 / 60.0;
    case FlowUnit::MLD: return 1e6 * 1e-3 / 86400.0;
    case FlowUnit::CMH: return 1.0 / 3600.0;
    case FlowUnit::CMD: return 1.0 / 86400.0;
    case FlowUnit::CFS: return kCubicFootM3;
    case FlowUnit::GPM: return kUsGallonL * 1e-3 / 60.0;
    case FlowUnit::MGD: return 1e6 * kUsGallonL * 1e-3 / 86400.0;
    case FlowUnit::IMGD: return 1e6 * kImpGallonL * 1e-3 / 86400.0;
    case FlowUnit::AFD: return 43560.0 * kCubicFootM3 / 86400.0;
  }
  throw UnsupportedUnit("unknown flow unit tag");
}

inline std::optional<FlowUnit> parse_flow_unit(std::string_view s) {
  if (s == "LPS") return FlowUnit::LPS;
  if (s == "LPM") return FlowUnit::LPM;
  if (s == "MLD") return FlowUnit::MLD;
  if (s == "CMH") return FlowUnit::CMH;
  if (s == "CMD") return FlowUnit::CMD;
  if (s == "CFS") return FlowUnit::CFS;
  if (s == "GPM") return FlowUnit::GPM;
  if (s == "MGD") return FlowUnit::MGD;
  if (s == "IMGD") return FlowUnit::IMGD;
  if (s == "AFD") return FlowUnit::AFD;
  return std::nullopt;
}

inline std::string flow_unit_name(FlowUnit u) {
  switch (u) {
    case FlowUnit::LPS: return "LPS";
    case FlowUnit::LPM: return "LPM";
    case FlowUnit::MLD: return "MLD";
    case FlowUnit::CMH: return "CMH";
    case FlowUnit::CMD: return "CMD";
    case FlowUnit::CFS: return "CFS";
    case FlowUnit::GPM: return "GPM";
    case FlowUnit::MGD: return "MGD";
    case FlowUnit::IMGD: return "IMGD";
    case FlowUnit::AFD: return "AFD";
  }
  return "LPS";
}

}  // namespace units

// Normalize every quantity to SI: lengths/elevations/heads in m, diameters
// in m, flows in m^3/s, power in kW, volumes in m^3. Darcy-Weisbach
// roughness ends up in mm (millifeet -> mm for US files), Hazen-Williams /
// Chezy-Manning roughness is unitless and untouched. Idempotent; the
// original flow unit tag stays on the model as provenance.
inline NetworkModel convert_to_si(const NetworkModel& in) {
  if (in.si) return in;
  NetworkModel m = in;
  const bool us = units::is_us_customary(in.flow_unit);
  const double flow = units::flow_to_m3s(in.flow_unit);
  const double len = us ? units::kFootM : 1.0;           // node elevations, heads, lengths
  const double pipe_diam = us ? units::kInchM : 1e-3;    // pipe/valve diameters
  const double tank_diam = us ? units::kFootM : 1.0;
  const double volume = us ? units::kCubicFootM3 : 1.0;
  const double power = us ? units::kHorsepowerKw : 1.0;
  const double pressure = us ? units::kPsiM : 1.0;       // PRV/PSV settings
  const bool dw = in.headloss_formula == HeadlossFormula::DarcyWeisbach;
  const double rough = dw ? (us ? units::kFootM : 1.0) : 1.0; // millifeet -> mm

  for (auto& j : m.junctions) {
    j.elevation *= len;
    j.base_demand *= flow;
  }
  for (auto& r : m.reservoirs) r.base_head *= len;
  for (auto& t : m.tanks) {
    t.elevation *= len;
    t.init_level *= len;
    t.min_level *= len;
    t.max_level *= len;
    t.diameter *= tank_diam;
    t.min_volume *= volume;
  }
  for (auto& p : m.pipes) {
    p.length *= len;
    p.diameter *= pipe_diam;
    p.roughness *= rough;
  }
  for (auto& p : m.pumps) p.power_kw *= power;
  for (auto& v : m.valves) {
    v.diameter *= pipe_diam;
    switch (v.kind) {
      case ValveKind::PRV:
      case ValveKind::PSV:
      case ValveKind::PBV:
        v.setting *= pressure;
        break;
      case ValveKind::FCV:
        v.setting *= flow;
        break;
      case ValveKind::TCV:
      case ValveKind::GPV:
        break; // loss coefficient / curve id: unitless
    }
  }
  // Pump head/efficiency curves: x is a flow, y is a head (m or ft) for head
  // curves and a percentage for efficiency curves. Head curves referenced by
  // pumps get both axes converted; other curves get flow-x conversion only
  // when the model is US customary (EPANET stores all curve flows in the
  // file's flow unit).
  for (auto& [cname, pts] : m.curves) {
    bool is_head_curve = false;
    for (const auto& p : m.pumps)
      if (p.kind == PumpKind::Head && p.head_curve == cname) is_head_curve = true;
    for (auto& [x, y] : pts) {
      x *= flow;
      if (is_head_curve) y *= len;
    }
  }
  m.si = true;
  return m;
}

}  // namespace wdsgen
