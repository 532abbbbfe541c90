#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wdsgen {

struct DanglingReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DuplicateName : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FlowUnit { LPS, LPM, MLD, CMH, CMD, CFS, GPM, MGD, IMGD, AFD };
enum class HeadlossFormula { HazenWilliams, DarcyWeisbach, ChezyManning };
enum class LinkStatus { Open, Closed, CV };
enum class PumpKind { Head, Power };
enum class ValveKind { PRV, PSV, FCV, TCV, GPV, PBV };

struct Junction {
  std::string name;
  double elevation = 0.0;     // m after SI conversion
  double base_demand = 0.0;   // m^3/s after SI conversion
  std::string demand_pattern; // empty = constant multiplier 1
};

struct Reservoir {
  std::string name;
  double base_head = 0.0; // m
  std::string head_pattern;
};

struct Tank {
  std::string name;
  double elevation = 0.0;  // m
  double init_level = 0.0; // m above tank bottom
  double min_level = 0.0;
  double max_level = 0.0;
  double diameter = 0.0;   // m
  double min_volume = 0.0; // m^3
};

struct Pipe {
  std::string name;
  std::string start, end;
  double length = 0.0;   // m
  double diameter = 0.0; // m
  double roughness = 0.0; // unitless (HW/CM) or mm (DW)
  double minor_loss = 0.0;
  LinkStatus status = LinkStatus::Open;
};

struct Pump {
  std::string name;
  std::string start, end;
  PumpKind kind = PumpKind::Head;
  std::string head_curve; // Head kind
  double power_kw = 0.0;  // Power kind
  double base_speed = 1.0;
  std::string energy_pattern;
};

struct Valve {
  std::string name;
  std::string start, end;
  ValveKind kind = ValveKind::TCV;
  double diameter = 0.0; // m
  double setting = 0.0;  // m (PRV/PSV), m^3/s (FCV), loss coeff (TCV)
  LinkStatus status = LinkStatus::Open;
};

struct SimulationTimes {
  double duration_h = 24.0;
  double time_step_h = 1.0;

  int steps() const {
    return static_cast<int>(std::llround(duration_h / time_step_h));
  }
  void check() const {
    if (duration_h <= 0.0 || time_step_h <= 0.0)
      throw InvalidModel("simulation duration and time step must be positive");
    const double r = duration_h / time_step_h;
    if (std::abs(r - std::round(r)) > 1e-9)
      throw InvalidModel("duration must be an integer multiple of the time step");
  }
};

using Pattern = std::vector<double>;
using CurvePoints = std::vector<std::pair<double, double>>;

// Typed graph of a water distribution network, plus the operating data the
// simulator needs. Ordered maps keep serialization deterministic.
struct NetworkModel {
  std::string name;
  std::vector<Junction> junctions;
  std::vector<Reservoir> reservoirs;
  std::vector<Tank> tanks;
  std::vector<Pipe> pipes;
  std::vector<Pump> pumps;
  std::vector<Valve> valves;
  std::map<std::string, Pattern> patterns;
  std::map<std::string, CurvePoints> curves;
  std::map<std::string, std::array<double, 2>> coordinates;
  SimulationTimes times;
  FlowUnit flow_unit = FlowUnit::LPS;
  HeadlossFormula headloss_formula = HeadlossFormula::HazenWilliams;
  bool si = false; // set once convert_to_si has run
  std::vector<std::string> skipped_sections;
  std::vector<std::string> warnings;

  std::size_t node_count() const {
    return junctions.size() + reservoirs.size() + tanks.size();
  }
  std::size_t link_count() const {
    return pipes.size() + pumps.size() + valves.size();
  }

  bool has_node(const std::string& n) const {
    for (const auto& j : junctions)
      if (j.name == n) return true;
    for (const auto& r : reservoirs)
      if (r.name == n) return true;
    for (const auto& t : tanks)
      if (t.name == n) return true;
    return false;
  }

  const Junction* find_junction(const std::string& n) const {
    for (const auto& j : junctions)
      if (j.name == n) return &j;
    return nullptr;
  }

  std::vector<std::string> node_names() const {
    std::vector<std::string> out;
    out.reserve(node_count());
    for (const auto& j : junctions) out.push_back(j.name);
    for (const auto& r : reservoirs) out.push_back(r.name);
    for (const auto& t : tanks) out.push_back(t.name);
    return out;
  }

  // (start, link, end) triples over all links, in pipe/pump/valve order.
  std::vector<std::array<std::string, 3>> adjacency() const {
    std::vector<std::array<std::string, 3>> adj;
    adj.reserve(link_count());
    for (const auto& p : pipes) adj.push_back({p.start, p.name, p.end});
    for (const auto& p : pumps) adj.push_back({p.start, p.name, p.end});
    for (const auto& v : valves) adj.push_back({v.start, v.name, v.end});
    return adj;
  }

  // Structural invariants: unique names per class, resolvable endpoints,
  // resolvable pattern/curve references, sane numeric fields.
  void check() const {
    auto unique = [](auto const& items, const char* what) {
      std::set<std::string> seen;
      for (const auto& it : items)
        if (!seen.insert(it.name).second)
          throw DuplicateName(std::string(what) + " name duplicated: " + it.name);
    };
    unique(junctions, "junction");
    unique(reservoirs, "reservoir");
    unique(tanks, "tank");
    std::set<std::string> links;
    auto unique_link = [&links](auto const& items, const char* what) {
      for (const auto& it : items)
        if (!links.insert(it.name).second)
          throw DuplicateName(std::string(what) + " name duplicated: " + it.name);
    };
    unique_link(pipes, "pipe");
    unique_link(pumps, "pump");
    unique_link(valves, "valve");

    auto need_node = [this](const std::string& link, const std::string& node) {
      if (!has_node(node))
        throw DanglingReference("link " + link + " references unknown node " + node);
    };
    for (const auto& p : pipes) {
      need_node(p.name, p.start);
      need_node(p.name, p.end);
      if (!(p.length > 0.0) || !(p.diameter > 0.0) || !(p.roughness > 0.0))
        throw InvalidModel("pipe " + p.name + " needs positive length/diameter/roughness");
    }
    for (const auto& p : pumps) {
      need_node(p.name, p.start);
      need_node(p.name, p.end);
      if (!(p.base_speed > 0.0))
        throw InvalidModel("pump " + p.name + " needs positive base speed");
      if (p.kind == PumpKind::Head) {
        auto it = curves.find(p.head_curve);
        if (it == curves.end())
          throw DanglingReference("pump " + p.name + " references unknown curve " + p.head_curve);
        if (it->second.empty())
          throw InvalidModel("pump curve " + p.head_curve + " has no points");
      }
    }
    for (const auto& v : valves) {
      need_node(v.name, v.start);
      need_node(v.name, v.end);
    }
    for (const auto& t : tanks)
      if (!(t.min_level <= t.init_level && t.init_level <= t.max_level))
        throw InvalidModel("tank " + t.name + " levels must satisfy min <= init <= max");
    for (const auto& r : reservoirs)
      if (!std::isfinite(r.base_head))
        throw InvalidModel("reservoir " + r.name + " base head not finite");
    auto need_pattern = [this](const std::string& owner, const std::string& pat) {
      if (!pat.empty() && !patterns.count(pat))
        throw DanglingReference(owner + " references unknown pattern " + pat);
    };
    for (const auto& j : junctions) {
      if (!std::isfinite(j.elevation))
        throw InvalidModel("junction " + j.name + " elevation not finite");
      need_pattern("junction " + j.name, j.demand_pattern);
    }
    for (const auto& r : reservoirs) need_pattern("reservoir " + r.name, r.head_pattern);
    for (const auto& p : pumps) need_pattern("pump " + p.name, p.energy_pattern);
    times.check();
  }
};

inline bool valve_supported_for_simulation(ValveKind k) {
  return k == ValveKind::PRV || k == ValveKind::PSV || k == ValveKind::FCV ||
         k == ValveKind::TCV;
}

}  // namespace wdsgen
