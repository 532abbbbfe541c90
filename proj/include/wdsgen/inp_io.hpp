#pragma once

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wdsgen/network.hpp"
#include "wdsgen/text.hpp"
#include "wdsgen/units.hpp"

namespace wdsgen {

struct MalformedSection : std::runtime_error {
  MalformedSection(const std::string& section, std::size_t line, const std::string& why)
      : std::runtime_error("[" + section + "] line " + std::to_string(line) + ": " + why) {}
};

namespace detail {

// Reject bytes outside printable ASCII / whitespace / UTF-8 multibyte lead
// and continuation ranges; source files with undecodable content are
// rejected rather than guessed at.
inline void check_encoding(std::string_view txt) {
  std::size_t i = 0, line = 1;
  while (i < txt.size()) {
    const auto c = static_cast<unsigned char>(txt[i]);
    if (c == '\n') ++line;
    if (c < 0x80) {
      if (c != '\t' && c != '\n' && c != '\r' && (c < 0x20 || c == 0x7F))
        throw MalformedSection("FILE", line, "unreadable control byte");
      ++i;
      continue;
    }
    int extra = 0;
    if ((c & 0xE0) == 0xC0) extra = 1;
    else if ((c & 0xF0) == 0xE0) extra = 2;
    else if ((c & 0xF8) == 0xF0) extra = 3;
    else throw MalformedSection("FILE", line, "invalid UTF-8 lead byte");
    if (i + extra >= txt.size()) throw MalformedSection("FILE", line, "truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(txt[i + k]) & 0xC0) != 0x80)
        throw MalformedSection("FILE", line, "invalid UTF-8 continuation byte");
    i += static_cast<std::size_t>(extra) + 1;
  }
}

// "24", "24.5", "24:30" or "2:15:30" -> hours.
inline double parse_clock_hours(const std::string& tok, const std::string& section, std::size_t line) {
  const auto colon = tok.find(':');
  if (colon == std::string::npos) {
    auto v = text::parse_double(tok);
    if (!v) throw MalformedSection(section, line, "bad time value '" + tok + "'");
    return *v;
  }
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto next = tok.find(':', start);
    const auto piece = tok.substr(start, next == std::string::npos ? std::string::npos : next - start);
    auto v = text::parse_double(piece);
    if (!v) throw MalformedSection(section, line, "bad time value '" + tok + "'");
    parts.push_back(*v);
    if (next == std::string::npos) break;
    start = next + 1;
  }
  double hours = parts[0];
  if (parts.size() > 1) hours += parts[1] / 60.0;
  if (parts.size() > 2) hours += parts[2] / 3600.0;
  if (parts.size() > 3) throw MalformedSection(section, line, "bad time value '" + tok + "'");
  return hours;
}

inline double time_unit_factor(const std::string& word) {
  const auto w = text::upper(word);
  if (w == "SECONDS" || w == "SEC") return 1.0 / 3600.0;
  if (w == "MINUTES" || w == "MIN") return 1.0 / 60.0;
  if (w == "HOURS" || w == "HR") return 1.0;
  if (w == "DAYS" || w == "DAY") return 24.0;
  return -1.0;
}

}  // namespace detail

// Parse the EPANET 2.2 INP subset needed for hydraulics. Values stay in the
// file's original units; call convert_to_si() afterwards. Unsupported
// sections are skipped and listed on the returned model.
inline NetworkModel parse_inp(std::string_view inp_text) {
  detail::check_encoding(inp_text);

  static const std::set<std::string> kSupported = {
      "JUNCTIONS", "RESERVOIRS", "TANKS",       "PIPES", "PUMPS",
      "VALVES",    "PATTERNS",   "CURVES",      "COORDINATES",
      "TIMES",     "OPTIONS",    "STATUS",      "END"};

  NetworkModel m;
  std::set<std::string> skipped;
  std::set<std::string> link_names;
  std::string section;
  std::size_t line_no = 0;

  std::istringstream in{std::string(inp_text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (const auto sc = raw.find(';'); sc != std::string::npos) raw.erase(sc);
    const auto lv = text::trim(raw);
    if (lv.empty()) continue;

    if (lv.front() == '[') {
      const auto close = lv.find(']');
      if (close == std::string_view::npos)
        throw MalformedSection(section.empty() ? "FILE" : section, line_no, "unterminated section header");
      section = text::upper(text::trim(lv.substr(1, close - 1)));
      if (!kSupported.count(section)) skipped.insert(section);
      continue;
    }
    if (section.empty())
      throw MalformedSection("FILE", line_no, "data before any section header");
    if (!kSupported.count(section)) continue;

    const auto tok = text::split_ws(lv);
    auto num = [&](std::size_t idx, const char* what) {
      if (idx >= tok.size())
        throw MalformedSection(section, line_no, std::string("missing ") + what);
      auto v = text::parse_double(tok[idx]);
      if (!v)
        throw MalformedSection(section, line_no,
                               std::string("bad ") + what + " '" + tok[idx] + "'");
      return *v;
    };

    if (section == "JUNCTIONS") {
      Junction j;
      j.name = tok[0];
      j.elevation = num(1, "elevation");
      if (tok.size() > 2) j.base_demand = num(2, "demand");
      if (tok.size() > 3) j.demand_pattern = tok[3];
      if (j.base_demand < 0.0)
        m.warnings.push_back("junction " + j.name + " has negative base demand (preserved)");
      m.junctions.push_back(std::move(j));
    } else if (section == "RESERVOIRS") {
      Reservoir r;
      r.name = tok[0];
      r.base_head = num(1, "head");
      if (tok.size() > 2) r.head_pattern = tok[2];
      m.reservoirs.push_back(std::move(r));
    } else if (section == "TANKS") {
      if (tok.size() < 7) throw MalformedSection(section, line_no, "tank needs 7 fields");
      Tank t;
      t.name = tok[0];
      t.elevation = num(1, "elevation");
      t.init_level = num(2, "initial level");
      t.min_level = num(3, "minimum level");
      t.max_level = num(4, "maximum level");
      t.diameter = num(5, "diameter");
      t.min_volume = num(6, "minimum volume");
      if (tok.size() > 7)
        m.warnings.push_back("tank " + t.name + " volume curve ignored");
      m.tanks.push_back(std::move(t));
    } else if (section == "PIPES") {
      if (tok.size() < 6) throw MalformedSection(section, line_no, "pipe needs 6 fields");
      Pipe p;
      p.name = tok[0];
      p.start = tok[1];
      p.end = tok[2];
      p.length = num(3, "length");
      p.diameter = num(4, "diameter");
      p.roughness = num(5, "roughness");
      if (tok.size() > 6) p.minor_loss = num(6, "minor loss");
      if (tok.size() > 7) {
        const auto s = text::upper(tok[7]);
        if (s == "OPEN") p.status = LinkStatus::Open;
        else if (s == "CLOSED") p.status = LinkStatus::Closed;
        else if (s == "CV") p.status = LinkStatus::CV;
        else throw MalformedSection(section, line_no, "bad pipe status '" + tok[7] + "'");
      }
      m.pipes.push_back(std::move(p));
    } else if (section == "PUMPS") {
      if (tok.size() < 5) throw MalformedSection(section, line_no, "pump needs keyword/value pairs");
      Pump p;
      p.name = tok[0];
      p.start = tok[1];
      p.end = tok[2];
      bool kind_set = false;
      for (std::size_t i = 3; i + 1 < tok.size(); i += 2) {
        const auto key = text::upper(tok[i]);
        if (key == "HEAD") {
          p.kind = PumpKind::Head;
          p.head_curve = tok[i + 1];
          kind_set = true;
        } else if (key == "POWER") {
          p.kind = PumpKind::Power;
          p.power_kw = num(i + 1, "pump power");
          kind_set = true;
        } else if (key == "SPEED") {
          p.base_speed = num(i + 1, "pump speed");
        } else if (key == "PATTERN") {
          p.energy_pattern = tok[i + 1];
        } else {
          throw MalformedSection(section, line_no, "unknown pump keyword '" + tok[i] + "'");
        }
      }
      if (!kind_set) throw MalformedSection(section, line_no, "pump needs HEAD or POWER");
      m.pumps.push_back(std::move(p));
    } else if (section == "VALVES") {
      if (tok.size() < 6) throw MalformedSection(section, line_no, "valve needs 6 fields");
      Valve v;
      v.name = tok[0];
      v.start = tok[1];
      v.end = tok[2];
      v.diameter = num(3, "diameter");
      const auto kind = text::upper(tok[4]);
      if (kind == "PRV") v.kind = ValveKind::PRV;
      else if (kind == "PSV") v.kind = ValveKind::PSV;
      else if (kind == "FCV") v.kind = ValveKind::FCV;
      else if (kind == "TCV") v.kind = ValveKind::TCV;
      else if (kind == "GPV") v.kind = ValveKind::GPV;
      else if (kind == "PBV") v.kind = ValveKind::PBV;
      else throw MalformedSection(section, line_no, "unknown valve type '" + tok[4] + "'");
      v.setting = num(5, "setting");
      if (!valve_supported_for_simulation(v.kind))
        m.warnings.push_back("valve " + v.name + " kind " + kind +
                             " is unsupported-for-simulation");
      m.valves.push_back(std::move(v));
    } else if (section == "PATTERNS") {
      auto& series = m.patterns[tok[0]];
      for (std::size_t i = 1; i < tok.size(); ++i) series.push_back(num(i, "multiplier"));
    } else if (section == "CURVES") {
      if (tok.size() < 3) throw MalformedSection(section, line_no, "curve needs id x y");
      m.curves[tok[0]].emplace_back(num(1, "curve x"), num(2, "curve y"));
    } else if (section == "COORDINATES") {
      if (tok.size() < 3) throw MalformedSection(section, line_no, "coordinate needs node x y");
      m.coordinates[tok[0]] = {num(1, "x"), num(2, "y")};
    } else if (section == "TIMES") {
      const auto key = text::upper(tok[0]);
      if (key == "DURATION") {
        double h = detail::parse_clock_hours(tok[1], section, line_no);
        if (tok.size() > 2) {
          const double f = detail::time_unit_factor(tok[2]);
          if (f < 0) throw MalformedSection(section, line_no, "bad time unit '" + tok[2] + "'");
          h *= f;
        }
        m.times.duration_h = h;
      } else if (key == "HYDRAULIC" && tok.size() >= 3 && text::upper(tok[1]) == "TIMESTEP") {
        double h = detail::parse_clock_hours(tok[2], section, line_no);
        if (tok.size() > 3) {
          const double f = detail::time_unit_factor(tok[3]);
          if (f < 0) throw MalformedSection(section, line_no, "bad time unit '" + tok[3] + "'");
          h *= f;
        }
        m.times.time_step_h = h;
      }
      // Pattern/report/quality clocks are irrelevant to the solver.
    } else if (section == "OPTIONS") {
      const auto key = text::upper(tok[0]);
      if (key == "UNITS" && tok.size() > 1) {
        const auto u = units::parse_flow_unit(text::upper(tok[1]));
        if (!u) throw UnsupportedUnit("unsupported flow unit '" + tok[1] + "'");
        m.flow_unit = *u;
      } else if (key == "HEADLOSS" && tok.size() > 1) {
        const auto h = text::upper(tok[1]);
        if (h == "H-W" || h == "HW") m.headloss_formula = HeadlossFormula::HazenWilliams;
        else if (h == "D-W" || h == "DW") m.headloss_formula = HeadlossFormula::DarcyWeisbach;
        else if (h == "C-M" || h == "CM") m.headloss_formula = HeadlossFormula::ChezyManning;
        else throw MalformedSection(section, line_no, "unknown headloss formula '" + tok[1] + "'");
      }
      // Remaining options (viscosity, trials...) use solver defaults.
    } else if (section == "STATUS") {
      if (tok.size() < 2) throw MalformedSection(section, line_no, "status needs link and state");
      const auto s = text::upper(tok[1]);
      LinkStatus st;
      if (s == "OPEN") st = LinkStatus::Open;
      else if (s == "CLOSED") st = LinkStatus::Closed;
      else if (s == "CV") st = LinkStatus::CV;
      else {
        m.warnings.push_back("status line for " + tok[0] + " with setting '" + tok[1] +
                             "' ignored");
        continue;
      }
      bool found = false;
      for (auto& p : m.pipes)
        if (p.name == tok[0]) { p.status = st; found = true; }
      for (auto& v : m.valves)
        if (v.name == tok[0]) { v.status = st; found = true; }
      if (!found)
        m.warnings.push_back("status line for unknown link " + tok[0] + " ignored");
    } else if (section == "END") {
      break;
    }
  }

  m.skipped_sections.assign(skipped.begin(), skipped.end());
  m.check();
  return m;
}

// Serialize back to INP text. Models already converted to SI are written in
// LPS so the output stays a valid EPANET file; original-unit models are
// written verbatim. Section order is fixed, so serialization is
// deterministic.
inline std::string serialize_inp(const NetworkModel& m) {
  // SI -> LPS on the way out; everything else written as stored.
  const double flow = m.si ? 1e3 : 1.0;          // m^3/s -> L/s
  const double diam = m.si ? 1e3 : 1.0;          // m -> mm
  std::ostringstream out;
  auto f = [](double v) { return text::format_double(v); };

  out << "[JUNCTIONS]\n";
  for (const auto& j : m.junctions) {
    out << j.name << ' ' << f(j.elevation) << ' ' << f(j.base_demand * flow);
    if (!j.demand_pattern.empty()) out << ' ' << j.demand_pattern;
    out << '\n';
  }
  out << "\n[RESERVOIRS]\n";
  for (const auto& r : m.reservoirs) {
    out << r.name << ' ' << f(r.base_head);
    if (!r.head_pattern.empty()) out << ' ' << r.head_pattern;
    out << '\n';
  }
  out << "\n[TANKS]\n";
  for (const auto& t : m.tanks)
    out << t.name << ' ' << f(t.elevation) << ' ' << f(t.init_level) << ' '
        << f(t.min_level) << ' ' << f(t.max_level) << ' ' << f(t.diameter) << ' '
        << f(t.min_volume) << '\n';
  out << "\n[PIPES]\n";
  for (const auto& p : m.pipes) {
    out << p.name << ' ' << p.start << ' ' << p.end << ' ' << f(p.length) << ' '
        << f(p.diameter * diam) << ' ' << f(p.roughness) << ' ' << f(p.minor_loss) << ' ';
    switch (p.status) {
      case LinkStatus::Open: out << "Open"; break;
      case LinkStatus::Closed: out << "Closed"; break;
      case LinkStatus::CV: out << "CV"; break;
    }
    out << '\n';
  }
  out << "\n[PUMPS]\n";
  for (const auto& p : m.pumps) {
    out << p.name << ' ' << p.start << ' ' << p.end;
    if (p.kind == PumpKind::Head) out << " HEAD " << p.head_curve;
    else out << " POWER " << f(p.power_kw);
    if (p.base_speed != 1.0) out << " SPEED " << f(p.base_speed);
    if (!p.energy_pattern.empty()) out << " PATTERN " << p.energy_pattern;
    out << '\n';
  }
  out << "\n[VALVES]\n";
  for (const auto& v : m.valves) {
    const char* kind = "TCV";
    double setting = v.setting;
    switch (v.kind) {
      case ValveKind::PRV: kind = "PRV"; break;
      case ValveKind::PSV: kind = "PSV"; break;
      case ValveKind::FCV: kind = "FCV"; setting *= flow; break;
      case ValveKind::TCV: kind = "TCV"; break;
      case ValveKind::GPV: kind = "GPV"; break;
      case ValveKind::PBV: kind = "PBV"; break;
    }
    out << v.name << ' ' << v.start << ' ' << v.end << ' ' << f(v.diameter * diam) << ' '
        << kind << ' ' << f(setting) << '\n';
  }
  bool any_status = false;
  for (const auto& v : m.valves)
    if (v.status != LinkStatus::Open) any_status = true;
  if (any_status) {
    out << "\n[STATUS]\n";
    for (const auto& v : m.valves)
      if (v.status == LinkStatus::Closed) out << v.name << " Closed\n";
  }
  out << "\n[PATTERNS]\n";
  for (const auto& [name, series] : m.patterns) {
    // Six multipliers per line, EPANET style.
    for (std::size_t i = 0; i < series.size(); i += 6) {
      out << name;
      for (std::size_t k = i; k < std::min(series.size(), i + 6); ++k) out << ' ' << f(series[k]);
      out << '\n';
    }
  }
  out << "\n[CURVES]\n";
  for (const auto& [name, pts] : m.curves)
    for (const auto& [x, y] : pts) out << name << ' ' << f(x * flow) << ' ' << f(y) << '\n';
  out << "\n[COORDINATES]\n";
  for (const auto& [node, xy] : m.coordinates)
    out << node << ' ' << f(xy[0]) << ' ' << f(xy[1]) << '\n';
  out << "\n[OPTIONS]\n";
  out << "UNITS " << (m.si ? "LPS" : units::flow_unit_name(m.flow_unit)) << '\n';
  switch (m.headloss_formula) {
    case HeadlossFormula::HazenWilliams: out << "HEADLOSS H-W\n"; break;
    case HeadlossFormula::DarcyWeisbach: out << "HEADLOSS D-W\n"; break;
    case HeadlossFormula::ChezyManning: out << "HEADLOSS C-M\n"; break;
  }
  out << "\n[TIMES]\n";
  out << "DURATION " << f(m.times.duration_h) << '\n';
  out << "HYDRAULIC TIMESTEP " << f(m.times.time_step_h) << '\n';
  out << "\n[END]\n";
  return out.str();
}

}  // namespace wdsgen
