#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wdsgen/text.hpp"

namespace wdsgen {

// Dataset naming and table-shape rules.
//   folder:  <network>_<capacity>_<duration>      e.g. hanoi_1GB_24H
//   file:    <component>_<parameter>_<index>_<type>_<io>.csv
// Static tables are (num_scenarios x num_components); pattern tables
// ((num_scenarios * num_snapshots) x num_components); curve tables
// ((num_scenarios * num_curve_points) x num_components).
namespace layout {

inline const std::vector<std::string>& known_components() {
  static const std::vector<std::string> c{
      "head_pump", "power_pump", "junction", "reservoir",
      "tank",      "pipe",       "prv",      "psv",
      "fcv",       "tcv"};
  return c;
}

inline std::string duration_token(double duration_h) {
  return duration_h == 8760.0 ? "1Y" : "24H";
}

inline std::string folder_name(const std::string& network, int capacity_gb,
                               double duration_h) {
  return network + "_" + std::to_string(capacity_gb) + "GB_" + duration_token(duration_h);
}

struct ParsedFolder {
  std::string network;
  int capacity_gb = 0;
  std::string duration;
};

inline std::optional<ParsedFolder> parse_folder_name(std::string_view name) {
  const auto last = name.rfind('_');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  const auto mid = name.rfind('_', last - 1);
  if (mid == std::string_view::npos) return std::nullopt;
  ParsedFolder out;
  out.network = std::string(name.substr(0, mid));
  const auto cap = name.substr(mid + 1, last - mid - 1);
  out.duration = std::string(name.substr(last + 1));
  if (out.duration != "24H" && out.duration != "1Y") return std::nullopt;
  if (cap.size() < 3 || cap.substr(cap.size() - 2) != "GB") return std::nullopt;
  const auto n = text::parse_int(cap.substr(0, cap.size() - 2));
  if (!n || *n < 0) return std::nullopt;
  out.capacity_gb = static_cast<int>(*n);
  return out;
}

inline std::string file_name(const std::string& component, const std::string& parameter,
                             int shard, const std::string& type, const std::string& io) {
  return component + "_" + parameter + "_" + std::to_string(shard) + "_" + type + "_" + io +
         ".csv";
}

struct ParsedFile {
  std::string component;
  std::string parameter;
  int shard = 0;
  std::string type; // curve | static | dynamic
  std::string io;   // input | output
};

// The five-token grammar read from the right; the component token is
// resolved against the known component list (component names themselves
// contain underscores).
inline std::optional<ParsedFile> parse_file_name(std::string_view name) {
  if (name.size() > 4 && name.substr(name.size() - 4) == ".csv")
    name.remove_suffix(4);
  ParsedFile out;
  auto take_last = [&name]() -> std::optional<std::string> {
    const auto pos = name.rfind('_');
    if (pos == std::string_view::npos) return std::nullopt;
    std::string tok(name.substr(pos + 1));
    name.remove_suffix(tok.size() + 1);
    return tok;
  };
  const auto io = take_last();
  if (!io || (*io != "input" && *io != "output")) return std::nullopt;
  out.io = *io;
  const auto type = take_last();
  if (!type || (*type != "curve" && *type != "static" && *type != "dynamic"))
    return std::nullopt;
  out.type = *type;
  const auto shard = take_last();
  if (!shard) return std::nullopt;
  const auto n = text::parse_int(*shard);
  if (!n || *n < 0) return std::nullopt;
  out.shard = static_cast<int>(*n);
  // Longest known component prefix wins.
  std::string best;
  for (const auto& comp : known_components())
    if (name.size() > comp.size() + 1 && name.substr(0, comp.size()) == comp &&
        name[comp.size()] == '_' && comp.size() > best.size())
      best = comp;
  if (best.empty()) return std::nullopt;
  out.component = best;
  out.parameter = std::string(name.substr(best.size() + 1));
  if (out.parameter.empty()) return std::nullopt;
  return out;
}

inline std::size_t expected_rows(const std::string& type, std::size_t num_scenarios,
                                 std::size_t num_snapshots, std::size_t num_curve_points) {
  if (type == "static") return num_scenarios;
  if (type == "dynamic") return num_scenarios * num_snapshots;
  return num_scenarios * num_curve_points;
}

}  // namespace layout
}  // namespace wdsgen
