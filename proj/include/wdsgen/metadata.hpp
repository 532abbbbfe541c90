#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "wdsgen/network.hpp"
#include "wdsgen/parameters.hpp"
#include "wdsgen/profiler.hpp"
#include "wdsgen/run_config.hpp"

namespace wdsgen {

// The metadata document: a Markdown file whose fenced YAML block carries
// every run/dataset key, including the network topology (adj_list as
// (source node, adjacent link, destination node) tuples), the per-component
// parameter registries (okeys/odims/onames), and the accepted-scenario
// index tracers used for resume.
inline YAML::Node build_metadata(const RunConfig& run, const NetworkModel& model,
                                 const std::vector<long long>& index_tracers) {
  YAML::Node n = run_config_to_yaml(run);
  n["index_tracers"] = index_tracers;

  YAML::Node adj(YAML::NodeType::Sequence);
  for (const auto& [src, link, dst] : model.adjacency()) {
    YAML::Node t(YAML::NodeType::Sequence);
    t.SetStyle(YAML::EmitterStyle::Flow);
    t.push_back(src);
    t.push_back(link);
    t.push_back(dst);
    adj.push_back(t);
  }
  n["adj_list"] = adj;

  // Parameter registries per component: names, ids, and dimensions.
  const auto prof = profile_network(model);
  YAML::Node okeys, odims, onames;
  for (const auto& [id, st] : prof.parameters) {
    const auto& info = parameter_info(id);
    const std::string comp(info.component);
    okeys[comp].push_back(id);
    odims[comp].push_back(static_cast<int>(st.dimension));
  }
  auto name_list = [](const auto& items) {
    std::vector<std::string> v;
    for (const auto& it : items) v.push_back(it.name);
    return v;
  };
  if (!model.junctions.empty()) onames["junction"] = name_list(model.junctions);
  if (!model.reservoirs.empty()) onames["reservoir"] = name_list(model.reservoirs);
  if (!model.tanks.empty()) onames["tank"] = name_list(model.tanks);
  if (!model.pipes.empty()) onames["pipe"] = name_list(model.pipes);
  for (const auto& p : model.pumps)
    onames[p.kind == PumpKind::Head ? "head_pump" : "power_pump"].push_back(p.name);
  for (const auto& v : model.valves) {
    const char* comp = v.kind == ValveKind::PRV   ? "prv"
                       : v.kind == ValveKind::PSV ? "psv"
                       : v.kind == ValveKind::FCV ? "fcv"
                       : v.kind == ValveKind::TCV ? "tcv"
                       : v.kind == ValveKind::GPV ? "gpv"
                                                  : "pbv";
    onames[comp].push_back(v.name);
  }
  n["okeys"] = okeys;
  n["odims"] = odims;
  n["onames"] = onames;

  // Tune maps exist for every valve class the metadata schema names, even
  // when the network has none of them.
  for (const char* tune : {"junction_tune", "reservoir_tune", "tank_tune", "pipe_tune",
                           "head_pump_tune", "power_pump_tune", "prv_tune", "psv_tune",
                           "fcv_tune", "tcv_tune", "gpv_tune", "pbv_tune"})
    if (!n[tune]) n[tune] = YAML::Node(YAML::NodeType::Map);
  return n;
}

inline std::string write_metadata_markdown(const YAML::Node& meta,
                                           const std::string& dataset_name) {
  YAML::Emitter em;
  em << meta;
  std::ostringstream out;
  out << "# " << dataset_name << "\n\n";
  out << "Scenario dataset generated from a water distribution network "
         "baseline. All run parameters, the network topology, and the "
         "accepted-scenario indices are recorded below.\n\n";
  out << "```yaml\n" << em.c_str() << "\n```\n";
  return out.str();
}

// Extract the fenced YAML block back out of the markdown document.
inline YAML::Node parse_metadata_markdown(const std::string& text) {
  const auto open = text.find("```yaml\n");
  if (open == std::string::npos) throw std::runtime_error("metadata: no yaml block");
  const auto body = open + 8;
  const auto close = text.find("\n```", body);
  if (close == std::string::npos) throw std::runtime_error("metadata: unterminated yaml block");
  return YAML::Load(text.substr(body, close - body));
}

}  // namespace wdsgen
