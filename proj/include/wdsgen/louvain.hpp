#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wdsgen/network.hpp"
#include "wdsgen/rng.hpp"

namespace wdsgen {

// Undirected weighted graph in index form.
struct WeightedGraph {
  std::size_t node_count = 0;
  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> edges;
};

namespace detail {

struct LouvainLevel {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj; // neighbor, weight
  std::vector<double> self_loop;  // contracted intra-community weight
  std::vector<double> degree;     // weighted degree incl. 2*self_loop
  double total_weight = 0.0;      // m: sum of edge weights incl. self loops

  explicit LouvainLevel(const WeightedGraph& g) {
    adj.resize(g.node_count);
    self_loop.assign(g.node_count, 0.0);
    degree.assign(g.node_count, 0.0);
    for (const auto& e : g.edges) {
      if (e.a == e.b) {
        self_loop[e.a] += e.w;
        degree[e.a] += 2.0 * e.w;
      } else {
        adj[e.a].emplace_back(e.b, e.w);
        adj[e.b].emplace_back(e.a, e.w);
        degree[e.a] += e.w;
        degree[e.b] += e.w;
      }
      total_weight += e.w;
    }
  }
};

}  // namespace detail

// Modularity of a partition with resolution gamma:
//   Q = sum_c [ in_c / (2m) - gamma * (tot_c / (2m))^2 ]
// where in_c counts intra-community edge weight twice.
inline double modularity(const WeightedGraph& g, std::span<const std::size_t> community,
                         double gamma = 1.0) {
  double m = 0.0;
  for (const auto& e : g.edges) m += e.w;
  if (m <= 0.0) return 0.0;
  std::map<std::size_t, double> inw, tot;
  for (const auto& e : g.edges) {
    tot[community[e.a]] += e.w;
    tot[community[e.b]] += e.w;
    if (community[e.a] == community[e.b]) inw[community[e.a]] += 2.0 * e.w;
  }
  double q = 0.0;
  for (const auto& [c, t] : tot) {
    const double in_c = inw.count(c) ? inw.at(c) : 0.0;
    q += in_c / (2.0 * m) - gamma * (t / (2.0 * m)) * (t / (2.0 * m));
  }
  return q;
}

// Two-phase Louvain. Phase 1 greedily moves nodes to the neighboring
// community with the largest positive modularity gain
//   dQ = k_i_to_C / m - gamma * k_i * tot_C / (2 m^2)
// (the undirected specialization, in- and out-degrees coinciding); phase 2
// contracts communities into nodes with summed edge weights and repeats.
// Stops when a full pass gains less than `threshold`. The node visit order
// is a seed-derived permutation, so results are reproducible.
inline std::vector<std::size_t> louvain_communities(const WeightedGraph& g, double gamma,
                                                    double threshold, std::uint64_t seed) {
  const std::size_t n = g.node_count;
  std::vector<std::size_t> node_to_final(n);
  std::iota(node_to_final.begin(), node_to_final.end(), 0u);
  if (n == 0) return node_to_final;

  WeightedGraph level_graph = g;
  Rng rng(seed);

  while (true) {
    detail::LouvainLevel lv(level_graph);
    const std::size_t ln = level_graph.node_count;
    const double m = lv.total_weight;
    std::vector<std::size_t> comm(ln);
    std::iota(comm.begin(), comm.end(), 0u);
    if (m <= 0.0) break;

    std::vector<double> tot = lv.degree; // community total degree
    std::vector<std::size_t> order(ln);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);

    double level_gain = 0.0;
    bool moved_any = true;
    while (moved_any) {
      moved_any = false;
      for (const std::size_t i : order) {
        const std::size_t old_c = comm[i];
        // Weight from i into each neighboring community.
        std::map<std::size_t, double> links;
        for (const auto& [j, w] : lv.adj[i]) links[comm[j]] += w;

        tot[old_c] -= lv.degree[i];
        const double k_i = lv.degree[i];
        const double base = links.count(old_c) ? links[old_c] : 0.0;
        const double remove_cost = base / m - gamma * k_i * tot[old_c] / (2.0 * m * m);

        std::size_t best_c = old_c;
        double best_gain = 0.0;
        for (const auto& [c, w_ic] : links) {
          const double gain =
              (w_ic / m - gamma * k_i * tot[c] / (2.0 * m * m)) - remove_cost;
          if (gain > best_gain + 1e-15) {
            best_gain = gain;
            best_c = c;
          }
        }
        tot[best_c] += lv.degree[i];
        if (best_c != old_c) {
          comm[i] = best_c;
          moved_any = true;
          level_gain += best_gain;
        }
      }
    }

    // Compact community ids.
    std::map<std::size_t, std::size_t> remap;
    for (const std::size_t c : comm)
      if (!remap.count(c)) {
        const std::size_t id = remap.size();
        remap[c] = id;
      }
    for (auto& c : comm) c = remap[c];
    const std::size_t n_comm = remap.size();

    for (auto& f : node_to_final) f = comm[f];
    if (n_comm == ln || level_gain < threshold) break;

    // Phase 2: contract.
    WeightedGraph contracted;
    contracted.node_count = n_comm;
    std::map<std::pair<std::size_t, std::size_t>, double> agg;
    for (const auto& e : level_graph.edges) {
      auto a = comm[e.a], b = comm[e.b];
      if (a > b) std::swap(a, b);
      agg[{a, b}] += e.w;
    }
    for (const auto& [key, w] : agg)
      contracted.edges.push_back({key.first, key.second, w});
    level_graph = std::move(contracted);
  }
  return node_to_final;
}

// Build the undirected topology graph over all model nodes (unit edge
// weights) and return per-junction community ids.
inline std::map<std::string, std::size_t> junction_communities(const NetworkModel& m,
                                                               double gamma,
                                                               double threshold,
                                                               std::uint64_t seed) {
  const auto names = m.node_names();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;

  WeightedGraph g;
  g.node_count = names.size();
  for (const auto& [a, link, b] : m.adjacency())
    g.edges.push_back({index.at(a), index.at(b), 1.0});

  const auto comm = louvain_communities(g, gamma, threshold, seed);
  std::map<std::string, std::size_t> out;
  for (const auto& j : m.junctions) out[j.name] = comm[index.at(j.name)];
  return out;
}

}  // namespace wdsgen
