#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "wdsgen/network.hpp"

namespace wdsgen {

struct NoFixedHead : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedValveBehavior : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kGravity = 9.80665;         // m/s^2
constexpr double kWaterViscosity = 1.004e-6; // m^2/s at 20 C
constexpr double kLowFlow = 1e-7;            // m^3/s, headloss linearized below

struct HeadlossResult {
  double head_loss = 0.0;       // m, signed like the flow
  double friction_factor = 0.0; // equivalent Darcy-Weisbach factor
};

namespace detail {

inline double pipe_area(double diameter) {
  return std::numbers::pi * diameter * diameter / 4.0;
}

// Swamee-Jain friction factor; laminar below Re 2000, blended up to 4000.
inline double darcy_friction(double reynolds, double rel_roughness) {
  if (reynolds < 1e-8) return 0.0;
  auto turbulent = [&](double re) {
    const double l = std::log10(rel_roughness / 3.7 + 5.74 / std::pow(re, 0.9));
    return 0.25 / (l * l);
  };
  if (reynolds < 2000.0) return 64.0 / reynolds;
  if (reynolds > 4000.0) return turbulent(reynolds);
  const double f_lam = 64.0 / 2000.0;
  const double f_turb = turbulent(4000.0);
  return f_lam + (reynolds - 2000.0) / 2000.0 * (f_turb - f_lam);
}

// hl = (r |q|^(n-1) + minor |q|) q for one pipe. Darcy-Weisbach folds the
// flow-dependent friction factor into r, so r is recomputed per evaluation.
struct PipeHydraulics {
  double r = 0.0;
  double n = 2.0;
  double minor = 0.0;
};

inline PipeHydraulics pipe_resistance(const Pipe& p, HeadlossFormula formula, double flow) {
  PipeHydraulics out;
  const double area = pipe_area(p.diameter);
  out.minor = p.minor_loss / (2.0 * kGravity * area * area);
  switch (formula) {
    case HeadlossFormula::HazenWilliams:
      out.n = 1.852;
      out.r = 10.667 * std::pow(p.roughness, -1.852) * std::pow(p.diameter, -4.871) * p.length;
      break;
    case HeadlossFormula::DarcyWeisbach: {
      out.n = 2.0;
      const double v = std::abs(flow) / area;
      double re = v * p.diameter / kWaterViscosity;
      if (re < 1.0) re = 4000.0; // seed slope before flows develop
      const double f = darcy_friction(re, (p.roughness * 1e-3) / p.diameter);
      out.r = f * p.length / (p.diameter * 2.0 * kGravity * area * area);
      break;
    }
    case HeadlossFormula::ChezyManning: {
      out.n = 2.0;
      const double rh = p.diameter / 4.0;
      out.r = p.roughness * p.roughness * p.length /
              (area * area * std::pow(rh, 4.0 / 3.0));
      break;
    }
  }
  return out;
}

}  // namespace detail

// Friction headloss of one pipe at the given flow, odd in the flow, plus the
// equivalent Darcy-Weisbach friction factor (0 below the low-flow cutoff,
// where the equivalent factor is undefined).
inline HeadlossResult headloss(double flow, const Pipe& pipe, HeadlossFormula formula) {
  const auto h = detail::pipe_resistance(pipe, formula, flow);
  const double aq = std::abs(flow);
  HeadlossResult out;
  out.head_loss = (h.r * std::pow(aq, h.n - 1.0) + h.minor * aq) * flow;
  if (aq >= kLowFlow) {
    const double area = detail::pipe_area(pipe.diameter);
    out.friction_factor = std::abs(out.head_loss) * pipe.diameter * 2.0 * kGravity *
                          area * area / (pipe.length * aq * aq);
  }
  return out;
}

// Full network state at one time step. Node order: junctions, reservoirs,
// tanks; link order: pipes, pumps, valves.
struct HydraulicState {
  std::vector<double> node_head;
  std::vector<double> node_pressure;
  std::vector<double> node_demand;
  std::vector<double> link_flow;
  std::vector<double> link_velocity;
  std::vector<double> link_headloss;
  std::vector<double> link_friction;
};

struct SolverOptions {
  double head_tol = 1e-8; // m
  double flow_tol = 1e-8; // m^3/s
  int max_iterations = 200;
  double damping = 0.6;
};

// Demand-driven steady state: Newton iteration on nodal continuity with the
// link energy equations linearized per iteration (global gradient scheme).
// Junction heads are the unknowns; reservoirs and tanks hold fixed heads.
// Active PRV/PSV valves pin their controlled junction's head through a
// diagonal penalty and carry whatever flow closes that node's balance; FCV
// valves inject their set flow directly.
class SteadyStateSolver {
public:
  explicit SteadyStateSolver(const NetworkModel& m, SolverOptions opts = {})
      : model_(m), opts_(opts) {
    if (!m.si) throw InvalidModel("solver requires an SI model");
    build_index();
    build_links();
    if (fixed_count_ == 0) throw NoFixedHead("network has no reservoir or tank");
    check_connectivity();
  }

  std::size_t junction_count() const { return model_.junctions.size(); }
  const std::vector<std::string>& node_names() const { return node_names_; }
  const std::vector<std::string>& link_names() const { return link_names_; }

  // junction_demands by junction index, m^3/s; fixed_heads by fixed-node
  // slot (reservoirs then tanks), m.
  HydraulicState solve(std::span<const double> junction_demands,
                       std::span<const double> fixed_heads) const {
    const std::size_t nj = model_.junctions.size();
    const std::size_t nn = node_names_.size();
    if (junction_demands.size() != nj || fixed_heads.size() != fixed_count_)
      throw std::invalid_argument("solver input size mismatch");

    std::vector<double> head(nn, 0.0);
    double mean_fixed = 0.0;
    for (std::size_t i = 0; i < fixed_count_; ++i) {
      head[nj + i] = fixed_heads[i];
      mean_fixed += fixed_heads[i];
    }
    mean_fixed /= static_cast<double>(fixed_count_);
    for (std::size_t i = 0; i < nj; ++i)
      head[i] = std::isnan(pin_head_[i]) ? mean_fixed : pin_head_[i];

    std::vector<double> q(links_.size(), 0.0);
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto& lk = links_[l];
      if (lk.blocked) continue;
      switch (lk.kind) {
        case LinkKind::PumpLink: q[l] = 1e-3; break;
        case LinkKind::FcvLink: q[l] = lk.setting; break;
        default: q[l] = 0.3 * detail::pipe_area(std::max(lk.diameter, 0.05));
      }
    }

    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(nj), static_cast<Eigen::Index>(nj));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nj));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    std::vector<Eigen::Triplet<double>> trip;
    bool pattern_ready = false;

    bool converged = false;
    for (int iter = 0; iter < opts_.max_iterations && !converged; ++iter) {
      trip.clear();
      rhs.setZero();
      for (std::size_t i = 0; i < nj; ++i)
        rhs(static_cast<Eigen::Index>(i)) -= junction_demands[i];

      // Constant-flow links (FCV, active PRV/PSV) enter as injections.
      for (std::size_t l = 0; l < links_.size(); ++l) {
        const auto& lk = links_[l];
        if (lk.blocked || !lk.constant_flow()) continue;
        if (lk.from < static_cast<int>(nj)) rhs(lk.from) -= q[l];
        if (lk.to < static_cast<int>(nj)) rhs(lk.to) += q[l];
      }

      std::vector<bool> touched(nj, false);
      for (std::size_t l = 0; l < links_.size(); ++l) {
        const auto& lk = links_[l];
        if (lk.blocked || lk.constant_flow()) continue;
        const auto [hl, grad] = linearized_headloss(lk, q[l]);
        const double p = 1.0 / grad;
        const double y = q[l] - hl / grad;
        const int f = lk.from, t = lk.to;
        const bool fu = f < static_cast<int>(nj);
        const bool tu = t < static_cast<int>(nj);
        if (fu) {
          touched[static_cast<std::size_t>(f)] = true;
          trip.emplace_back(f, f, p);
          rhs(f) -= y;
          if (tu) trip.emplace_back(f, t, -p);
          else rhs(f) += p * head[static_cast<std::size_t>(t)];
        }
        if (tu) {
          touched[static_cast<std::size_t>(t)] = true;
          trip.emplace_back(t, t, p);
          rhs(t) += y;
          if (fu) trip.emplace_back(t, f, -p);
          else rhs(t) += p * head[static_cast<std::size_t>(f)];
        }
      }

      // Head pins (active PRV/PSV) and isolated nodes.
      for (std::size_t i = 0; i < nj; ++i) {
        if (!std::isnan(pin_head_[i])) {
          trip.emplace_back(static_cast<int>(i), static_cast<int>(i), kPenalty);
          rhs(static_cast<Eigen::Index>(i)) += kPenalty * pin_head_[i];
        } else if (!touched[i]) {
          trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
          rhs(static_cast<Eigen::Index>(i)) = head[i];
        }
      }

      a.setFromTriplets(trip.begin(), trip.end());
      if (!pattern_ready) {
        ldlt.analyzePattern(a);
        pattern_ready = true;
      }
      ldlt.factorize(a);
      if (ldlt.info() != Eigen::Success)
        throw NonConvergence("linear solve failed (isolated subnetwork or singular system)");
      const Eigen::VectorXd h_new = ldlt.solve(rhs);

      double dh_max = 0.0;
      for (std::size_t i = 0; i < nj; ++i)
        dh_max = std::max(dh_max, std::abs(h_new(static_cast<Eigen::Index>(i)) - head[i]));

      std::vector<double> q_new = q;
      double dq_max = 0.0;
      auto head_at = [&](int node) {
        return node < static_cast<int>(nj) ? h_new(node) : head[static_cast<std::size_t>(node)];
      };
      for (std::size_t l = 0; l < links_.size(); ++l) {
        const auto& lk = links_[l];
        if (lk.blocked || lk.constant_flow()) continue;
        const auto [hl, grad] = linearized_headloss(lk, q[l]);
        q_new[l] = q[l] + (head_at(lk.from) - head_at(lk.to) - hl) / grad;
        dq_max = std::max(dq_max, std::abs(q_new[l] - q[l]));
      }
      // PRV/PSV flow closes its pinned node's continuity.
      for (std::size_t l = 0; l < links_.size(); ++l) {
        const auto& lk = links_[l];
        if (lk.blocked || !lk.fixes_node_head()) continue;
        const auto pinned =
            static_cast<std::size_t>(lk.kind == LinkKind::PrvLink ? lk.to : lk.from);
        double need = junction_demands[pinned];
        for (std::size_t o = 0; o < links_.size(); ++o) {
          if (o == l || links_[o].blocked) continue;
          if (static_cast<std::size_t>(links_[o].to) == pinned) need -= q_new[o];
          if (static_cast<std::size_t>(links_[o].from) == pinned) need += q_new[o];
        }
        // PRV feeds the pinned node (inflow = +need); PSV drains it.
        const double qv = lk.kind == LinkKind::PrvLink ? need : -need;
        dq_max = std::max(dq_max, std::abs(qv - q_new[l]));
        q_new[l] = qv;
      }

      if (dh_max < opts_.head_tol && dq_max < opts_.flow_tol) {
        for (std::size_t i = 0; i < nj; ++i) head[i] = h_new(static_cast<Eigen::Index>(i));
        q = q_new;
        converged = true;
        break;
      }
      for (std::size_t i = 0; i < nj; ++i)
        head[i] += opts_.damping * (h_new(static_cast<Eigen::Index>(i)) - head[i]);
      for (std::size_t l = 0; l < links_.size(); ++l)
        q[l] += opts_.damping * (q_new[l] - q[l]);
    }
    if (!converged) throw NonConvergence("hydraulic solver did not converge");
    return assemble_state(head, q, junction_demands);
  }

private:
  enum class LinkKind { PipeLink, PumpLink, TcvLink, FcvLink, PrvLink, PsvLink };
  static constexpr double kNoPin = std::numeric_limits<double>::quiet_NaN();
  static constexpr double kPenalty = 1e10;

  struct SolverLink {
    LinkKind kind = LinkKind::PipeLink;
    int from = 0, to = 0;
    double diameter = 0.0;
    bool blocked = false;
    bool check_valve = false;
    const Pipe* pipe = nullptr;
    double pump_a = 0.0, pump_b = 0.0, pump_c = 2.0, pump_speed = 1.0;
    bool pump_power_kind = false;
    double pump_power_kw = 0.0;
    double setting = 0.0;
    double minor = 0.0; // TCV loss coefficient

    bool fixes_node_head() const {
      return kind == LinkKind::PrvLink || kind == LinkKind::PsvLink;
    }
    bool constant_flow() const { return kind == LinkKind::FcvLink || fixes_node_head(); }
  };

  const NetworkModel& model_;
  SolverOptions opts_;
  std::vector<std::string> node_names_;
  std::vector<std::string> link_names_;
  std::map<std::string, int> node_index_;
  std::vector<SolverLink> links_;
  std::size_t fixed_count_ = 0;
  std::vector<double> node_elevation_;
  std::vector<double> pin_head_; // per junction: NaN or pinned head value

  void build_index() {
    for (const auto& j : model_.junctions) {
      node_index_[j.name] = static_cast<int>(node_names_.size());
      node_names_.push_back(j.name);
      node_elevation_.push_back(j.elevation);
    }
    for (const auto& r : model_.reservoirs) {
      node_index_[r.name] = static_cast<int>(node_names_.size());
      node_names_.push_back(r.name);
      node_elevation_.push_back(r.base_head);
    }
    for (const auto& t : model_.tanks) {
      node_index_[t.name] = static_cast<int>(node_names_.size());
      node_names_.push_back(t.name);
      node_elevation_.push_back(t.elevation);
    }
    fixed_count_ = model_.reservoirs.size() + model_.tanks.size();
  }

  void build_links() {
    const auto nj = static_cast<int>(model_.junctions.size());
    for (const auto& p : model_.pipes) {
      SolverLink l;
      l.kind = LinkKind::PipeLink;
      l.from = node_index_.at(p.start);
      l.to = node_index_.at(p.end);
      l.diameter = p.diameter;
      l.blocked = p.status == LinkStatus::Closed;
      l.check_valve = p.status == LinkStatus::CV;
      l.pipe = &p;
      links_.push_back(l);
      link_names_.push_back(p.name);
    }
    for (const auto& p : model_.pumps) {
      SolverLink l;
      l.kind = LinkKind::PumpLink;
      l.from = node_index_.at(p.start);
      l.to = node_index_.at(p.end);
      l.pump_speed = p.base_speed;
      if (p.kind == PumpKind::Power) {
        l.pump_power_kind = true;
        l.pump_power_kw = p.power_kw;
      } else {
        fit_pump_curve(model_.curves.at(p.head_curve), l);
      }
      links_.push_back(l);
      link_names_.push_back(p.name);
    }
    for (const auto& v : model_.valves) {
      if (!valve_supported_for_simulation(v.kind))
        throw UnsupportedValveBehavior("valve " + v.name + " has a kind the solver does not support");
      SolverLink l;
      l.from = node_index_.at(v.start);
      l.to = node_index_.at(v.end);
      l.diameter = v.diameter;
      l.blocked = v.status == LinkStatus::Closed;
      l.setting = v.setting;
      switch (v.kind) {
        case ValveKind::TCV: {
          l.kind = LinkKind::TcvLink;
          const double area = detail::pipe_area(v.diameter);
          l.minor = v.setting / (2.0 * kGravity * area * area);
          break;
        }
        case ValveKind::FCV: l.kind = LinkKind::FcvLink; break;
        case ValveKind::PRV: l.kind = LinkKind::PrvLink; break;
        case ValveKind::PSV: l.kind = LinkKind::PsvLink; break;
        default: break;
      }
      links_.push_back(l);
      link_names_.push_back(v.name);
    }

    pin_head_.assign(model_.junctions.size(), kNoPin);
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto& lk = links_[l];
      if (!lk.fixes_node_head() || lk.blocked) continue;
      const int pinned = lk.kind == LinkKind::PrvLink ? lk.to : lk.from;
      if (pinned >= nj)
        throw UnsupportedValveBehavior("PRV/PSV " + link_names_[l] + " must control a junction");
      if (!std::isnan(pin_head_[static_cast<std::size_t>(pinned)]))
        throw UnsupportedValveBehavior("junction controlled by two PRV/PSV valves");
      pin_head_[static_cast<std::size_t>(pinned)] =
          node_elevation_[static_cast<std::size_t>(pinned)] + lk.setting;
    }
  }

  void check_connectivity() const {
    // Every junction needs a head reference: a path over non-blocked,
    // head-coupled links to a fixed-head node or a PRV/PSV-pinned junction.
    const std::size_t nn = node_names_.size();
    const std::size_t nj = model_.junctions.size();
    std::vector<std::vector<int>> adj(nn);
    for (const auto& lk : links_) {
      if (lk.blocked || lk.constant_flow()) continue;
      adj[static_cast<std::size_t>(lk.from)].push_back(lk.to);
      adj[static_cast<std::size_t>(lk.to)].push_back(lk.from);
    }
    std::vector<bool> seen(nn, false);
    std::vector<int> stack;
    for (std::size_t i = nj; i < nn; ++i) {
      seen[i] = true;
      stack.push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < nj; ++i)
      if (!std::isnan(pin_head_[i])) {
        seen[i] = true;
        stack.push_back(static_cast<int>(i));
      }
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int m : adj[static_cast<std::size_t>(n)])
        if (!seen[static_cast<std::size_t>(m)]) {
          seen[static_cast<std::size_t>(m)] = true;
          stack.push_back(m);
        }
    }
    for (std::size_t i = 0; i < nj; ++i)
      if (!seen[i])
        throw NoFixedHead("junction " + node_names_[i] + " has no head reference");
  }

  static void fit_pump_curve(const CurvePoints& pts, SolverLink& l) {
    if (pts.empty()) throw InvalidModel("pump curve has no points");
    if (pts.size() == 1) {
      // EPANET synthetic rule: shutoff head 4/3 h1 at q 0, zero head at 2 q1.
      const double q1 = pts[0].first, h1 = pts[0].second;
      if (q1 <= 0.0 || h1 <= 0.0) throw InvalidModel("1-point pump curve needs q, h > 0");
      l.pump_a = 4.0 / 3.0 * h1;
      l.pump_c = 2.0;
      l.pump_b = (l.pump_a - h1) / (q1 * q1);
      return;
    }
    // Least-squares h = a - b q^c over a grid of exponents.
    auto fit_ab = [&pts](double c, double& a, double& b) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const auto n = static_cast<double>(pts.size());
      for (const auto& [q, h] : pts) {
        const double x = std::pow(std::max(q, 0.0), c);
        sx += x;
        sy += h;
        sxx += x * x;
        sxy += x * h;
      }
      const double det = n * sxx - sx * sx;
      if (std::abs(det) < 1e-14) return 1e300;
      b = -(n * sxy - sx * sy) / det;
      a = (sy + b * sx) / n;
      double sse = 0;
      for (const auto& [q, h] : pts) {
        const double e = h - (a - b * std::pow(std::max(q, 0.0), c));
        sse += e * e;
      }
      return sse;
    };
    double best_c = 2.0, best_a = -1.0, best_b = -1.0, best_sse = 1e300;
    for (double c = 0.5; c <= 3.0 + 1e-9; c += 0.01) {
      double a = 0, b = 0;
      const double sse = fit_ab(c, a, b);
      if (sse < best_sse && b > 0.0 && a > 0.0) {
        best_sse = sse;
        best_c = c;
        best_a = a;
        best_b = b;
      }
    }
    if (best_a <= 0.0) throw InvalidModel("pump curve is not decreasing");
    l.pump_a = best_a;
    l.pump_b = best_b;
    l.pump_c = best_c;
  }

  // Headloss at the linearization point and its positive gradient.
  std::pair<double, double> linearized_headloss(const SolverLink& lk, double q) const {
    switch (lk.kind) {
      case LinkKind::PipeLink: {
        if (lk.check_valve && q < 0.0) return {1e8 * q, 1e8};
        const auto h = detail::pipe_resistance(*lk.pipe, model_.headloss_formula, q);
        const double aq = std::abs(q);
        if (aq < kLowFlow) {
          const double g =
              h.n * h.r * std::pow(kLowFlow, h.n - 1.0) + 2.0 * h.minor * kLowFlow + 1e-12;
          return {g * q, g};
        }
        const double hl = (h.r * std::pow(aq, h.n - 1.0) + h.minor * aq) * q;
        const double g = h.n * h.r * std::pow(aq, h.n - 1.0) + 2.0 * h.minor * aq;
        return {hl, std::max(g, 1e-12)};
      }
      case LinkKind::PumpLink: {
        const double s = lk.pump_speed;
        if (lk.pump_power_kind) {
          const double qq = std::max(q, 1e-4);
          const double gain = lk.pump_power_kw / (kGravity * qq);
          const double grad = std::max(gain / qq, 1e-4);
          return {-gain + grad * (q - qq), grad};
        }
        const double qq = std::max(q, 1e-6);
        const double gain = s * s * (lk.pump_a - lk.pump_b * std::pow(qq / s, lk.pump_c));
        const double grad = std::max(
            s * lk.pump_b * lk.pump_c * std::pow(qq / s, lk.pump_c - 1.0), 1e-4);
        return {-gain + grad * (q - qq), grad};
      }
      case LinkKind::TcvLink: {
        const double aq = std::abs(q);
        if (aq < kLowFlow) {
          const double g = std::max(2.0 * lk.minor * kLowFlow, 1e-8);
          return {g * q, g};
        }
        return {lk.minor * aq * q, std::max(2.0 * lk.minor * aq, 1e-8)};
      }
      default:
        return {0.0, 1.0};
    }
  }

  HydraulicState assemble_state(const std::vector<double>& head, const std::vector<double>& q,
                                std::span<const double> junction_demands) const {
    HydraulicState st;
    const std::size_t nn = node_names_.size();
    const std::size_t nj = model_.junctions.size();
    st.node_head = head;
    st.node_pressure.resize(nn);
    st.node_demand.assign(nn, 0.0);
    for (std::size_t i = 0; i < nn; ++i) st.node_pressure[i] = head[i] - node_elevation_[i];
    for (std::size_t i = 0; i < nj; ++i) st.node_demand[i] = junction_demands[i];
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto& lk = links_[l];
      if (lk.blocked) continue;
      if (static_cast<std::size_t>(lk.to) >= nj)
        st.node_demand[static_cast<std::size_t>(lk.to)] -= q[l];
      if (static_cast<std::size_t>(lk.from) >= nj)
        st.node_demand[static_cast<std::size_t>(lk.from)] += q[l];
    }

    st.link_flow.assign(links_.size(), 0.0);
    st.link_velocity.assign(links_.size(), 0.0);
    st.link_headloss.assign(links_.size(), 0.0);
    st.link_friction.assign(links_.size(), 0.0);
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto& lk = links_[l];
      if (lk.blocked) continue;
      st.link_flow[l] = q[l];
      if (lk.diameter > 0.0)
        st.link_velocity[l] = std::abs(q[l]) / detail::pipe_area(lk.diameter);
      if (lk.kind == LinkKind::PipeLink) {
        const auto hr = headloss(q[l], *lk.pipe, model_.headloss_formula);
        st.link_headloss[l] = hr.head_loss;
        st.link_friction[l] = hr.friction_factor;
      } else {
        st.link_headloss[l] =
            head[static_cast<std::size_t>(lk.from)] - head[static_cast<std::size_t>(lk.to)];
      }
    }
    return st;
  }
};

// Spec'd free-function form over name-keyed inputs.
inline HydraulicState solve_steady_state(const NetworkModel& model,
                                         const std::map<std::string, double>& junction_demands,
                                         const std::map<std::string, double>& fixed_heads,
                                         SolverOptions opts = {}) {
  SteadyStateSolver solver(model, opts);
  std::vector<double> d(model.junctions.size(), 0.0);
  for (std::size_t i = 0; i < model.junctions.size(); ++i) {
    auto it = junction_demands.find(model.junctions[i].name);
    if (it != junction_demands.end()) d[i] = it->second;
  }
  std::vector<double> fh;
  for (const auto& r : model.reservoirs) {
    auto it = fixed_heads.find(r.name);
    fh.push_back(it != fixed_heads.end() ? it->second : r.base_head);
  }
  for (const auto& t : model.tanks) {
    auto it = fixed_heads.find(t.name);
    fh.push_back(it != fixed_heads.end() ? it->second : t.elevation + t.init_level);
  }
  return solver.solve(d, fh);
}

}  // namespace wdsgen
