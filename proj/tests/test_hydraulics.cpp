#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wdsgen/inp_io.hpp"
#include "wdsgen/simulate.hpp"
#include "wdsgen/units.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wdsgen;

namespace {

NetworkModel load_si(const std::string& file) {
  std::ifstream in(std::string(WDSGEN_DATA_DIR) + "/" + file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return convert_to_si(parse_inp(ss.str()));
}

// Max junction mass-balance residual of one snapshot, recomputed from the
// reported flows.
double mass_residual(const NetworkModel& m, const HydraulicState& st) {
  std::map<std::string, double> net;
  const auto adj = m.adjacency();
  for (std::size_t l = 0; l < adj.size(); ++l) {
    net[adj[l][0]] -= st.link_flow[l];
    net[adj[l][2]] += st.link_flow[l];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < m.junctions.size(); ++i)
    worst = std::max(worst, std::abs(net[m.junctions[i].name] - st.node_demand[i]));
  return worst;
}

}  // namespace

TEST_CASE("headloss basics") {
  Pipe p{"P", "a", "b", 1000.0, 0.3, 130.0, 0.0, LinkStatus::Open};
  SECTION("zero flow, zero loss") {
    CHECK(headloss(0.0, p, HeadlossFormula::HazenWilliams).head_loss == 0.0);
  }
  SECTION("hazen-williams spot value") {
    const auto h = headloss(0.1, p, HeadlossFormula::HazenWilliams);
    const double expected = oracle::hazen_williams(0.1, 1000.0, 0.3, 130.0);
    CHECK(h.head_loss == Catch::Approx(expected).epsilon(1e-12));
    CHECK(h.head_loss == Catch::Approx(6.43).epsilon(0.005));
    CHECK(h.friction_factor > 0.0);
  }
  SECTION("odd in the flow") {
    for (double q : {0.01, 0.05, 0.2, 0.7}) {
      const auto pos = headloss(q, p, HeadlossFormula::HazenWilliams).head_loss;
      const auto neg = headloss(-q, p, HeadlossFormula::HazenWilliams).head_loss;
      CHECK(pos == Catch::Approx(-neg).epsilon(1e-12));
      CHECK(pos > 0.0);
    }
  }
  SECTION("monotone in |q|") {
    double prev = 0.0;
    for (double q = 0.01; q < 1.0; q += 0.05) {
      const auto h = headloss(q, p, HeadlossFormula::HazenWilliams).head_loss;
      CHECK(h > prev);
      prev = h;
    }
  }
  SECTION("darcy-weisbach produces a bounded friction factor") {
    Pipe dw{"P", "a", "b", 500.0, 0.25, 0.25, 0.0, LinkStatus::Open}; // 0.25 mm roughness
    const auto h = headloss(0.05, dw, HeadlossFormula::DarcyWeisbach);
    CHECK(h.head_loss > 0.0);
    CHECK(h.friction_factor > 0.005);
    CHECK(h.friction_factor < 0.1);
  }
}

TEST_CASE("single pipe network solves the composed oracle value") {
  const auto m = load_si("two_node.inp");
  SECTION("zero demand means source head everywhere") {
    const auto st = solve_steady_state(m, {{"J1", 0.0}}, {});
    CHECK(st.node_head[0] == Catch::Approx(100.0).margin(1e-6));
    CHECK(std::abs(st.link_flow[0]) < 1e-6);
  }
  SECTION("demand 0.1 drops the head by the pipe loss") {
    const auto st = solve_steady_state(m, {{"J1", 0.1}}, {});
    const double expected_loss = oracle::hazen_williams(0.1, 1000.0, 0.3, 130.0);
    CHECK(st.node_head[0] == Catch::Approx(100.0 - expected_loss).margin(1e-6));
    CHECK(st.link_flow[0] == Catch::Approx(0.1).margin(1e-9));
    CHECK(st.node_pressure[0] == Catch::Approx(st.node_head[0]).margin(1e-12));
  }
}

TEST_CASE("y network splits symmetric flows equally") {
  const auto m = load_si("y_net.inp");
  const auto st = solve_steady_state(m, {{"J1", 0.05}}, {});
  CHECK(st.link_flow[0] == Catch::Approx(0.025).margin(1e-9));
  CHECK(st.link_flow[1] == Catch::Approx(0.025).margin(1e-9));
  CHECK(mass_residual(m, st) < 1e-6);
}

TEST_CASE("solver agrees with the dense finite-difference oracle") {
  // All pipe-only corpus networks with <= 5 nodes.
  for (const auto& file : {"two_node.inp", "y_net.inp", "toy3.inp", "weird.inp"}) {
    INFO(file);
    auto m = load_si(file);
    m.valves.clear(); // weird.inp's closed GPV is outside both solvers
    std::vector<double> demands;
    std::map<std::string, double> fixed;
    for (const auto& j : m.junctions) demands.push_back(j.base_demand);
    for (const auto& r : m.reservoirs) fixed[r.name] = r.base_head;
    REQUIRE(m.node_count() <= 5);

    oracle::DenseSolver ds(m);
    const auto oracle_heads = ds.solve(demands, fixed);

    SteadyStateSolver solver(m);
    std::vector<double> fh;
    for (const auto& r : m.reservoirs) fh.push_back(r.base_head);
    const auto st = solver.solve(demands, fh);
    for (std::size_t i = 0; i < m.junctions.size(); ++i) {
      const double rel = std::abs(st.node_head[i] - oracle_heads[i]) /
                         std::max(1.0, std::abs(oracle_heads[i]));
      CHECK(rel < 1e-6);
    }
    // Flows from the oracle's bisection inversion.
    for (std::size_t l = 0; l < m.pipes.size(); ++l) {
      const auto& p = m.pipes[l];
      auto head_of = [&](const std::string& n) {
        for (std::size_t i = 0; i < m.junctions.size(); ++i)
          if (m.junctions[i].name == n) return oracle_heads[i];
        return fixed.at(n);
      };
      const double oq = ds.pipe_flow(p, head_of(p.start), head_of(p.end));
      CHECK(st.link_flow[l] ==
            Catch::Approx(oq).margin(1e-6 * std::max(1.0, std::abs(oq))));
    }
    CHECK(mass_residual(m, st) < 1e-6);
  }
}

TEST_CASE("energy consistency on flowing pipes") {
  for (const auto& file : {"two_node.inp", "y_net.inp", "toy3.inp", "hanoi.inp"}) {
    INFO(file);
    const auto m = load_si(file);
    std::vector<double> demands;
    for (const auto& j : m.junctions) demands.push_back(j.base_demand);
    std::vector<double> fixed;
    for (const auto& r : m.reservoirs) fixed.push_back(r.base_head);
    SteadyStateSolver solver(m);
    const auto st = solver.solve(demands, fixed);

    std::map<std::string, double> head;
    for (std::size_t i = 0; i < st.node_head.size(); ++i)
      head[solver.node_names()[i]] = st.node_head[i];
    for (std::size_t l = 0; l < m.pipes.size(); ++l) {
      const auto& p = m.pipes[l];
      const double dh = head.at(p.start) - head.at(p.end);
      CHECK(std::abs(dh - st.link_headloss[l]) < 1e-6);
      const auto direct = headloss(st.link_flow[l], p, m.headloss_formula);
      CHECK(std::abs(dh - direct.head_loss) < 1e-6);
    }
  }
}

TEST_CASE("hanoi baseline pressures are positive and physical") {
  const auto m = load_si("hanoi.inp");
  std::vector<double> demands;
  for (const auto& j : m.junctions) demands.push_back(j.base_demand);
  SteadyStateSolver solver(m);
  const auto st = solver.solve(demands, std::vector<double>{100.0});
  for (std::size_t i = 0; i < m.junctions.size(); ++i) {
    CHECK(st.node_pressure[i] > 0.0);
    CHECK(st.node_pressure[i] <= 151.0);
  }
  CHECK(mass_residual(m, st) < 1e-6);
}

TEST_CASE("no fixed head is an error") {
  NetworkModel m;
  m.junctions.push_back({"a", 0, 0.01, ""});
  m.junctions.push_back({"b", 0, 0.01, ""});
  m.pipes.push_back({"p", "a", "b", 100, 0.2, 100, 0, LinkStatus::Open});
  m.si = true;
  CHECK_THROWS_AS(SteadyStateSolver(m), NoFixedHead);
}

TEST_CASE("pump lifts water to a higher junction") {
  const auto m = load_si("tank_pump.inp");
  std::vector<double> demands;
  for (const auto& j : m.junctions) demands.push_back(j.base_demand);
  std::vector<double> fixed;
  for (const auto& r : m.reservoirs) fixed.push_back(r.base_head);
  for (const auto& t : m.tanks) fixed.push_back(t.elevation + t.init_level);
  SteadyStateSolver solver(m);
  const auto st = solver.solve(demands, fixed);
  // Pump must add head: downstream junction sits above the reservoir head.
  const double r_head = m.reservoirs[0].base_head;
  CHECK(st.node_head[0] > r_head);
  // Pump flow positive, pressure at junctions positive.
  const std::size_t pump_idx = m.pipes.size();
  CHECK(st.link_flow[pump_idx] > 0.0);
  CHECK(mass_residual(m, st) < 1e-6);
}

TEST_CASE("one-point pump curve follows the synthetic fit") {
  // Pump between two reservoirs with a known curve: operating point obeys
  // h_gain = a - b q^2 with a = 4/3 h1, b = (a - h1)/q1^2.
  NetworkModel m;
  m.reservoirs.push_back({"LO", 10, ""});
  m.reservoirs.push_back({"HI", 40, ""});
  m.junctions.push_back({"J", 0, 0.0, ""});
  m.curves["C"] = {{0.05, 50.0}};
  m.pumps.push_back({"PU", "LO", "J", PumpKind::Head, "C", 0, 1.0, ""});
  m.pipes.push_back({"P", "J", "HI", 200, 0.3, 120, 0, LinkStatus::Open});
  m.si = true;
  std::vector<double> demands{0.0};
  std::vector<double> fixed{10.0, 40.0};
  SteadyStateSolver solver(m);
  const auto st = solver.solve(demands, fixed);
  const double q = st.link_flow[1];
  const double gain = st.node_head[0] - 10.0;
  const double a = 4.0 / 3.0 * 50.0;
  const double b = (a - 50.0) / (0.05 * 0.05);
  CHECK(gain == Catch::Approx(a - b * q * q).margin(1e-5));
  CHECK(q > 0.0);
}

TEST_CASE("tcv adds its minor loss and fcv pins its flow") {
  const auto m = load_si("valve_net.inp");
  std::vector<double> demands;
  for (const auto& j : m.junctions) demands.push_back(j.base_demand);
  SteadyStateSolver solver(m);
  const auto st = solver.solve(demands, std::vector<double>{80.0});
  const std::size_t v_tcv = m.pipes.size();     // V1
  const std::size_t v_fcv = m.pipes.size() + 1; // V2
  // FCV setting 20 LPS = 0.02 m^3/s.
  CHECK(st.link_flow[v_fcv] == Catch::Approx(0.02).margin(1e-9));
  // TCV headloss equals K v^2 / 2g.
  const double v = st.link_velocity[v_tcv];
  CHECK(st.link_headloss[v_tcv] ==
        Catch::Approx(5.0 * v * v / (2.0 * kGravity)).margin(1e-6));
  CHECK(mass_residual(m, st) < 1e-6);
}

TEST_CASE("prv pins its downstream junction pressure") {
  const auto m = load_si("prv_net.inp");
  std::vector<double> demands;
  for (const auto& j : m.junctions) demands.push_back(j.base_demand);
  SteadyStateSolver solver(m);
  const auto st = solver.solve(demands, std::vector<double>{100.0});
  // J2 is index 1; its pressure must equal the 30 m setting.
  CHECK(st.node_pressure[1] == Catch::Approx(30.0).margin(1e-4));
  // Upstream J1 stays near the reservoir head (small pipe loss).
  CHECK(st.node_head[0] > 90.0);
  CHECK(mass_residual(m, st) < 1e-5);
}

TEST_CASE("simulate_scenario produces one snapshot per step") {
  const auto m = load_si("toy3.inp");
  ScenarioInputs in;
  in.times = {24.0, 1.0};
  auto r = simulate_scenario(m, in);
  CHECK(r.snapshots.size() == 24);
  CHECK(r.valid);
  CHECK(r.converged);

  in.times = {24.0 * 7, 1.0};
  r = simulate_scenario(m, in);
  CHECK(r.snapshots.size() == 168);
}

TEST_CASE("all-zero demands give uniform heads and zero flows") {
  const auto m = load_si("toy3.inp");
  ScenarioInputs in;
  in.times = {4.0, 1.0};
  for (const auto& j : m.junctions) in.demand_multipliers[j.name] = {0.0};
  const auto r = simulate_scenario(m, in);
  REQUIRE(r.valid);
  for (const auto& snap : r.snapshots) {
    for (std::size_t i = 0; i < m.junctions.size(); ++i)
      CHECK(snap.node_head[i] == Catch::Approx(50.0).margin(1e-6));
    for (double q : snap.link_flow) CHECK(std::abs(q) < 1e-6);
  }
}

TEST_CASE("tank level integration conserves volume") {
  const auto m = load_si("tank_pump.inp");
  ScenarioInputs in;
  in.times = {24.0, 1.0};
  const auto r = simulate_scenario(m, in, RuleSet::defaults());
  REQUIRE(r.converged);
  REQUIRE(r.snapshots.size() == 24);
  const std::size_t tank_node = m.junctions.size() + m.reservoirs.size();
  const double area = std::numbers::pi * m.tanks[0].diameter * m.tanks[0].diameter / 4.0;
  // Reconstruct levels: head(t+1) - head(t) = net_inflow(t) * dt / area.
  for (std::size_t t = 0; t + 1 < r.snapshots.size(); ++t) {
    const double level_now = r.snapshots[t].node_head[tank_node] - m.tanks[0].elevation;
    const double level_next = r.snapshots[t + 1].node_head[tank_node] - m.tanks[0].elevation;
    const double net_inflow = -r.snapshots[t].node_demand[tank_node];
    const double predicted = level_now + net_inflow * 3600.0 / area;
    if (predicted >= m.tanks[0].min_level && predicted <= m.tanks[0].max_level)
      CHECK(level_next == Catch::Approx(predicted).margin(1e-9));
  }
}

TEST_CASE("validation rules") {
  const auto m = load_si("toy3.inp");
  ScenarioInputs in;
  in.times = {6.0, 1.0};
  auto r = simulate_scenario(m, in);
  REQUIRE(r.valid);

  SECTION("a single out-of-range pressure flips the verdict") {
    auto rules = RuleSet::defaults();
    r.snapshots[3].node_pressure[1] = -2.0;
    CHECK_FALSE(validate_scenario(r, rules));
    CHECK(r.failure_reason == "pressure_in_range");
    r.snapshots[3].node_pressure[1] = 200.0;
    CHECK_FALSE(validate_scenario(r, rules));
    CHECK(r.failure_reason == "pressure_in_range");
  }
  SECTION("empty rule set is vacuously true") {
    RuleSet empty;
    r.snapshots[0].node_pressure[0] = -99.0;
    CHECK(validate_scenario(r, empty));
  }
  SECTION("time consistency") {
    auto rules = RuleSet::defaults();
    r.snapshots.pop_back();
    CHECK_FALSE(validate_scenario(r, rules));
    CHECK(r.failure_reason == "time_consistency");
  }
  SECTION("skip names are exempt from the pressure rule") {
    auto rules = RuleSet::defaults(0.0, 151.0, {m.junctions[1].name});
    r.snapshots[2].node_pressure[1] = -5.0;
    CHECK(validate_scenario(r, rules));
  }
}

TEST_CASE("scenario results are bitwise deterministic") {
  const auto m = load_si("hanoi.inp");
  ScenarioInputs in;
  in.times = {6.0, 1.0};
  const auto a = simulate_scenario(m, in);
  const auto b = simulate_scenario(m, in);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t t = 0; t < a.snapshots.size(); ++t) {
    CHECK(a.snapshots[t].node_head == b.snapshots[t].node_head);
    CHECK(a.snapshots[t].link_flow == b.snapshots[t].link_flow);
  }
}
