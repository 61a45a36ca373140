#include <gtest/gtest.h>

#include <sstream>

#include "gasadapt/errors.hpp"
#include "gasadapt/fixtures.hpp"
#include "gasadapt/io.hpp"

using namespace gasadapt;

namespace {

const char* kMinimal = R"({
  "format_version": 1,
  "nodes": [
    {"id": "A", "kind": "entry", "pressure_min": 4000000, "pressure_max": 6000000},
    {"id": "B", "kind": "exit", "pressure_min": 4000000, "pressure_max": 6000000}
  ],
  "pipes": [{"id": "P", "from": "A", "to": "B", "length": 10000, "diameter": 0.6, "friction": 0.01}]
})";

std::size_t count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

}  // namespace

TEST(Io, MinimalNetwork) {
  const auto doc = parse_network(kMinimal);
  EXPECT_EQ(doc.network.nodes().size(), 2u);
  ASSERT_EQ(doc.network.pipes().size(), 1u);
  EXPECT_NEAR(doc.network.pipes()[0].cross_area, circle_area(0.6), 1e-15);
  EXPECT_EQ(doc.gas.temperature, GasParameters{}.temperature);
}

TEST(Io, BarUnits) {
  const auto doc = parse_network(R"({
    "format_version": 1, "units": "bar",
    "nodes": [{"id": "A", "kind": "entry", "pressure_min": 40, "pressure_max": 60},
              {"id": "B", "kind": "exit", "pressure_min": 40, "pressure_max": 60, "elevation": 100}],
    "pipes": [{"id": "P", "from": "A", "to": "B", "length": 10000, "diameter": 0.6, "roughness": 1.2e-5}],
    "compressors": [{"id": "C", "from": "B", "to": "A", "lift_max": 20, "cost": 1}]
  })");
  EXPECT_EQ(doc.network.nodes()[0].pressure_min, 40e5);
  EXPECT_EQ(doc.network.nodes()[1].pressure_max, 60e5);
  EXPECT_EQ(doc.network.compressors()[0].lift_max, 20e5);
  EXPECT_DOUBLE_EQ(doc.network.compressors()[0].cost_coeff, 1e-5);
  EXPECT_DOUBLE_EQ(doc.network.pipes()[0].friction, nikuradse_friction(0.6, 1.2e-5));
  EXPECT_DOUBLE_EQ(slope_of(doc.network.pipes()[0], doc.network), 0.01);
}

TEST(Io, MalformedJsonReportsLine) {
  try {
    parse_network("{\n  \"nodes\": [\n    {\"id\": }\n  ]\n}", "net.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("net.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Io, FieldErrorsNameTheField) {
  try {
    parse_network(R"({"nodes": [{"id": "A", "pressure_min": "x", "pressure_max": 1}]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("nodes[0].pressure_min"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_network(R"({"format_version": 2, "nodes": []})"), ParseError);
  EXPECT_THROW(parse_network(R"({"units": "psi", "nodes": []})"), ParseError);
  EXPECT_THROW(parse_network(
                   R"({"nodes": [{"id": "A", "pressure_min": 1, "pressure_max": 2}],
                       "pipes": [{"id": "P", "from": "A", "to": "B", "length": 1, "diameter": 1}]})"),
               ParseError);
}

TEST(Io, ValidationErrorsAreAggregated) {
  try {
    parse_network(R"({"nodes": [{"id": "A", "pressure_min": 5, "pressure_max": 1}],
                      "pipes": [{"id": "P", "from": "A", "to": "X", "length": 1, "diameter": 1, "friction": 0.01}]})");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("bound inversion"), std::string::npos);
    EXPECT_NE(w.find("dangling endpoint 'X'"), std::string::npos);
  }
}

TEST(Io, NetworkRoundTripIsBitExact) {
  for (const auto& name : fixture_names()) {
    const auto f = make_fixture(name);
    const auto text = network_to_json(f.network, f.gas);
    const auto back = parse_network(text);
    ASSERT_EQ(back.network.pipes().size(), f.network.pipes().size());
    for (std::size_t i = 0; i < f.network.pipes().size(); ++i) {
      const auto& a = f.network.pipes()[i];
      const auto& b = back.network.pipes()[i];
      EXPECT_EQ(a.length, b.length);
      EXPECT_EQ(a.diameter, b.diameter);
      EXPECT_EQ(a.cross_area, b.cross_area);
      EXPECT_EQ(a.friction, b.friction);
      EXPECT_EQ(a.roughness, b.roughness);
      EXPECT_EQ(a.flow_min, b.flow_min);
      EXPECT_EQ(a.flow_max, b.flow_max);
    }
    for (std::size_t i = 0; i < f.network.nodes().size(); ++i) {
      EXPECT_EQ(f.network.nodes()[i].pressure_min, back.network.nodes()[i].pressure_min);
      EXPECT_EQ(f.network.nodes()[i].pressure_max, back.network.nodes()[i].pressure_max);
      EXPECT_EQ(f.network.nodes()[i].elevation, back.network.nodes()[i].elevation);
      EXPECT_EQ(f.network.nodes()[i].kind, back.network.nodes()[i].kind);
    }
    for (std::size_t i = 0; i < f.network.compressors().size(); ++i) {
      EXPECT_EQ(f.network.compressors()[i].lift_max, back.network.compressors()[i].lift_max);
      EXPECT_EQ(f.network.compressors()[i].cost_coeff, back.network.compressors()[i].cost_coeff);
    }
    EXPECT_EQ(network_to_json(back.network, back.gas), text);
    const auto scn = parse_scenario(scenario_to_json(f.scenario));
    EXPECT_EQ(scn.boundary_flows, f.scenario.boundary_flows);
  }
}

TEST(Io, Config) {
  const auto c = parse_config(R"({"format_version": 1, "eps_bar": 1e-4, "mu": 5, "theta_d": 0.6})");
  EXPECT_DOUBLE_EQ(c.eps, 10.0);
  EXPECT_EQ(c.mu, 5);
  EXPECT_EQ(c.theta_d, 0.6);
  EXPECT_EQ(c.theta_m, 0.7);
  EXPECT_THROW(parse_config(R"({"epsilon": 1})"), ParseError);
  const auto back = parse_config(config_to_json(c));
  EXPECT_EQ(back.eps, c.eps);
  EXPECT_EQ(back.mu, c.mu);
}

TEST(Io, TraceHasFifteenColumns) {
  std::vector<TraceRecord> trace(3);
  trace[1].solve_index = 1;
  trace[2].solve_index = 2;
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "solve_index,outer_k,inner_j,n_vars,n_cons,nlp_seconds,ivp_seconds,sum_eta_d,sum_eta_m,sum_eta,avg_eta,"
            "n_refined,n_switched_up,n_coarsened,n_switched_down");
  int rows = 0;
  do {
    EXPECT_EQ(count(line, ',') + 1, static_cast<std::size_t>(kTraceColumns));
    ++rows;
  } while (std::getline(in, line));
  EXPECT_EQ(rows, 4);
}

TEST(Io, SolutionRoundTrip) {
  const auto f = chain_5();
  NlpSolution s;
  s.status = NlpStatus::LocalOptimum;
  for (const auto& n : f.network.nodes()) s.node_pressures[n.id] = 50e5 + n.elevation;
  for (const auto& p : f.network.pipes()) {
    s.arc_flows[p.id] = 60.0;
    s.state[p.id] = {ModelLevel::NoRam, 8};
    s.pipe_profiles[p.id] = std::vector<double>(9, 50e5);
  }
  s.arc_flows["c1"] = 60.0;
  s.lifts["c1"] = 3e5;
  const auto back = parse_solution(solution_to_json(s, f.network));
  EXPECT_EQ(back.node_pressures, s.node_pressures);
  EXPECT_EQ(back.arc_flows, s.arc_flows);
  EXPECT_EQ(back.lifts, s.lifts);
  EXPECT_EQ(back.state, s.state);
}

TEST(Io, MissingFile) { EXPECT_THROW(load_network("/nonexistent/net.json"), IoError); }
