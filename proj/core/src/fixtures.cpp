#include "gasadapt/fixtures.hpp"

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

constexpr double kRoughness = 1.2e-5;  // m
constexpr double kInnerMin = bar_to_pascal(10.0);
constexpr double kInnerMax = bar_to_pascal(90.0);

Node inner(const std::string& id, double elevation) {
  return {id, NodeKind::Inner, kInnerMin, kInnerMax, elevation};
}

Node boundary(const std::string& id, NodeKind kind, double pmin_bar, double pmax_bar, double elevation) {
  return {id, kind, bar_to_pascal(pmin_bar), bar_to_pascal(pmax_bar), elevation};
}

Pipe pipe(const std::string& id, const std::string& from, const std::string& to, double length, double diameter) {
  Pipe p;
  p.id = id;
  p.from = from;
  p.to = to;
  p.length = length;
  p.diameter = diameter;
  p.cross_area = circle_area(diameter);
  p.roughness = kRoughness;
  p.friction = nikuradse_friction(diameter, kRoughness);
  return p;
}

Compressor compressor(const std::string& id, const std::string& from, const std::string& to, double lift_max_bar,
                      double cost_per_bar) {
  Compressor c;
  c.id = id;
  c.from = from;
  c.to = to;
  c.lift_max = bar_to_pascal(lift_max_bar);
  c.cost_coeff = cost_per_bar / kPascalPerBar;
  return c;
}

}  // namespace

Fixture chain_5() {
  Fixture f;
  f.name = "chain-5";
  std::vector<Node> nodes = {
      boundary("S", NodeKind::Entry, 40.0, 60.0, 0.0),
      inner("n1", 60.0),
      inner("n2", 30.0),
      inner("n3", 30.0),
      inner("n4", 110.0),
      inner("n5", 40.0),
      boundary("T", NodeKind::Exit, 58.0, 75.0, 10.0),
  };
  std::vector<Pipe> pipes = {
      pipe("p1", "S", "n1", 12000.0, 0.6),  pipe("p2", "n1", "n2", 18000.0, 0.6),
      pipe("p3", "n3", "n4", 15000.0, 0.6), pipe("p4", "n4", "n5", 20000.0, 0.6),
      pipe("p5", "n5", "T", 10000.0, 0.6),
  };
  std::vector<Compressor> comps = {compressor("c1", "n2", "n3", 20.0, 1.0)};
  f.network = Network(std::move(nodes), std::move(pipes), std::move(comps));
  f.scenario.boundary_flows = {{"S", -60.0}, {"T", 60.0}};
  return f;
}

Fixture tree_12() {
  Fixture f;
  f.name = "tree-12";
  std::vector<Node> nodes = {
      boundary("S", NodeKind::Entry, 40.0, 55.0, 0.0),
      inner("t1", 40.0),
      inner("t2", 25.0),
      inner("t3", 25.0),
      inner("t4", 70.0),
      inner("J", 50.0),
      inner("u1", 20.0),
      boundary("u2", NodeKind::Exit, 40.0, 75.0, 35.0),
      boundary("X1", NodeKind::Exit, 45.0, 75.0, 10.0),
      inner("v1", 60.0),
      inner("v2", 60.0),
      inner("v3", 90.0),
      inner("v4", 40.0),
      inner("v5", 75.0),
      boundary("X2", NodeKind::Exit, 50.0, 75.0, 55.0),
  };
  std::vector<Pipe> pipes = {
      pipe("a1", "S", "t1", 30000.0, 1.0),  pipe("a2", "t1", "t2", 35000.0, 1.0),
      pipe("a3", "t3", "t4", 30000.0, 1.0), pipe("a4", "t4", "J", 25000.0, 1.0),
      pipe("b1", "J", "u1", 12000.0, 0.6),  pipe("b2", "u1", "u2", 18000.0, 0.6),
      pipe("b3", "u2", "X1", 14000.0, 0.6), pipe("c1", "J", "v1", 20000.0, 0.6),
      pipe("c2", "v2", "v3", 25000.0, 0.6), pipe("c3", "v3", "v4", 30000.0, 0.6),
      pipe("c4", "v4", "v5", 20000.0, 0.6),  pipe("c5", "v5", "X2", 25000.0, 0.6),
  };
  std::vector<Compressor> comps = {compressor("k1", "t2", "t3", 30.0, 1.0),
                                   compressor("k2", "v1", "v2", 30.0, 1.5)};
  f.network = Network(std::move(nodes), std::move(pipes), std::move(comps));
  f.scenario.boundary_flows = {{"S", -130.0}, {"u2", 30.0}, {"X1", 80.0}, {"X2", 20.0}};
  return f;
}

std::vector<std::string> fixture_names() { return {"chain-5", "tree-12"}; }

Fixture make_fixture(const std::string& name) {
  if (name == "chain-5") return chain_5();
  if (name == "tree-12") return tree_12();
  throw InvalidArgumentError("unknown fixture '" + name + "' (expected chain-5 or tree-12)");
}

}  // namespace gasadapt
