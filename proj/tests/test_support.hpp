#pragma once

#include <string>
#include <vector>

#include "gasadapt/network.hpp"
#include "gasadapt/pipe_models.hpp"

namespace gasadapt::testing {

/// Level-3 test pipe: L = 10 km, D = 0.6 m, lambda = 0.01, horizontal.
inline PipeProperties test_pipe(double slope = 0.0) {
  return {10000.0, 0.6, circle_area(0.6), 0.01, slope};
}

inline Pipe make_pipe(const std::string& id, const std::string& from, const std::string& to, double length = 10000.0,
                      double diameter = 0.6, double friction = 0.01) {
  Pipe p;
  p.id = id;
  p.from = from;
  p.to = to;
  p.length = length;
  p.diameter = diameter;
  p.cross_area = circle_area(diameter);
  p.friction = friction;
  return p;
}

inline Node make_node(const std::string& id, NodeKind kind, double pmin, double pmax, double elevation = 0.0) {
  return {id, kind, pmin, pmax, elevation};
}

/// A --pipe--> B with the entry pressure fixed and a free exit pressure.
inline Network single_pipe_network(double p_entry, double slope = 0.0) {
  Pipe p = make_pipe("P", "A", "B");
  if (slope != 0.0) p.slope = slope;
  return Network({make_node("A", NodeKind::Entry, p_entry, p_entry), make_node("B", NodeKind::Exit, 1e5, 100e5)},
                 {p}, {});
}

/// E --compressor--> A --pipe--> X with a fixed entry pressure and an exit
/// lower bound.
inline Network compressor_chain(double p_entry, double p_exit_min, double lift_max, double cost) {
  Compressor c;
  c.id = "C";
  c.from = "E";
  c.to = "A";
  c.lift_max = lift_max;
  c.cost_coeff = cost;
  return Network({make_node("E", NodeKind::Entry, p_entry, p_entry), make_node("A", NodeKind::Inner, 1e5, 150e5),
                  make_node("X", NodeKind::Exit, p_exit_min, 150e5)},
                 {make_pipe("P", "A", "X")}, {c});
}

inline Scenario flows(std::vector<std::pair<std::string, double>> v) {
  Scenario s;
  for (auto& [id, m] : v) s.boundary_flows[id] = m;
  return s;
}

}  // namespace gasadapt::testing
