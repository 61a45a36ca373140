#include "gasadapt/network.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

constexpr double kAreaRelTol = 1e-9;
constexpr double kBalanceTol = 1e-9;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Entry: return "entry";
    case NodeKind::Exit: return "exit";
    case NodeKind::Inner: return "inner";
  }
  return "inner";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
  if (s == "entry") return NodeKind::Entry;
  if (s == "exit") return NodeKind::Exit;
  if (s == "inner") return NodeKind::Inner;
  return std::nullopt;
}

double nikuradse_friction(double diameter, double roughness) {
  const double t = 2.0 * std::log10(diameter / roughness) + 1.138;
  return 1.0 / (t * t);
}

double circle_area(double diameter) { return kPi * diameter * diameter / 4.0; }

Network::Network(std::vector<Node> nodes, std::vector<Pipe> pipes, std::vector<Compressor> compressors)
    : nodes_(std::move(nodes)), pipes_(std::move(pipes)), compressors_(std::move(compressors)) {
  reindex();
}

void Network::reindex() {
  node_ix_.clear();
  pipe_ix_.clear();
  comp_ix_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_ix_.emplace(nodes_[i].id, i);
  for (std::size_t i = 0; i < pipes_.size(); ++i) pipe_ix_.emplace(pipes_[i].id, i);
  for (std::size_t i = 0; i < compressors_.size(); ++i) comp_ix_.emplace(compressors_[i].id, i);
}

std::optional<std::size_t> Network::node_index(const std::string& id) const {
  auto it = node_ix_.find(id);
  if (it == node_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::pipe_index(const std::string& id) const {
  auto it = pipe_ix_.find(id);
  if (it == pipe_ix_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::compressor_index(const std::string& id) const {
  auto it = comp_ix_.find(id);
  if (it == comp_ix_.end()) return std::nullopt;
  return it->second;
}

const Node& Network::node(const std::string& id) const {
  auto ix = node_index(id);
  if (!ix) throw InvalidArgumentError("unknown node '" + id + "'");
  return nodes_[*ix];
}

const Pipe& Network::pipe(const std::string& id) const {
  auto ix = pipe_index(id);
  if (!ix) throw InvalidArgumentError("unknown pipe '" + id + "'");
  return pipes_[*ix];
}

double Scenario::flow_at(const std::string& node_id) const {
  auto it = boundary_flows.find(node_id);
  return it == boundary_flows.end() ? 0.0 : it->second;
}

bool ValidationReport::mentions(const std::string& needle) const {
  for (const auto& s : issues)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

ValidationReport validate_gas(const GasParameters& gas) {
  ValidationReport r;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) r.issues.push_back(std::string("gas: ") + name + " must be positive");
  };
  positive(gas.specific_gas_constant, "specific_gas_constant");
  positive(gas.temperature, "temperature");
  positive(gas.compressibility, "compressibility");
  positive(gas.gravity, "gravity");
  return r;
}

ValidationReport validate_network(const Network& net, const Scenario& scn) {
  ValidationReport r;
  auto issue = [&](const std::string& s) { r.issues.push_back(s); };

  std::set<std::string> seen;
  auto unique_id = [&](const std::string& id, const char* what) {
    if (id.empty()) issue(std::string(what) + " with empty id");
    if (!seen.insert(std::string(what) + ":" + id).second)
      issue(std::string("duplicate ") + what + " id '" + id + "'");
  };

  for (const auto& n : net.nodes()) {
    unique_id(n.id, "node");
    if (!(n.pressure_min > 0.0))
      issue("node '" + n.id + "': pressure_min must be positive");
    if (n.pressure_min > n.pressure_max)
      issue("node '" + n.id + "': bound inversion pressure_min > pressure_max");
  }

  std::set<std::string> arc_ids;
  auto arc_endpoints = [&](const std::string& kind, const std::string& id, const std::string& from,
                           const std::string& to) {
    if (!arc_ids.insert(id).second) issue("duplicate arc id '" + id + "'");
    if (!net.node_index(from)) issue(kind + " '" + id + "': dangling endpoint '" + from + "'");
    if (!net.node_index(to)) issue(kind + " '" + id + "': dangling endpoint '" + to + "'");
    if (from == to) issue(kind + " '" + id + "': self-loop at '" + from + "'");
  };

  for (const auto& p : net.pipes()) {
    arc_endpoints("pipe", p.id, p.from, p.to);
    if (!(p.length > 0.0)) issue("pipe '" + p.id + "': length must be positive");
    if (!(p.diameter > 0.0)) {
      issue("pipe '" + p.id + "': diameter must be positive");
    } else {
      const double a = circle_area(p.diameter);
      if (!(std::abs(p.cross_area - a) <= kAreaRelTol * a))
        issue("pipe '" + p.id + "': cross_area inconsistent with diameter");
    }
    if (!(p.friction > 0.0)) issue("pipe '" + p.id + "': friction must be positive");
    if (p.flow_min > p.flow_max) issue("pipe '" + p.id + "': bound inversion flow_min > flow_max");
    if (net.node_index(p.from) && net.node_index(p.to) && p.length > 0.0) {
      const double s = slope_of(p, net);
      if (!(std::abs(s) < 1.0)) issue("pipe '" + p.id + "': |slope| must be below 1");
    }
  }

  for (const auto& c : net.compressors()) {
    arc_endpoints("compressor", c.id, c.from, c.to);
    if (!(c.lift_max >= 0.0)) issue("compressor '" + c.id + "': lift_max must be non-negative");
    if (!(c.cost_coeff >= 0.0)) issue("compressor '" + c.id + "': cost_coeff must be non-negative");
    if (c.flow_min > c.flow_max) issue("compressor '" + c.id + "': bound inversion flow_min > flow_max");
  }

  double total = 0.0;
  for (const auto& [id, m] : scn.boundary_flows) {
    total += m;
    auto ix = net.node_index(id);
    if (!ix) {
      issue("scenario: unknown node '" + id + "'");
      continue;
    }
    const Node& n = net.nodes()[*ix];
    switch (n.kind) {
      case NodeKind::Entry:
        if (m > 0.0) issue("scenario: entry '" + id + "' has positive boundary flow (sign violation)");
        break;
      case NodeKind::Exit:
        if (m < 0.0) issue("scenario: exit '" + id + "' has negative boundary flow (sign violation)");
        break;
      case NodeKind::Inner:
        if (m != 0.0) issue("scenario: inner node '" + id + "' has nonzero boundary flow (sign violation)");
        break;
    }
  }
  if (std::abs(total) > kBalanceTol) issue("scenario: global imbalance " + format_number(total));

  // Weak connectivity via union-find over valid arcs.
  const std::size_t nn = net.nodes().size();
  if (nn == 0) {
    issue("network has no nodes");
  } else {
    std::vector<std::size_t> parent(nn);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto join = [&](const std::string& a, const std::string& b) {
      auto ia = net.node_index(a), ib = net.node_index(b);
      if (ia && ib) parent[find(*ia)] = find(*ib);
    };
    for (const auto& p : net.pipes()) join(p.from, p.to);
    for (const auto& c : net.compressors()) join(c.from, c.to);
    std::set<std::size_t> roots;
    for (std::size_t i = 0; i < nn; ++i) roots.insert(find(i));
    if (roots.size() > 1) issue("network is not connected (" + std::to_string(roots.size()) + " components)");
  }
  return r;
}

NodeResiduals mass_balance_residual(const Network& net, const Scenario& scn, const ArcFlows& flows) {
  NodeResiduals res;
  for (const auto& n : net.nodes()) res[n.id] = 0.0;
  auto arc = [&](const std::string& id, const std::string& from, const std::string& to) {
    auto it = flows.find(id);
    if (it == flows.end()) throw InvalidArgumentError("no flow given for arc '" + id + "'");
    res.at(to) += it->second;
    res.at(from) -= it->second;
  };
  for (const auto& p : net.pipes()) arc(p.id, p.from, p.to);
  for (const auto& c : net.compressors()) arc(c.id, c.from, c.to);
  for (auto& [id, r] : res) r -= scn.flow_at(id);
  return res;
}

double slope_of(const Pipe& pipe, const Network& net) {
  if (pipe.slope) return *pipe.slope;
  return (net.node(pipe.to).elevation - net.node(pipe.from).elevation) / pipe.length;
}

}  // namespace gasadapt
