#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gasadapt {

inline constexpr double kPascalPerBar = 1e5;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double bar_to_pascal(double bar) { return bar * kPascalPerBar; }
constexpr double pascal_to_bar(double pa) { return pa / kPascalPerBar; }

enum class NodeKind { Entry, Exit, Inner };

const char* to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(const std::string& s);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Inner;
  double pressure_min = 0.0;  // Pa
  double pressure_max = 0.0;  // Pa
  double elevation = 0.0;     // m
};

/// Flow bounds this large (in magnitude) are treated as absent.
inline constexpr double kUnboundedFlow = 1e20;

struct Pipe {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;      // m
  double diameter = 0.0;    // m
  double cross_area = 0.0;  // m^2
  double friction = 0.0;    // Darcy friction factor, dimensionless
  std::optional<double> slope;      // explicit override; derived from elevations otherwise
  std::optional<double> roughness;  // m, informational once friction is set
  double flow_min = -kUnboundedFlow;  // kg/s
  double flow_max = kUnboundedFlow;   // kg/s
};

struct Compressor {
  std::string id;
  std::string from;
  std::string to;
  double lift_max = 0.0;    // Pa
  double cost_coeff = 0.0;  // cost per Pa
  double flow_min = -kUnboundedFlow;
  double flow_max = kUnboundedFlow;
};

struct GasParameters {
  double specific_gas_constant = 518.26;  // J/(kg K), methane
  double temperature = 283.15;            // K
  double compressibility = 0.9;
  double gravity = 9.81;  // m/s^2
};

/// Nikuradse's closure for the friction factor of a fully rough pipe.
double nikuradse_friction(double diameter, double roughness);

double circle_area(double diameter);

/// Directed gas network of pipes and compressors. Immutable once built by the
/// loader or fixture generators; the index maps are rebuilt by `reindex()`.
class Network {
 public:
  Network() = default;
  Network(std::vector<Node> nodes, std::vector<Pipe> pipes, std::vector<Compressor> compressors);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Pipe>& pipes() const { return pipes_; }
  const std::vector<Compressor>& compressors() const { return compressors_; }

  std::size_t num_arcs() const { return pipes_.size() + compressors_.size(); }

  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> pipe_index(const std::string& id) const;
  std::optional<std::size_t> compressor_index(const std::string& id) const;

  const Node& node(const std::string& id) const;
  const Pipe& pipe(const std::string& id) const;

 private:
  void reindex();

  std::vector<Node> nodes_;
  std::vector<Pipe> pipes_;
  std::vector<Compressor> compressors_;
  std::unordered_map<std::string, std::size_t> node_ix_;
  std::unordered_map<std::string, std::size_t> pipe_ix_;
  std::unordered_map<std::string, std::size_t> comp_ix_;
};

/// Boundary mass flows m_v in kg/s: negative at entries, positive at exits.
struct Scenario {
  std::map<std::string, double> boundary_flows;

  double flow_at(const std::string& node_id) const;
};

struct ValidationReport {
  std::vector<std::string> issues;

  bool ok() const { return issues.empty(); }
  bool mentions(const std::string& needle) const;
};

ValidationReport validate_gas(const GasParameters& gas);

/// Checks every structural invariant of the network together with the
/// scenario sign conditions and global balance.
ValidationReport validate_network(const Network& net, const Scenario& scn);

using ArcFlows = std::map<std::string, double>;
using NodeResiduals = std::map<std::string, double>;

/// residual(v) = sum of inflows - sum of outflows - m_v.
NodeResiduals mass_balance_residual(const Network& net, const Scenario& scn, const ArcFlows& flows);

/// Rise over run from node elevations unless the pipe carries an explicit slope.
double slope_of(const Pipe& pipe, const Network& net);

}  // namespace gasadapt
