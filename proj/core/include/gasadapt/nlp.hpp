#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasadapt/interior_point.hpp"
#include "gasadapt/network.hpp"
#include "gasadapt/pipe_models.hpp"

namespace gasadapt {

/// Model level and interval count of one pipe in the discretized problem.
struct PipeDiscretization {
  ModelLevel level = ModelLevel::FrictionOnly;
  int intervals = 4;

  bool operator==(const PipeDiscretization&) const = default;
};

/// pipe id -> discretization, ordered by id.
using DiscretizationState = std::map<std::string, PipeDiscretization>;

DiscretizationState uniform_state(const Network& net, ModelLevel level, int intervals);

/// Every pipe gets the smallest multiple of 4 intervals whose stepsize does
/// not exceed `stepsize`.
DiscretizationState uniform_stepsize_state(const Network& net, ModelLevel level, double stepsize);

struct NlpOptions {
  /// KKT and constraint-violation tolerance handed to the solver.
  double eps_opt = 1e-8;
  /// |q| q is smoothed as q sqrt(q^2 + sigma^2) inside the optimization model.
  double flow_smoothing = 1e-6;
  /// Pressure lower bounds are floored here to protect the 1/p terms.
  double pressure_floor = 1e4;
  int max_iterations = 500;
  /// Barrier parameter used when a warm start is supplied.
  double warm_start_mu = 1e-6;
  bool verbose = false;
};

enum class NlpStatus { LocalOptimum, Infeasible, IterationLimit };

const char* to_string(NlpStatus s);

enum class VariableKind { NodePressure, ArcFlow, Lift, PipePressure };

struct VariableInfo {
  VariableKind kind;
  std::string owner;  // node, arc, compressor or pipe id
  int position = 0;   // gridpoint index for pipe pressures
  double lower = -ipm::kInfinity;
  double upper = ipm::kInfinity;

  std::string name() const;
};

struct NlpSolution;

/// Discretized operation-cost problem for fixed per-pipe model levels and
/// stepsizes.
///
/// Variables are laid out as
///   [ node pressures | arc flows (pipes, then compressors) | lifts | interior pipe pressures ]
/// and equality constraints as
///   [ node mass balances | compressor couplings | pipe relations, k = 1..n per pipe ].
/// The first two blocks only depend on the network, so they keep their indices
/// across instances built for different discretization states.
class NlpInstance final : public ipm::Problem {
 public:
  static NlpInstance assemble(const Network& net, const Scenario& scn, const GasParameters& gas,
                              const DiscretizationState& state, const NlpOptions& options = {});

  int num_variables() const override { return static_cast<int>(vars_.size()); }
  int num_constraints() const override { return num_rows_; }
  void bounds(ipm::Vector& lower, ipm::Vector& upper) const override;
  double objective(const ipm::Vector& x) const override;
  void objective_gradient(const ipm::Vector& x, ipm::Vector& grad) const override;
  void constraints(const ipm::Vector& x, ipm::Vector& c) const override;
  void jacobian(const ipm::Vector& x, std::vector<ipm::Triplet>& out) const override;
  void hessian(const ipm::Vector& x, double obj_factor, const ipm::Vector& y,
               std::vector<ipm::Triplet>& out) const override;
  ipm::Vector variable_scaling() const override;
  ipm::Vector constraint_scaling() const override;
  double objective_scaling() const override;

  const std::vector<VariableInfo>& variables() const { return vars_; }
  const DiscretizationState& state() const { return state_; }
  const NlpOptions& options() const { return options_; }

  int node_pressure_var(std::size_t node) const { return static_cast<int>(node); }
  int arc_flow_var(std::size_t arc) const { return static_cast<int>(num_nodes_ + arc); }
  int lift_var(std::size_t compressor) const { return static_cast<int>(num_nodes_ + num_arcs_ + compressor); }
  /// Variable indices of all gridpoint pressures of a pipe, inlet node first.
  const std::vector<int>& pipe_pressure_vars(std::size_t pipe) const { return pipes_[pipe].pressure_vars; }
  int pipe_first_row(std::size_t pipe) const { return pipes_[pipe].first_row; }
  int compressor_row(std::size_t compressor) const { return static_cast<int>(num_nodes_ + compressor); }

  /// Unscaled residuals of every equality constraint.
  std::vector<double> residuals(const ipm::Vector& x) const;
  /// Cold-start point: min-norm balanced flows, mid-bound node pressures,
  /// linear pipe pressure profiles.
  ipm::Vector initial_point() const;
  /// Warm start from a solution of another instance on the same network;
  /// pipe profiles and multipliers on changed grids are linearly interpolated.
  ipm::StartPoint warm_start(const NlpSolution& previous) const;

  NlpSolution make_solution(const ipm::Result& result) const;

  /// Plain-text listing of variables, bounds, objective, and residuals at x.
  void dump(std::ostream& os, const ipm::Vector& x) const;

 private:
  struct PipeBlock {
    std::size_t pipe = 0;
    std::string id;
    ModelLevel level = ModelLevel::FrictionOnly;
    int intervals = 0;
    double h = 0.0;
    double length = 0.0;
    MomentumCoefficients coeff;
    int flow_var = 0;
    int first_row = 0;
    std::vector<int> pressure_vars;
  };

  struct CompressorBlock {
    std::string id;
    int from_var = 0, to_var = 0, flow_var = 0, lift_var = 0;
    double cost = 0.0;
  };

  NlpInstance() = default;

  // |q| q smoothing and its first two derivatives.
  double smooth(double q) const;
  double smooth_d1(double q) const;
  double smooth_d2(double q) const;

  NlpOptions options_;
  DiscretizationState state_;
  std::size_t num_nodes_ = 0;
  std::size_t num_arcs_ = 0;
  std::size_t num_compressors_ = 0;
  int num_rows_ = 0;
  std::vector<VariableInfo> vars_;
  std::vector<std::string> node_ids_;
  std::vector<std::string> arc_ids_;
  std::vector<double> boundary_flow_;
  // Incidence of arcs on node balances: (node row, flow var, sign).
  std::vector<std::tuple<int, int, double>> incidence_;
  std::vector<PipeBlock> pipes_;
  std::vector<CompressorBlock> compressors_;
  double flow_scale_ = 1.0;
  double obj_scale_ = 1.0;
};

/// Local solution of one instance, with everything needed to warm-start the
/// next one.
struct NlpSolution {
  NlpStatus status = NlpStatus::IterationLimit;
  double objective = 0.0;
  double kkt_error = 0.0;
  double stationarity = 0.0;
  double constraint_violation = 0.0;
  int iterations = 0;
  std::string message;

  DiscretizationState state;
  std::map<std::string, double> node_pressures;
  std::map<std::string, double> arc_flows;
  std::map<std::string, double> lifts;
  /// Gridpoint pressures per pipe from its `from` node to its `to` node.
  std::map<std::string, std::vector<double>> pipe_profiles;

  // Raw iterate in the layout of the producing instance.
  std::vector<double> x;
  std::vector<double> y_scaled;
  std::vector<double> z_lower_scaled;
  std::vector<double> z_upper_scaled;
  double mu = 0.0;
};

/// Solves the instance to local optimality. A warm start, when given, must
/// come from an instance on the same network and scenario.
NlpSolution solve(const NlpInstance& instance, const NlpSolution* warm_start = nullptr);

}  // namespace gasadapt
