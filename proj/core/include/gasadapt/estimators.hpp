#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "gasadapt/integrator.hpp"

namespace gasadapt {

/// Per-pipe error estimate in Pa, measured in the max-norm on the evaluation
/// grid (stepsize 4h). Nothing is claimed between evaluation gridpoints.
struct ErrorEstimate {
  std::string pipe_id;
  double eta_d = 0.0;  // discretization part
  double eta_m = 0.0;  // model part
  double eta = 0.0;    // eta_d + eta_m
  ModelLevel level = ModelLevel::FrictionOnly;
  double stepsize = 0.0;
  int intervals = 0;
};

/// Initial-value data for the estimator IVPs of one pipe, oriented so that
/// integration starts at the inlet. Reverse flow (q < 0) starts at the `to`
/// end of the pipe with the slope mirrored.
struct InletCondition {
  PipeProperties pipe;
  double p0 = 0.0;
  double q = 0.0;

  static InletCondition from_solution(const PipeProperties& pipe, double p_from, double p_to, double q);
};

/// Evaluates the estimators of one pipe at a fixed (p0, q, grid). The two
/// level-1 reference profiles on the 2h and 4h grids are integrated once and
/// shared by every model-level query.
class PipeErrorEstimator {
 public:
  PipeErrorEstimator(const InletCondition& inlet, const GasParameters& gas, const Grid& grid);

  /// max_r |p1(x_r; 2h) - p1(x_r; 4h)|
  double discretization_error();
  /// max_r |p1(x_r; 2h) - p_level(x_r; h)|, identically zero for the full model.
  double model_error(ModelLevel level);
  ErrorEstimate estimate(const std::string& pipe_id, ModelLevel level);

  int integrations() const { return integrations_; }

 private:
  const PressureProfile& reference_2h();

  InletCondition inlet_;
  GasParameters gas_;
  Grid grid_;
  Grid eval_grid_;
  std::optional<PressureProfile> ref_2h_;
  std::optional<std::vector<double>> ref_2h_eval_;
  std::optional<std::vector<double>> ref_4h_eval_;
  std::array<std::optional<double>, 3> model_error_cache_{};
  int integrations_ = 0;
};

double discretization_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q,
                            const Grid& grid);

double model_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q, ModelLevel level,
                   const Grid& grid);

ErrorEstimate total_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q,
                          ModelLevel level, const Grid& grid);

/// Average total estimate per pipe. Throws EmptyNetworkError for no pipes.
double network_error_summary(std::span<const ErrorEstimate> estimates);

}  // namespace gasadapt
