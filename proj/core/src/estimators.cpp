#include "gasadapt/estimators.hpp"

#include "gasadapt/errors.hpp"

namespace gasadapt {

InletCondition InletCondition::from_solution(const PipeProperties& pipe, double p_from, double p_to, double q) {
  if (q >= 0.0) return {pipe, p_from, q};
  return {pipe.reversed(), p_to, -q};
}

PipeErrorEstimator::PipeErrorEstimator(const InletCondition& inlet, const GasParameters& gas, const Grid& grid)
    : inlet_(inlet), gas_(gas), grid_(grid) {
  if (!grid.supports_evaluation_grid())
    throw InvalidGridError("estimator grid needs a multiple of 4 intervals, got " +
                           std::to_string(grid.intervals));
  eval_grid_ = grid.coarsened(4);
}

const PressureProfile& PipeErrorEstimator::reference_2h() {
  if (!ref_2h_) {
    ref_2h_ = integrate(ModelLevel::Full, inlet_.pipe, gas_, inlet_.p0, inlet_.q, grid_.coarsened(2));
    ++integrations_;
    ref_2h_eval_ = restrict_to_grid(*ref_2h_, eval_grid_).values;
  }
  return *ref_2h_;
}

double PipeErrorEstimator::discretization_error() {
  reference_2h();
  if (!ref_4h_eval_) {
    ref_4h_eval_ = integrate(ModelLevel::Full, inlet_.pipe, gas_, inlet_.p0, inlet_.q, eval_grid_).values;
    ++integrations_;
  }
  return max_abs_difference(*ref_2h_eval_, *ref_4h_eval_);
}

double PipeErrorEstimator::model_error(ModelLevel level) {
  if (level == ModelLevel::Full) return 0.0;
  auto& cached = model_error_cache_[static_cast<std::size_t>(level_number(level) - 1)];
  if (!cached) {
    reference_2h();
    const auto fine = integrate(level, inlet_.pipe, gas_, inlet_.p0, inlet_.q, grid_);
    ++integrations_;
    cached = max_abs_difference(*ref_2h_eval_, restrict_to_grid(fine, eval_grid_).values);
  }
  return *cached;
}

ErrorEstimate PipeErrorEstimator::estimate(const std::string& pipe_id, ModelLevel level) {
  ErrorEstimate e;
  e.pipe_id = pipe_id;
  e.eta_d = discretization_error();
  e.eta_m = model_error(level);
  e.eta = e.eta_d + e.eta_m;
  e.level = level;
  e.stepsize = grid_.stepsize();
  e.intervals = grid_.intervals;
  return e;
}

double discretization_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q,
                            const Grid& grid) {
  return PipeErrorEstimator({pipe, p0, q}, gas, grid).discretization_error();
}

double model_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q, ModelLevel level,
                   const Grid& grid) {
  return PipeErrorEstimator({pipe, p0, q}, gas, grid).model_error(level);
}

ErrorEstimate total_error(const PipeProperties& pipe, const GasParameters& gas, double p0, double q,
                          ModelLevel level, const Grid& grid) {
  return PipeErrorEstimator({pipe, p0, q}, gas, grid).estimate("", level);
}

double network_error_summary(std::span<const ErrorEstimate> estimates) {
  if (estimates.empty()) throw EmptyNetworkError("no pipe estimates to average");
  double sum = 0.0;
  for (const auto& e : estimates) sum += e.eta;
  return sum / static_cast<double>(estimates.size());
}

}  // namespace gasadapt
