#pragma once

#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>

#include "gasadapt/estimators.hpp"
#include "gasadapt/pipe_models.hpp"

namespace gasadapt {

/// pipe id -> non-negative indicator value.
using PipeValues = std::map<std::string, double>;
using PipeSet = std::set<std::string>;

/// Level to switch to when a pipe is marked for switching up: one level finer
/// if that alone removes more than eps of model error, the full model
/// otherwise.
ModelLevel switch_up_target(ModelLevel level, const std::function<double(ModelLevel)>& eta_m_at, double eps);

/// Smallest greedy prefix (descending eta_d, ties by id) whose sum reaches
/// theta_d times the total.
PipeSet mark_refine(const PipeValues& eta_d, double theta_d);

/// Greedy prefix (descending reduction) over pipes whose reduction exceeds
/// eps, reaching theta_m times the total reduction of those pipes.
PipeSet mark_switch_up(const PipeValues& reduction, double theta_m, double eps);

/// Largest greedy prefix (ascending eta_d, ties by id) over the pipes not in
/// `excluded` whose sum stays within phi_d times the total over all pipes.
PipeSet mark_coarsen(const PipeValues& eta_d, double phi_d, const PipeSet& excluded = {});

/// Largest greedy prefix (ascending increase) over pipes whose increase is at
/// most tau * eps, staying within phi_m times the total increase of those
/// pipes. Callers pass only pipes that can still be switched down.
PipeSet mark_switch_down(const PipeValues& increase, double phi_m, double tau, double eps);

/// Average total estimate per pipe is at most eps. Throws EmptyNetworkError
/// for no estimates.
bool is_eps_feasible(std::span<const ErrorEstimate> estimates, double eps);

}  // namespace gasadapt
