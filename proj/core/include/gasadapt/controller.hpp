#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasadapt/estimators.hpp"
#include "gasadapt/marking.hpp"
#include "gasadapt/network.hpp"
#include "gasadapt/nlp.hpp"

namespace gasadapt {

struct AdaptiveConfig {
  double eps = 10.0;  // Pa
  double theta_d = 0.7;
  double theta_m = 0.7;
  double phi_d = 0.3;
  double phi_m = 0.3;
  double tau = 1.1;
  int mu = 4;
  double eps_opt = 1e-8;
  int max_outer_iterations = 100;
  int initial_intervals = 4;
  /// Check feasibility against eps - eps_opt instead of eps.
  bool split_tolerance = false;
  /// Reserved; rejected as unimplemented when set.
  bool adaptive_eps_opt = false;
  /// Estimator threads; 0 reads GASADAPT_THREADS, falling back to the
  /// hardware concurrency.
  int threads = 0;
  NlpOptions nlp;

  /// Tolerance used by the feasibility checks.
  double feasibility_tolerance() const { return split_tolerance ? eps - eps_opt : eps; }
};

/// Throws InvalidArgumentError for out-of-range parameters and
/// UnsupportedError for adaptive_eps_opt.
void check_config(const AdaptiveConfig& config);

/// One warning per violated termination condition
///   theta_d mu / 2 > phi_d   and   theta_m mu > tau phi_m n_pipes.
std::vector<std::string> validate_parameters(const AdaptiveConfig& config, std::size_t n_pipes);

/// Estimates of one pipe at the current solution, plus the model error of the
/// neighbouring level the marking rules need: the next finer level for pipes
/// at level 3, the next coarser level for pipes at levels 1 and 2.
struct PipeEstimates {
  ErrorEstimate current;
  std::optional<double> eta_m_finer;
  std::optional<double> eta_m_coarser;
};

/// Number of estimator threads: `requested` if positive, else
/// GASADAPT_THREADS, else the hardware concurrency.
int estimator_threads(int requested = 0);

/// Per-pipe estimates for `state` at the given solution, evaluated
/// concurrently and returned in pipe-id order.
std::vector<PipeEstimates> estimate_network(const Network& net, const GasParameters& gas,
                                            const NlpSolution& solution, const DiscretizationState& state,
                                            int threads = 0);

struct TraceRecord {
  int solve_index = 0;
  int outer_k = 0;
  int inner_j = 0;
  int n_vars = 0;
  int n_cons = 0;
  double nlp_seconds = 0.0;
  double ivp_seconds = 0.0;
  double sum_eta_d = 0.0;
  double sum_eta_m = 0.0;
  double sum_eta = 0.0;
  double avg_eta = 0.0;
  int n_refined = 0;
  int n_switched_up = 0;
  int n_coarsened = 0;
  int n_switched_down = 0;
};

struct AdaptiveState {
  DiscretizationState state;
  int outer_k = 0;
  int inner_j = 0;
  NlpSolution solution;
  std::vector<PipeEstimates> estimates;
  std::vector<TraceRecord> trace;
  std::vector<std::string> warnings;
  bool eps_feasible = false;

  std::vector<ErrorEstimate> current_estimates() const;
};

/// Marking sets of one inner round.
struct InnerMarks {
  PipeSet refine;
  std::map<std::string, ModelLevel> switch_up;
};

/// Marking sets of one coarsening round.
struct OuterMarks {
  PipeSet coarsen;
  PipeSet switch_down;
};

InnerMarks mark_inner(const std::vector<PipeEstimates>& estimates, const AdaptiveConfig& config);
OuterMarks mark_outer(const std::vector<PipeEstimates>& estimates, const DiscretizationState& state,
                      const AdaptiveConfig& config);

/// Adaptive model and discretization control. Returns once the average
/// estimated error per pipe is within the tolerance; throws InfeasibleError
/// when an NLP is infeasible and IterationLimitError when the outer loop cap
/// or an NLP iteration limit is hit.
AdaptiveState run(const Network& net, const Scenario& scn, const GasParameters& gas,
                  const AdaptiveConfig& config = {});

}  // namespace gasadapt
