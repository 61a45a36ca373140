#include "gasadapt/controller.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void check_config(const AdaptiveConfig& c) {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgumentError(std::string(name) + " must lie in [0, 1], got " + fmt(v));
  };
  if (!(c.eps > 0.0)) throw InvalidArgumentError("eps must be positive, got " + fmt(c.eps));
  unit(c.theta_d, "theta_d");
  unit(c.theta_m, "theta_m");
  unit(c.phi_d, "phi_d");
  unit(c.phi_m, "phi_m");
  if (!(c.tau >= 1.0)) throw InvalidArgumentError("tau must be at least 1, got " + fmt(c.tau));
  if (c.mu < 1) throw InvalidArgumentError("mu must be a positive integer, got " + std::to_string(c.mu));
  if (!(c.eps_opt > 0.0)) throw InvalidArgumentError("eps_opt must be positive, got " + fmt(c.eps_opt));
  if (c.max_outer_iterations < 1) throw InvalidArgumentError("max_outer_iterations must be positive");
  if (c.initial_intervals < 4 || c.initial_intervals % 4 != 0)
    throw InvalidArgumentError("initial_intervals must be a positive multiple of 4, got " +
                               std::to_string(c.initial_intervals));
  if (c.split_tolerance && !(c.eps_opt < c.eps))
    throw InvalidArgumentError("tolerance splitting needs eps_opt < eps");
  if (c.adaptive_eps_opt) throw UnsupportedError("adaptive eps_opt tightening is unimplemented");
}

std::vector<std::string> validate_parameters(const AdaptiveConfig& c, std::size_t n_pipes) {
  std::vector<std::string> warnings;
  const double lhs1 = 0.5 * c.theta_d * c.mu;
  const double rhs1 = c.phi_d;
  if (!(lhs1 > rhs1))
    warnings.push_back("refinement condition violated: theta_d*mu/2 = " + fmt(lhs1) + " is not greater than phi_d = " +
                       fmt(rhs1));
  const double lhs2 = c.theta_m * c.mu;
  const double rhs2 = c.tau * c.phi_m * static_cast<double>(n_pipes);
  if (!(lhs2 > rhs2))
    warnings.push_back("model switching condition violated: theta_m*mu = " + fmt(lhs2) +
                       " is not greater than tau*phi_m*n_pipes = " + fmt(rhs2));
  return warnings;
}

int estimator_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GASADAPT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PipeEstimates> estimate_network(const Network& net, const GasParameters& gas,
                                            const NlpSolution& solution, const DiscretizationState& state,
                                            int threads) {
  std::vector<const Pipe*> order;
  for (const auto& p : net.pipes()) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Pipe* a, const Pipe* b) { return a->id < b->id; });

  std::vector<PipeEstimates> out(order.size());
  std::vector<std::exception_ptr> errors(order.size());
  auto work = [&](std::size_t i) {
    try {
      const Pipe& pipe = *order[i];
      const auto& disc = state.at(pipe.id);
      const auto inlet = InletCondition::from_solution(PipeProperties::of(pipe, net), solution.node_pressures.at(pipe.from),
                                                       solution.node_pressures.at(pipe.to),
                                                       solution.arc_flows.at(pipe.id));
      PipeErrorEstimator est(inlet, gas, Grid::with_intervals(pipe.length, disc.intervals));
      PipeEstimates& e = out[i];
      e.current = est.estimate(pipe.id, disc.level);
      if (disc.level == ModelLevel::FrictionOnly)
        e.eta_m_finer = est.model_error(ModelLevel::NoRam);
      else
        e.eta_m_coarser = est.model_error(coarser(disc.level));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(estimator_threads(threads)), order.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < order.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < order.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<ErrorEstimate> AdaptiveState::current_estimates() const {
  std::vector<ErrorEstimate> v;
  v.reserve(estimates.size());
  for (const auto& e : estimates) v.push_back(e.current);
  return v;
}

InnerMarks mark_inner(const std::vector<PipeEstimates>& estimates, const AdaptiveConfig& config) {
  const double eps = config.feasibility_tolerance();
  PipeValues eta_d, reduction;
  std::map<std::string, ModelLevel> targets;
  for (const auto& e : estimates) {
    const auto& cur = e.current;
    eta_d[cur.pipe_id] = cur.eta_d;
    if (cur.level == ModelLevel::Full) continue;
    auto eta_m_at = [&](ModelLevel l) {
      if (l == cur.level) return cur.eta_m;
      if (l == ModelLevel::Full) return 0.0;
      return e.eta_m_finer.value_or(0.0);
    };
    const ModelLevel target = switch_up_target(cur.level, eta_m_at, eps);
    targets[cur.pipe_id] = target;
    reduction[cur.pipe_id] = cur.eta_m - eta_m_at(target);
  }
  InnerMarks m;
  m.refine = mark_refine(eta_d, config.theta_d);
  for (const auto& id : mark_switch_up(reduction, config.theta_m, eps)) m.switch_up[id] = targets.at(id);
  return m;
}

OuterMarks mark_outer(const std::vector<PipeEstimates>& estimates, const DiscretizationState& state,
                      const AdaptiveConfig& config) {
  const double eps = config.feasibility_tolerance();
  PipeValues eta_d, increase;
  PipeSet at_initial_grid;
  for (const auto& e : estimates) {
    const auto& cur = e.current;
    eta_d[cur.pipe_id] = cur.eta_d;
    if (state.at(cur.pipe_id).intervals <= config.initial_intervals) at_initial_grid.insert(cur.pipe_id);
    if (cur.level != ModelLevel::FrictionOnly && e.eta_m_coarser)
      increase[cur.pipe_id] = *e.eta_m_coarser - cur.eta_m;
  }
  OuterMarks m;
  m.coarsen = mark_coarsen(eta_d, config.phi_d, at_initial_grid);
  m.switch_down = mark_switch_down(increase, config.phi_m, config.tau, eps);
  return m;
}

AdaptiveState run(const Network& net, const Scenario& scn, const GasParameters& gas, const AdaptiveConfig& config) {
  check_config(config);
  if (net.pipes().empty()) throw EmptyNetworkError("network has no pipes");

  NlpOptions nlp_options = config.nlp;
  nlp_options.eps_opt = config.eps_opt;
  const double eps = config.feasibility_tolerance();

  AdaptiveState st;
  st.state = uniform_state(net, ModelLevel::FrictionOnly, config.initial_intervals);
  st.warnings = validate_parameters(config, net.pipes().size());

  TraceRecord pending;
  double pending_ivp = 0.0;

  auto solve_and_estimate = [&](int k, int j) {
    const auto t0 = Clock::now();
    const auto inst = NlpInstance::assemble(net, scn, gas, st.state, nlp_options);
    NlpSolution sol = st.trace.empty() ? solve(inst) : solve(inst, &st.solution);
    const double nlp_seconds = seconds_since(t0);
    if (sol.status == NlpStatus::Infeasible)
      throw InfeasibleError("NLP " + std::to_string(st.trace.size()) + " is infeasible: " + sol.message);
    if (sol.status != NlpStatus::LocalOptimum)
      throw IterationLimitError("NLP " + std::to_string(st.trace.size()) + " did not converge: " + sol.message);
    st.solution = std::move(sol);

    const auto t1 = Clock::now();
    st.estimates = estimate_network(net, gas, st.solution, st.state, config.threads);
    const double ivp_seconds = seconds_since(t1) + pending_ivp;

    TraceRecord r = pending;
    r.solve_index = static_cast<int>(st.trace.size());
    r.outer_k = k;
    r.inner_j = j;
    r.n_vars = inst.num_variables();
    r.n_cons = inst.num_constraints();
    r.nlp_seconds = nlp_seconds;
    r.ivp_seconds = ivp_seconds;
    for (const auto& e : st.estimates) {
      r.sum_eta_d += e.current.eta_d;
      r.sum_eta_m += e.current.eta_m;
      r.sum_eta += e.current.eta;
    }
    r.avg_eta = r.sum_eta / static_cast<double>(st.estimates.size());
    st.trace.push_back(r);
    pending = TraceRecord{};
    pending_ivp = 0.0;
    st.outer_k = k;
    st.inner_j = j;
    st.eps_feasible = r.avg_eta <= eps;
    return st.eps_feasible;
  };

  if (solve_and_estimate(0, 0)) return st;

  for (int k = 0; k < config.max_outer_iterations; ++k) {
    for (int j = 1; j <= config.mu; ++j) {
      const InnerMarks marks = mark_inner(st.estimates, config);
      for (const auto& id : marks.refine) st.state[id].intervals *= 2;
      for (const auto& [id, level] : marks.switch_up) st.state[id].level = level;
      pending.n_refined = static_cast<int>(marks.refine.size());
      pending.n_switched_up = static_cast<int>(marks.switch_up.size());
      if (solve_and_estimate(k, j)) return st;
    }
    const OuterMarks marks = mark_outer(st.estimates, st.state, config);
    for (const auto& id : marks.switch_down) st.state[id].level = coarser(st.state[id].level);
    for (const auto& id : marks.coarsen) st.state[id].intervals /= 2;
    pending.n_coarsened = static_cast<int>(marks.coarsen.size());
    pending.n_switched_down = static_cast<int>(marks.switch_down.size());
    if (!marks.coarsen.empty() || !marks.switch_down.empty()) {
      const auto t0 = Clock::now();
      st.estimates = estimate_network(net, gas, st.solution, st.state, config.threads);
      pending_ivp = seconds_since(t0);
    }
  }
  throw IterationLimitError("adaptive loop reached " + std::to_string(config.max_outer_iterations) +
                            " outer iterations without meeting the tolerance");
}

}  // namespace gasadapt
