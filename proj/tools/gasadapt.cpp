#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gasadapt/controller.hpp"
#include "gasadapt/errors.hpp"
#include "gasadapt/fixtures.hpp"
#include "gasadapt/integrator.hpp"
#include "gasadapt/io.hpp"
#include "gasadapt/nlp.hpp"

namespace fs = std::filesystem;
using namespace gasadapt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct RunArgs {
  std::string network, scenario, config, out;
  double eps_bar = 0.0;
  int threads = 0;
};

struct SimulateArgs {
  int level = 3;
  double h = 2500.0;
  double p0 = 60e5;
  double q = 0.0;
  double length = 10000.0;
  double diameter = 0.6;
  double friction = 0.01;
  double slope = 0.0;
};

struct EstimateArgs {
  std::string network, solution, out;
  int threads = 0;
};

struct ParamArgs {
  std::string config;
  std::string network;
  std::size_t pipes = 0;
  double theta = -1.0, phi = -1.0, tau = -1.0;
  int mu = 0;
};

struct NlpArgs {
  std::string network, scenario, out, dump;
  int level = 1;
  int intervals = 4;
  double stepsize = 0.0;
  double eps_opt = 1e-8;
  bool report = false;
  int threads = 0;
};

struct FixtureArgs {
  std::string name;
  std::string out = ".";
};

void ensure_valid(const Network& net, const Scenario& scn) {
  const auto report = validate_network(net, scn);
  if (report.ok()) return;
  std::string msg = "invalid network/scenario";
  for (const auto& issue : report.issues) msg += "\n  " + issue;
  throw ValidationError(msg);
}

int cmd_run(const RunArgs& a) {
  const auto doc = load_network(a.network);
  const auto scn = load_scenario(a.scenario);
  ensure_valid(doc.network, scn);
  AdaptiveConfig cfg = a.config.empty() ? AdaptiveConfig{} : load_config(a.config);
  if (a.eps_bar > 0.0) cfg.eps = bar_to_pascal(a.eps_bar);
  if (a.threads > 0) cfg.threads = a.threads;

  for (const auto& w : validate_parameters(cfg, doc.network.pipes().size())) std::cerr << "warning: " << w << "\n";
  const AdaptiveState st = run(doc.network, scn, doc.gas, cfg);

  fs::create_directories(a.out);
  write_file((fs::path(a.out) / "solution.json").string(), solution_to_json(st.solution, doc.network));
  std::ostringstream trace, est;
  write_trace_csv(trace, st.trace);
  write_estimates_csv(est, st.estimates);
  write_file((fs::path(a.out) / "trace.csv").string(), trace.str());
  write_file((fs::path(a.out) / "estimates.csv").string(), est.str());

  const auto& last = st.trace.back();
  std::cout << "eps-feasible after " << st.trace.size() << " NLP solves: avg eta " << last.avg_eta
            << " Pa <= eps " << cfg.eps << " Pa, objective " << st.solution.objective << "\n";
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a) {
  const auto level = model_level_from_int(a.level);
  if (!level) throw InvalidArgumentError("--level must be 1, 2 or 3");
  if (!(a.h > 0.0)) throw InvalidArgumentError("--h must be positive");
  const double ratio = a.length / a.h;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * ratio)
    throw InvalidGridError("--h must divide the pipe length into whole intervals");
  PipeProperties pipe{a.length, a.diameter, circle_area(a.diameter), a.friction, a.slope};
  const auto prof = integrate(*level, pipe, GasParameters{}, a.p0, a.q, Grid::with_intervals(a.length, n));
  std::vector<double> xs;
  for (int k = 0; k <= n; ++k) xs.push_back(prof.grid.position(k));
  write_profile_csv(std::cout, xs, prof.values);
  return kExitOk;
}

int cmd_estimate(const EstimateArgs& a) {
  const auto doc = load_network(a.network);
  const auto sol = load_solution(a.solution);
  for (const auto& p : doc.network.pipes())
    if (!sol.state.count(p.id)) throw ParseError(a.solution + ": no discretization for pipe '" + p.id + "'");
  const auto est = estimate_network(doc.network, doc.gas, sol, sol.state, a.threads);
  std::ostringstream os;
  write_estimates_csv(os, est);
  if (a.out.empty())
    std::cout << os.str();
  else
    write_file(a.out, os.str());
  return kExitOk;
}

int cmd_validate_params(const ParamArgs& a) {
  AdaptiveConfig cfg = a.config.empty() ? AdaptiveConfig{} : load_config(a.config);
  if (a.theta >= 0.0) cfg.theta_d = cfg.theta_m = a.theta;
  if (a.phi >= 0.0) cfg.phi_d = cfg.phi_m = a.phi;
  if (a.tau >= 0.0) cfg.tau = a.tau;
  if (a.mu > 0) cfg.mu = a.mu;
  std::size_t n = a.pipes;
  if (!a.network.empty()) n = load_network(a.network).network.pipes().size();
  if (n == 0) throw InvalidArgumentError("give --pipes N or --network FILE");
  check_config(cfg);
  const auto warnings = validate_parameters(cfg, n);
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  if (warnings.empty()) std::cout << "termination conditions hold for " << n << " pipes\n";
  return kExitOk;
}

int cmd_nlp_solve(const NlpArgs& a) {
  const auto doc = load_network(a.network);
  const auto scn = load_scenario(a.scenario);
  ensure_valid(doc.network, scn);
  const auto level = model_level_from_int(a.level);
  if (!level) throw InvalidArgumentError("--level must be 1, 2 or 3");
  NlpOptions opt;
  opt.eps_opt = a.eps_opt;
  const auto state = a.stepsize > 0.0 ? uniform_stepsize_state(doc.network, *level, a.stepsize)
                                      : uniform_state(doc.network, *level, a.intervals);
  const auto inst = NlpInstance::assemble(doc.network, scn, doc.gas, state, opt);
  const auto sol = solve(inst);
  std::cout << "status " << to_string(sol.status) << ", objective " << sol.objective << ", " << sol.iterations
            << " iterations, " << inst.num_variables() << " variables, " << inst.num_constraints()
            << " constraints\n";
  if (!a.dump.empty()) {
    std::ofstream os(a.dump);
    if (!os) throw IoError("cannot open '" + a.dump + "' for writing");
    inst.dump(os, Eigen::Map<const ipm::Vector>(sol.x.data(), static_cast<Eigen::Index>(sol.x.size())));
  }
  if (!a.out.empty()) write_file(a.out, solution_to_json(sol, doc.network));
  if (sol.status == NlpStatus::Infeasible) return kExitInfeasible;
  if (sol.status != NlpStatus::LocalOptimum) return kExitError;
  if (a.report) {
    const auto est = estimate_network(doc.network, doc.gas, sol, sol.state, a.threads);
    std::vector<ErrorEstimate> cur;
    for (const auto& e : est) cur.push_back(e.current);
    std::cout << "avg eta " << network_error_summary(cur) << " Pa\n";
  }
  return kExitOk;
}

int cmd_make_fixture(const FixtureArgs& a) {
  const auto f = make_fixture(a.name);
  fs::create_directories(a.out);
  write_file((fs::path(a.out) / (f.name + ".network.json")).string(), network_to_json(f.network, f.gas));
  write_file((fs::path(a.out) / (f.name + ".scenario.json")).string(), scenario_to_json(f.scenario));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive model and discretization control for stationary gas network optimization"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Adaptive optimization until the error tolerance is met");
  run_cmd->add_option("--network", run_args.network, "Network JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--scenario", run_args.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--config", run_args.config, "Config JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--eps-bar", run_args.eps_bar, "Override the tolerance (bar)");
  run_cmd->add_option("--threads", run_args.threads, "Estimator threads");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Integrate one pipe and print the profile as CSV");
  sim_cmd->set_help_flag("--help", "Print this help message and exit");
  sim_cmd->add_option("--level", sim.level, "Model level 1, 2 or 3")->capture_default_str();
  sim_cmd->add_option("--h", sim.h, "Stepsize in m")->capture_default_str();
  sim_cmd->add_option("--p0", sim.p0, "Inlet pressure in Pa")->capture_default_str();
  sim_cmd->add_option("--q", sim.q, "Mass flow in kg/s")->capture_default_str();
  sim_cmd->add_option("--length", sim.length, "Pipe length in m")->capture_default_str();
  sim_cmd->add_option("--diameter", sim.diameter, "Diameter in m")->capture_default_str();
  sim_cmd->add_option("--friction", sim.friction, "Friction factor")->capture_default_str();
  sim_cmd->add_option("--slope", sim.slope, "Slope")->capture_default_str();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Per-pipe error estimates for a solution file");
  est_cmd->add_option("--network", est.network, "Network JSON")->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--solution", est.solution, "Solution JSON")->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--out", est.out, "Output CSV (stdout if omitted)");
  est_cmd->add_option("--threads", est.threads, "Estimator threads");

  ParamArgs par;
  auto* par_cmd = app.add_subcommand("validate-params", "Check the termination conditions of the marking parameters");
  par_cmd->add_option("--config", par.config, "Config JSON")->check(CLI::ExistingFile);
  par_cmd->add_option("--network", par.network, "Network JSON (pipe count)")->check(CLI::ExistingFile);
  par_cmd->add_option("--pipes", par.pipes, "Number of pipes");
  par_cmd->add_option("--theta", par.theta, "theta_d = theta_m");
  par_cmd->add_option("--phi", par.phi, "phi_d = phi_m");
  par_cmd->add_option("--tau", par.tau, "tau");
  par_cmd->add_option("--mu", par.mu, "mu");

  NlpArgs nlp;
  auto* nlp_cmd = app.add_subcommand("nlp-solve", "Solve one NLP with uniform model level and grid");
  nlp_cmd->add_option("--network", nlp.network, "Network JSON")->required()->check(CLI::ExistingFile);
  nlp_cmd->add_option("--scenario", nlp.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  nlp_cmd->add_option("--level", nlp.level, "Model level for every pipe")->capture_default_str();
  auto* intervals_opt =
      nlp_cmd->add_option("--intervals", nlp.intervals, "Intervals per pipe")->capture_default_str();
  nlp_cmd->add_option("--stepsize", nlp.stepsize, "Common stepsize bound [m]; overrides --intervals")
      ->excludes(intervals_opt);
  nlp_cmd->add_option("--eps-opt", nlp.eps_opt, "Solver tolerance")->capture_default_str();
  nlp_cmd->add_option("--out", nlp.out, "Solution JSON");
  nlp_cmd->add_option("--dump", nlp.dump, "Plain-text instance dump at the solution");
  nlp_cmd->add_flag("--report-estimates", nlp.report, "Print the average error estimate of the solution");
  nlp_cmd->add_option("--threads", nlp.threads, "Estimator threads");

  FixtureArgs fix;
  auto* fix_cmd = app.add_subcommand("make-fixture", "Write a synthetic network and scenario");
  fix_cmd->add_option("--name", fix.name, "chain-5 or tree-12")->required();
  fix_cmd->add_option("--out", fix.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*est_cmd) return cmd_estimate(est);
    if (*par_cmd) return cmd_validate_params(par);
    if (*nlp_cmd) return cmd_nlp_solve(nlp);
    if (*fix_cmd) return cmd_make_fixture(fix);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Infeasible ? kExitInfeasible : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
