#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "gasadapt/controller.hpp"
#include "gasadapt/errors.hpp"
#include "gasadapt/fixtures.hpp"
#include "gasadapt/io.hpp"
#include "test_support.hpp"

using namespace gasadapt;
using namespace gasadapt::testing;

TEST(Controller, ParameterConditions) {
  AdaptiveConfig c;
  EXPECT_EQ(validate_parameters(c, 39).size(), 1u);
  EXPECT_NE(validate_parameters(c, 39).front().find("12.87"), std::string::npos);
  c.mu = 25;
  EXPECT_TRUE(validate_parameters(c, 39).empty());
  c.phi_d = c.phi_m = 0.0;
  c.tau = 1.0;
  c.mu = 1;
  EXPECT_TRUE(validate_parameters(c, 39).empty());
  c.theta_d = 0.0;
  EXPECT_EQ(validate_parameters(c, 39).size(), 1u);
}

TEST(Controller, ConfigChecks) {
  AdaptiveConfig c;
  EXPECT_NO_THROW(check_config(c));
  c.adaptive_eps_opt = true;
  try {
    check_config(c);
    FAIL();
  } catch (const UnsupportedError& e) {
    EXPECT_NE(std::string(e.what()).find("unimplemented"), std::string::npos);
  }
  c = {};
  c.initial_intervals = 6;
  EXPECT_THROW(check_config(c), InvalidArgumentError);
  c = {};
  c.theta_d = 1.5;
  EXPECT_THROW(check_config(c), InvalidArgumentError);
  c = {};
  c.tau = 0.5;
  EXPECT_THROW(check_config(c), InvalidArgumentError);
  c = {};
  c.split_tolerance = true;
  EXPECT_DOUBLE_EQ(c.feasibility_tolerance(), c.eps - c.eps_opt);
}

TEST(Controller, EarlyReturnWhenInitiallyFeasible) {
  const auto net = single_pipe_network(60e5);
  AdaptiveConfig c;
  c.eps = 1e6;
  const auto st = run(net, flows({{"A", -10.0}, {"B", 10.0}}), GasParameters{}, c);
  ASSERT_EQ(st.trace.size(), 1u);
  EXPECT_TRUE(st.eps_feasible);
  EXPECT_EQ(st.trace[0].n_refined, 0);
  for (const auto& [id, d] : st.state) {
    EXPECT_EQ(d.level, ModelLevel::FrictionOnly);
    EXPECT_EQ(d.intervals, 4);
  }
}

TEST(Controller, ZeroFlowIsFeasibleAtOnce) {
  const auto net = single_pipe_network(60e5);
  const auto st = run(net, flows({}), GasParameters{}, {});
  EXPECT_EQ(st.trace.size(), 1u);
  EXPECT_EQ(st.trace[0].avg_eta, 0.0);
}

TEST(Controller, Chain5TerminatesWithInvariants) {
  const auto f = chain_5();
  AdaptiveConfig c;
  c.eps = bar_to_pascal(1e-4);
  const auto st = run(f.network, f.scenario, f.gas, c);
  ASSERT_TRUE(st.eps_feasible);
  EXPECT_LE(st.trace.back().avg_eta, c.eps);
  EXPECT_LE(st.trace.size(), 50u);
  for (const auto& [id, d] : st.state) {
    EXPECT_EQ(d.intervals % 4, 0) << id;
    EXPECT_GE(d.intervals, c.initial_intervals) << id;
  }
  for (std::size_t i = 0; i < st.trace.size(); ++i) {
    const auto& r = st.trace[i];
    EXPECT_EQ(r.solve_index, static_cast<int>(i));
    if (i == 0) continue;
    if (r.n_refined + r.n_switched_up > 0 && r.n_coarsened + r.n_switched_down == 0)
      EXPECT_GE(st.trace[i - 1].sum_eta - r.sum_eta, -0.1 * st.trace[i - 1].sum_eta) << "solve " << i;
  }
  // Solves are the initial one plus one per inner round.
  const auto& last = st.trace.back();
  EXPECT_EQ(st.trace.size(), 1u + static_cast<std::size_t>(last.outer_k * c.mu + last.inner_j));
  EXPECT_EQ(st.estimates.size(), f.network.pipes().size());
  EXPECT_EQ(st.solution.status, NlpStatus::LocalOptimum);
}

TEST(Controller, OuterLoopCapRaises) {
  const auto f = chain_5();
  AdaptiveConfig c;
  c.eps = 1e-3;
  c.max_outer_iterations = 1;
  c.mu = 1;
  EXPECT_THROW(run(f.network, f.scenario, f.gas, c), IterationLimitError);
}

TEST(Controller, MarkInnerUsesSwitchUpRule) {
  std::vector<PipeEstimates> est(3);
  est[0].current = {"a", 100.0, 50.0, 150.0, ModelLevel::FrictionOnly};
  est[0].eta_m_finer = 10.0;
  est[1].current = {"b", 1.0, 50.0, 51.0, ModelLevel::FrictionOnly};
  est[1].eta_m_finer = 45.0;
  est[2].current = {"c", 1.0, 0.0, 1.0, ModelLevel::Full};
  est[2].eta_m_coarser = 3.0;
  AdaptiveConfig c;
  c.theta_m = 1.0;
  const auto m = mark_inner(est, c);
  EXPECT_EQ(m.refine, (PipeSet{"a"}));
  ASSERT_EQ(m.switch_up.size(), 2u);
  EXPECT_EQ(m.switch_up.at("a"), ModelLevel::NoRam);
  EXPECT_EQ(m.switch_up.at("b"), ModelLevel::Full);

  DiscretizationState state{{"a", {ModelLevel::FrictionOnly, 8}}, {"b", {ModelLevel::FrictionOnly, 4}},
                            {"c", {ModelLevel::Full, 16}}};
  c.phi_m = 1.0;
  const auto o = mark_outer(est, state, c);
  EXPECT_EQ(o.switch_down, (PipeSet{"c"}));
  EXPECT_EQ(o.coarsen, (PipeSet{"c"}));
}

TEST(Controller, EstimatesIndependentOfThreadCount) {
  const auto f = tree_12();
  AdaptiveConfig c;
  c.eps = 1e9;
  const auto st = run(f.network, f.scenario, f.gas, c);
  std::ostringstream a, b;
  write_estimates_csv(a, estimate_network(f.network, f.gas, st.solution, st.state, 1));
  write_estimates_csv(b, estimate_network(f.network, f.gas, st.solution, st.state, 4));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Controller, ThreadCountFromEnvironment) {
  EXPECT_EQ(estimator_threads(3), 3);
  ::setenv("GASADAPT_THREADS", "2", 1);
  EXPECT_EQ(estimator_threads(), 2);
  ::setenv("GASADAPT_THREADS", "junk", 1);
  EXPECT_GE(estimator_threads(), 1);
  ::unsetenv("GASADAPT_THREADS");
}
