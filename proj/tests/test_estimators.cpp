#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gasadapt/errors.hpp"
#include "gasadapt/estimators.hpp"
#include "test_support.hpp"

using namespace gasadapt;
using namespace gasadapt::testing;

namespace {

const GasParameters kGas{};

Grid grid_of(const PipeProperties& pipe, int n) { return Grid::with_intervals(pipe.length, n); }

}  // namespace

TEST(Estimators, ZeroFlowIsExact) {
  const auto e = total_error(test_pipe(), kGas, 60e5, 0.0, ModelLevel::FrictionOnly, grid_of(test_pipe(), 8));
  EXPECT_EQ(e.eta_d, 0.0);
  EXPECT_EQ(e.eta_m, 0.0);
  EXPECT_EQ(e.eta, 0.0);
}

TEST(Estimators, DiscretizationErrorByBruteForce) {
  const auto pipe = test_pipe();
  const int n = 16;
  const auto g = grid_of(pipe, n);
  const auto p2 = integrate(ModelLevel::Full, pipe, kGas, 60e5, 100.0, g.coarsened(2));
  const auto p4 = integrate(ModelLevel::Full, pipe, kGas, 60e5, 100.0, g.coarsened(4));
  const auto r2 = restrict_to_grid(p2, g.coarsened(4));
  ASSERT_EQ(r2.values.size(), static_cast<std::size_t>(n / 4 + 1));
  double m = 0.0;
  for (std::size_t i = 0; i < r2.values.size(); ++i) m = std::max(m, std::abs(r2.values[i] - p4.values[i]));
  EXPECT_EQ(discretization_error(pipe, kGas, 60e5, 100.0, g), m);
}

TEST(Estimators, DiscretizationErrorHalves) {
  const auto pipe = test_pipe();
  double prev = discretization_error(pipe, kGas, 60e5, 100.0, grid_of(pipe, 8));
  for (int n = 16; n <= 128; n *= 2) {
    const double e = discretization_error(pipe, kGas, 60e5, 100.0, grid_of(pipe, n));
    EXPECT_GE(prev / e, 1.8);
    EXPECT_LE(prev / e, 2.2);
    EXPECT_GE(e / prev, 0.4);
    EXPECT_LE(e / prev, 0.6);
    prev = e;
  }
}

TEST(Estimators, FullModelHasNoModelError) {
  const auto pipe = test_pipe(0.01);
  EXPECT_EQ(model_error(pipe, kGas, 60e5, 100.0, ModelLevel::Full, grid_of(pipe, 8)), 0.0);
  const auto e = total_error(pipe, kGas, 60e5, 100.0, ModelLevel::Full, grid_of(pipe, 8));
  EXPECT_EQ(e.eta, e.eta_d);
  EXPECT_EQ(e.eta, e.eta_d + e.eta_m);
}

TEST(Estimators, RamModelErrorBound) {
  const auto pipe = test_pipe();
  const double q = 5.0, p0 = 60e5;
  const auto g = grid_of(pipe, 16);
  const double c2 = std::pow(sound_speed(kGas), 2);
  const double drop = p0 - analytic_pressure(ModelLevel::FrictionOnly, pipe, kGas, p0, q, pipe.length);
  const double p_min = p0 - drop;
  const double bound = q * q * c2 / (pipe.cross_area * pipe.cross_area * p_min * p_min) * drop;
  // Compare against the same-grid full model so that only the ram term differs.
  PipeErrorEstimator est({pipe, p0, q}, kGas, g);
  const auto p1 = integrate(ModelLevel::Full, pipe, kGas, p0, q, g);
  const auto p2 = integrate(ModelLevel::NoRam, pipe, kGas, p0, q, g);
  EXPECT_LE(max_abs_difference(p1.values, p2.values), bound * 1.01);
  EXPECT_LE(est.model_error(ModelLevel::NoRam), bound * 1.01 + est.discretization_error() * 2.0);
}

TEST(Estimators, GravityHeadModelError) {
  const auto pipe = test_pipe(0.01);
  const double p0 = 60e5;
  const auto k = MomentumCoefficients::of(pipe, kGas);
  const double head = std::abs(p0 * (std::exp(-k.gravity * pipe.length) - 1.0));
  const double eta_m = model_error(pipe, kGas, p0, 0.0, ModelLevel::FrictionOnly, grid_of(pipe, 64));
  EXPECT_NEAR(eta_m, head, 0.01 * head);
}

TEST(Estimators, BoundsTrueErrorOnTestPipe) {
  const auto pipe = test_pipe();
  const double p0 = 60e5, q = 100.0;
  for (int n : {8, 32}) {
    const auto g = grid_of(pipe, n);
    const auto e = total_error(pipe, kGas, p0, q, ModelLevel::FrictionOnly, g);
    const auto ref = integrate(ModelLevel::Full, pipe, kGas, p0, q, grid_of(pipe, 64 * n));
    const auto p3 = integrate(ModelLevel::FrictionOnly, pipe, kGas, p0, q, g);
    const auto ev = g.coarsened(4);
    const double truth = max_abs_difference(restrict_to_grid(ref, ev).values, restrict_to_grid(p3, ev).values);
    EXPECT_GE(e.eta, 0.8 * truth);
  }
}

TEST(Estimators, UsesThreeIntegrations) {
  const auto pipe = test_pipe(0.01);
  PipeErrorEstimator est({pipe, 60e5, 80.0}, kGas, grid_of(pipe, 16));
  est.estimate("P", ModelLevel::FrictionOnly);
  EXPECT_EQ(est.integrations(), 3);
  est.model_error(ModelLevel::NoRam);
  EXPECT_EQ(est.integrations(), 4);
  est.model_error(ModelLevel::FrictionOnly);
  EXPECT_EQ(est.integrations(), 4);
}

TEST(Estimators, Locality) {
  const auto pipe = test_pipe(0.003);
  const auto a = total_error(pipe, kGas, 55e5, 90.0, ModelLevel::NoRam, grid_of(pipe, 16));
  (void)total_error(test_pipe(0.02), kGas, 30e5, 10.0, ModelLevel::FrictionOnly, grid_of(pipe, 8));
  const auto b = total_error(pipe, kGas, 55e5, 90.0, ModelLevel::NoRam, grid_of(pipe, 16));
  EXPECT_EQ(a.eta_d, b.eta_d);
  EXPECT_EQ(a.eta_m, b.eta_m);
}

TEST(Estimators, ModelErrorStableUnderGridChange) {
  const auto pipe = test_pipe(0.01);
  const double p0 = 60e5, q = 20.0;
  const double d = discretization_error(pipe, kGas, p0, q, grid_of(pipe, 64));
  const double m = model_error(pipe, kGas, p0, q, ModelLevel::FrictionOnly, grid_of(pipe, 64));
  ASSERT_GE(m, 100.0 * d);
  for (int n : {32, 128}) {
    const double m2 = model_error(pipe, kGas, p0, q, ModelLevel::FrictionOnly, grid_of(pipe, n));
    EXPECT_LE(std::abs(m2 - m), 0.05 * m);
  }
}

TEST(Estimators, ReverseFlowStartsAtToEnd) {
  const auto pipe = test_pipe(0.01);
  const auto in = InletCondition::from_solution(pipe, 50e5, 52e5, -40.0);
  EXPECT_EQ(in.p0, 52e5);
  EXPECT_EQ(in.q, 40.0);
  EXPECT_EQ(in.pipe.slope, -0.01);
  const auto fwd = InletCondition::from_solution(pipe, 50e5, 52e5, 40.0);
  EXPECT_EQ(fwd.p0, 50e5);
  EXPECT_EQ(fwd.pipe.slope, 0.01);
}

TEST(Estimators, GridMustSupportEvaluationGrid) {
  EXPECT_THROW(discretization_error(test_pipe(), kGas, 60e5, 10.0, grid_of(test_pipe(), 6)), InvalidGridError);
}

TEST(Estimators, NetworkSummary) {
  auto est = [](double eta) {
    ErrorEstimate e;
    e.eta = eta;
    return e;
  };
  std::vector<ErrorEstimate> one{est(5.0)};
  EXPECT_EQ(network_error_summary(one), 5.0);
  std::vector<ErrorEstimate> three{est(0.0), est(0.0), est(3e-5)};
  EXPECT_NEAR(network_error_summary(three), 1e-5, 1e-20);
  EXPECT_LE(network_error_summary(three), bar_to_pascal(1e-4));
  std::vector<ErrorEstimate> zeros{est(0.0), est(0.0)};
  EXPECT_EQ(network_error_summary(zeros), 0.0);
  EXPECT_THROW(network_error_summary({}), EmptyNetworkError);
}
