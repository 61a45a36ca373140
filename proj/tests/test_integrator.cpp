#include <gtest/gtest.h>

#include <cmath>

#include "gasadapt/errors.hpp"
#include "gasadapt/integrator.hpp"
#include "test_support.hpp"

using namespace gasadapt;
using namespace gasadapt::testing;

namespace {

double max_error_vs_exact(ModelLevel level, const PipeProperties& pipe, double p0, double q, int n) {
  const GasParameters gas;
  const auto prof = integrate(level, pipe, gas, p0, q, Grid::with_intervals(pipe.length, n));
  double e = 0.0;
  for (int k = 0; k <= n; ++k)
    e = std::max(e, std::abs(prof.values[static_cast<std::size_t>(k)] -
                             analytic_pressure(level, pipe, gas, p0, q, prof.grid.position(k))));
  return e;
}

}  // namespace

TEST(Integrator, ZeroFlowGivesConstantProfile) {
  const GasParameters gas;
  for (auto level : {ModelLevel::Full, ModelLevel::NoRam, ModelLevel::FrictionOnly})
    for (int n : {4, 16}) {
      const auto prof = integrate(level, test_pipe(), gas, 60e5, 0.0, Grid::with_intervals(10000.0, n));
      ASSERT_EQ(prof.values.size(), static_cast<std::size_t>(n) + 1);
      for (double v : prof.values) EXPECT_EQ(v, 60e5);
    }
}

TEST(Integrator, FirstOrderConvergenceLevel3) {
  double prev = max_error_vs_exact(ModelLevel::FrictionOnly, test_pipe(), 60e5, 100.0, 16);
  for (int n = 32; n <= 256; n *= 2) {
    const double e = max_error_vs_exact(ModelLevel::FrictionOnly, test_pipe(), 60e5, 100.0, n);
    EXPECT_GE(prev / e, 1.8);
    EXPECT_LE(prev / e, 2.2);
    prev = e;
  }
}

TEST(Integrator, FirstOrderConvergenceLevel2) {
  double prev = max_error_vs_exact(ModelLevel::NoRam, test_pipe(0.01), 60e5, 100.0, 16);
  for (int n = 32; n <= 256; n *= 2) {
    const double e = max_error_vs_exact(ModelLevel::NoRam, test_pipe(0.01), 60e5, 100.0, n);
    EXPECT_GE(prev / e, 1.8);
    EXPECT_LE(prev / e, 2.2);
    prev = e;
  }
}

TEST(Integrator, DownhillZeroFlowGainsGravityHead) {
  const GasParameters gas;
  const auto pipe = test_pipe(-0.01);
  const int n = 64;
  const auto prof = integrate(ModelLevel::NoRam, pipe, gas, 60e5, 0.0, Grid::with_intervals(pipe.length, n));
  for (std::size_t k = 1; k < prof.values.size(); ++k) EXPECT_GT(prof.values[k], prof.values[k - 1]);
  const double exact = analytic_pressure(ModelLevel::NoRam, pipe, gas, 60e5, 0.0, pipe.length);
  const double coarse_err = std::abs(prof.values.back() - exact);
  const auto fine = integrate(ModelLevel::NoRam, pipe, gas, 60e5, 0.0, Grid::with_intervals(pipe.length, 2 * n));
  EXPECT_NEAR(coarse_err / std::abs(fine.values.back() - exact), 2.0, 0.2);
  EXPECT_LT(coarse_err, 1e-3 * std::abs(exact - 60e5));
}

TEST(Integrator, StepResidualsMeetTolerance) {
  const GasParameters gas;
  const auto pipe = test_pipe(0.004);
  const auto k = MomentumCoefficients::of(pipe, gas);
  const double q = 150.0;
  const auto grid = Grid::with_intervals(pipe.length, 8);
  const double h = grid.stepsize();
  const auto prof = integrate(ModelLevel::Full, pipe, gas, 60e5, q, grid);
  for (std::size_t i = 1; i < prof.values.size(); ++i) {
    const double p = prof.values[i], pp = prof.values[i - 1];
    const double r = (p - pp) * (1 - k.ram * q * q / (p * p)) + h * k.friction * q * q / p + h * k.gravity * p;
    EXPECT_LE(std::abs(r), 1e-10 * p);
  }
}

TEST(Integrator, FullModelDiffersFromNoRamByRamEffect) {
  const GasParameters gas;
  const auto grid = Grid::with_intervals(10000.0, 16);
  const auto p1 = integrate(ModelLevel::Full, test_pipe(), gas, 60e5, 100.0, grid);
  const auto p2 = integrate(ModelLevel::NoRam, test_pipe(), gas, 60e5, 100.0, grid);
  EXPECT_LT(p1.values.back(), p2.values.back());
  EXPECT_LT(p2.values.back() - p1.values.back(), 1000.0);
}

TEST(Integrator, ReverseFlowRaisesPressure) {
  const auto prof = integrate(ModelLevel::FrictionOnly, test_pipe(), GasParameters{}, 50e5, -50.0,
                              Grid::with_intervals(10000.0, 8));
  EXPECT_GT(prof.values.back(), 50e5);
}

TEST(Integrator, Errors) {
  const GasParameters gas;
  const auto grid = Grid::with_intervals(10000.0, 4);
  EXPECT_THROW(integrate(ModelLevel::FrictionOnly, test_pipe(), gas, 10e5, 2000.0, grid), DrainedPipeError);
  EXPECT_THROW(integrate(ModelLevel::NoRam, test_pipe(), gas, 10e5, 2000.0, grid), DrainedPipeError);
  EXPECT_THROW(integrate(ModelLevel::FrictionOnly, test_pipe(), gas, 0.0, 1.0, grid), NonPositivePressureError);
  const double q_sonic = 60e5 * test_pipe().cross_area / sound_speed(gas);
  try {
    integrate(ModelLevel::Full, test_pipe(), gas, 60e5, 0.999 * q_sonic, grid);
    FAIL() << "near-sonic flow integrated without error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::SonicFlow || e.kind() == ErrorKind::NewtonDivergence) << e.what();
  }
  EXPECT_THROW(Grid::with_intervals(0.0, 4), InvalidGridError);
}

TEST(Integrator, RestrictToGrid) {
  const auto prof = integrate(ModelLevel::FrictionOnly, test_pipe(), GasParameters{}, 60e5, 100.0,
                              Grid::with_intervals(10000.0, 8));
  const auto r = restrict_to_grid(prof, prof.grid.coarsened(4));
  ASSERT_EQ(r.grid.intervals, 2);
  EXPECT_EQ(r.values, (std::vector<double>{prof.values[0], prof.values[4], prof.values[8]}));
  EXPECT_EQ(restrict_to_grid(prof, prof.grid).values, prof.values);
  const auto two = restrict_to_grid(prof, prof.grid.coarsened(2));
  const auto four = restrict_to_grid(two, prof.grid.coarsened(4));
  EXPECT_EQ(four.values, r.values);
  EXPECT_THROW(restrict_to_grid(prof, Grid::with_intervals(10000.0, 3)), IncompatibleGridsError);
  EXPECT_THROW(restrict_to_grid(prof, Grid::with_intervals(9000.0, 4)), IncompatibleGridsError);
  EXPECT_THROW(prof.grid.coarsened(3), IncompatibleGridsError);
}

TEST(Integrator, Deterministic) {
  const auto a = integrate(ModelLevel::Full, test_pipe(0.01), GasParameters{}, 60e5, 120.0,
                           Grid::with_intervals(10000.0, 32));
  const auto b = integrate(ModelLevel::Full, test_pipe(0.01), GasParameters{}, 60e5, 120.0,
                           Grid::with_intervals(10000.0, 32));
  EXPECT_EQ(a.values, b.values);
}

TEST(Integrator, GridHelpers) {
  const auto g = Grid::with_intervals(10000.0, 8);
  EXPECT_DOUBLE_EQ(g.stepsize(), 1250.0);
  EXPECT_EQ(g.position(8), 10000.0);
  EXPECT_TRUE(g.supports_evaluation_grid());
  EXPECT_FALSE(Grid::with_intervals(10000.0, 6).supports_evaluation_grid());
}
