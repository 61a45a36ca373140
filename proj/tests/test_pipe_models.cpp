#include <gtest/gtest.h>

#include <cmath>

#include "gasadapt/errors.hpp"
#include "gasadapt/pipe_models.hpp"
#include "test_support.hpp"

using namespace gasadapt;
using namespace gasadapt::testing;

TEST(PipeModels, SoundSpeed) {
  EXPECT_NEAR(sound_speed(GasParameters{}), std::sqrt(518.26 * 283.15 * 0.9), 1e-12);
  EXPECT_NEAR(sound_speed(GasParameters{}), 363.4, 0.1);
  EXPECT_DOUBLE_EQ(sound_speed({1.0, 1.0, 1.0, 9.81}), 1.0);
  GasParameters hot;
  hot.temperature *= 2.0;
  EXPECT_NEAR(sound_speed(hot) / sound_speed(GasParameters{}), std::sqrt(2.0), 1e-14);
}

TEST(PipeModels, RhsFormulas) {
  const GasParameters gas;
  const auto pipe = test_pipe(0.01);
  const double c2 = std::pow(sound_speed(gas), 2);
  const double a = pipe.cross_area;
  const double p = 50e5, q = 80.0;
  const double k = pipe.friction * c2 * q * q / (2 * a * a * pipe.diameter);
  const double alpha = gas.gravity * pipe.slope / c2;
  EXPECT_NEAR(rhs(ModelLevel::FrictionOnly, p, q, pipe, gas), -k / p, 1e-12);
  EXPECT_NEAR(rhs(ModelLevel::NoRam, p, q, pipe, gas), -k / p - alpha * p, 1e-12);
  EXPECT_NEAR(rhs(ModelLevel::Full, p, q, pipe, gas), (-k / p - alpha * p) / (1 - q * q * c2 / (a * a * p * p)),
              1e-12);
  EXPECT_NEAR(rhs(ModelLevel::FrictionOnly, p, -q, pipe, gas), k / p, 1e-12);
}

TEST(PipeModels, ZeroFlowAndHierarchyConsistency) {
  const GasParameters gas;
  EXPECT_EQ(rhs(ModelLevel::FrictionOnly, 50e5, 0.0, test_pipe(0.01), gas), 0.0);
  for (double p : {10e5, 40e5, 70e5})
    for (double q : {-100.0, 0.0, 3.0, 250.0})
      EXPECT_EQ(rhs(ModelLevel::NoRam, p, q, test_pipe(), gas), rhs(ModelLevel::FrictionOnly, p, q, test_pipe(), gas));
  const double r1 = rhs(ModelLevel::Full, 50e5, 1e-6, test_pipe(0.01), gas);
  const double r2 = rhs(ModelLevel::NoRam, 50e5, 1e-6, test_pipe(0.01), gas);
  EXPECT_NEAR(r1, r2, 1e-14 * std::abs(r2));
}

TEST(PipeModels, RamTermVanishesForWidePipes) {
  const GasParameters gas;
  const double c2 = std::pow(sound_speed(gas), 2);
  const double p = 50e5, q = 100.0;
  for (double d : {0.6, 2.0, 10.0}) {
    PipeProperties pipe{10000.0, d, circle_area(d), 0.01, 0.005};
    const double r1 = rhs(ModelLevel::Full, p, q, pipe, gas);
    const double r2 = rhs(ModelLevel::NoRam, p, q, pipe, gas);
    const double bound = q * q * c2 / (pipe.cross_area * pipe.cross_area * p * p);
    EXPECT_LE(std::abs(r1 - r2) / std::abs(r2), bound * 1.01);
  }
}

TEST(PipeModels, RhsErrors) {
  const GasParameters gas;
  EXPECT_THROW(rhs(ModelLevel::FrictionOnly, 0.0, 1.0, test_pipe(), gas), NonPositivePressureError);
  const double p = 50e5;
  const double q_sonic = p * test_pipe().cross_area / sound_speed(gas);
  EXPECT_THROW(rhs(ModelLevel::Full, p, q_sonic, test_pipe(), gas), SonicFlowError);
}

TEST(PipeModels, MonotoneDecreaseWithoutSlope) {
  const GasParameters gas;
  for (auto level : {ModelLevel::Full, ModelLevel::NoRam, ModelLevel::FrictionOnly})
    EXPECT_LT(rhs(level, 50e5, 50.0, test_pipe(), gas), 0.0);
}

TEST(PipeModels, AnalyticZeroFlow) {
  const GasParameters gas;
  for (double x : {0.0, 2500.0, 10000.0}) {
    EXPECT_DOUBLE_EQ(analytic_pressure(ModelLevel::FrictionOnly, test_pipe(), gas, 60e5, 0.0, x), 60e5);
    EXPECT_DOUBLE_EQ(analytic_pressure(ModelLevel::NoRam, test_pipe(), gas, 60e5, 0.0, x), 60e5);
  }
}

TEST(PipeModels, AnalyticLevel3AgainstRk4) {
  const GasParameters gas;
  const auto pipe = test_pipe();
  const double p0 = 60e5, q = 100.0;
  const int n = 20000;
  const double h = pipe.length / n;
  double p = p0;
  auto f = [&](double v) { return rhs(ModelLevel::FrictionOnly, v, q, pipe, gas); };
  for (int k = 0; k < n; ++k) {
    const double k1 = f(p), k2 = f(p + 0.5 * h * k1), k3 = f(p + 0.5 * h * k2), k4 = f(p + h * k3);
    p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const double exact = analytic_pressure(ModelLevel::FrictionOnly, pipe, gas, p0, q, pipe.length);
  EXPECT_LT(std::abs(p * p - exact * exact) / (exact * exact), 1e-8);
  const auto k = MomentumCoefficients::of(pipe, gas);
  EXPECT_NEAR(exact * exact - p0 * p0, -2.0 * k.friction * q * q * pipe.length, 1e-3 * exact);
}

TEST(PipeModels, AnalyticLevel2SatisfiesOde) {
  const GasParameters gas;
  for (double s : {0.01, -0.02}) {
    const auto pipe = test_pipe(s);
    const auto k = MomentumCoefficients::of(pipe, gas);
    const double q = 70.0, p0 = 55e5;
    const double kq = k.friction * q * q;
    for (int i = 1; i <= 10; ++i) {
      const double x = pipe.length * i / 11.0;
      const double p = analytic_pressure(ModelLevel::NoRam, pipe, gas, p0, q, x);
      // d(p^2)/dx of (p0^2 + K/a) exp(-2 a x) - K/a
      const double dp2 = -2.0 * k.gravity * (p0 * p0 + kq / k.gravity) * std::exp(-2.0 * k.gravity * x);
      EXPECT_NEAR(dp2 + 2.0 * k.gravity * p * p + 2.0 * kq, 0.0, 1e-9 * 2.0 * kq);
      const double h = 1e-2;
      const double pp = analytic_pressure(ModelLevel::NoRam, pipe, gas, p0, q, x + h);
      const double pm = analytic_pressure(ModelLevel::NoRam, pipe, gas, p0, q, x - h);
      EXPECT_NEAR((pp - pm) / (2 * h), rhs(ModelLevel::NoRam, p, q, pipe, gas), 1e-5);
    }
  }
}

TEST(PipeModels, AnalyticErrors) {
  const GasParameters gas;
  EXPECT_THROW(analytic_pressure(ModelLevel::Full, test_pipe(), gas, 60e5, 10.0, 100.0), UnsupportedError);
  EXPECT_THROW(analytic_pressure(ModelLevel::FrictionOnly, test_pipe(), gas, 10e5, 1000.0, 10000.0),
               DrainedPipeError);
}

TEST(PipeModels, LevelOrdering) {
  EXPECT_EQ(finer(ModelLevel::FrictionOnly), ModelLevel::NoRam);
  EXPECT_EQ(finer(ModelLevel::Full), ModelLevel::Full);
  EXPECT_EQ(coarser(ModelLevel::NoRam), ModelLevel::FrictionOnly);
  EXPECT_EQ(coarser(ModelLevel::FrictionOnly), ModelLevel::FrictionOnly);
  EXPECT_FALSE(model_level_from_int(4).has_value());
  EXPECT_EQ(test_pipe(0.01).reversed().slope, -0.01);
}
