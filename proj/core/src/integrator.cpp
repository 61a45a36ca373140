#include "gasadapt/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

constexpr double kLengthRelTol = 1e-9;

// Residual of one implicit step, multiplied through by h so that it is
// measured in Pa, together with its derivative in the unknown pressure.
struct StepRelation {
  ModelLevel level;
  double h;
  double friction;  // friction coefficient times |q| q
  double gravity;
  double ram_q2;  // c^2 q^2 / A^2
  double previous;

  double ram_factor(double p) const { return 1.0 - ram_q2 / (p * p); }

  double value(double p) const {
    double g = p - previous + h * friction / p;
    if (level == ModelLevel::FrictionOnly) return g;
    g += h * gravity * p;
    if (level == ModelLevel::NoRam) return g;
    return (p - previous) * ram_factor(p) + h * friction / p + h * gravity * p;
  }

  double derivative(double p) const {
    double d = 1.0 - h * friction / (p * p);
    if (level == ModelLevel::FrictionOnly) return d;
    d += h * gravity;
    if (level == ModelLevel::NoRam) return d;
    return ram_factor(p) + (p - previous) * 2.0 * ram_q2 / (p * p * p) - h * friction / (p * p) + h * gravity;
  }
};

std::string describe_step(int k, double p) {
  std::ostringstream os;
  os << "step " << k << " from p = " << p << " Pa";
  return os.str();
}

double solve_step(const StepRelation& rel, int k, const NewtonSettings& settings) {
  // Levels without ram pressure reduce to (1 + h g) p^2 - p_prev p + h f = 0.
  if (rel.level != ModelLevel::Full) {
    const double a = 1.0 + (rel.level == ModelLevel::NoRam ? rel.h * rel.gravity : 0.0);
    if (a > 0.0) {
      const double disc = rel.previous * rel.previous - 4.0 * a * rel.h * rel.friction;
      if (disc < 0.0) throw DrainedPipeError("no real pressure root at " + describe_step(k, rel.previous));
      if (rel.previous + std::sqrt(disc) <= 0.0)
        throw DrainedPipeError("pressure root would be non-positive at " + describe_step(k, rel.previous));
    }
  }

  auto check_sonic = [&](double p) {
    if (rel.level == ModelLevel::Full && std::abs(rel.ram_factor(p)) < kSonicGuard)
      throw SonicFlowError("ram factor vanishes at " + describe_step(k, p));
  };

  double p = rel.previous;
  for (int it = 0; it < settings.max_iterations; ++it) {
    check_sonic(p);
    const double g = rel.value(p);
    if (std::abs(g) <= settings.relative_tolerance * p) return p;
    const double d = rel.derivative(p);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = p - g / d;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    p = next;
  }
  check_sonic(p);
  if (p > 0.0 && std::abs(rel.value(p)) <= settings.relative_tolerance * p) return p;

  // Bisection fallback on [floor, 2 p_prev].
  double lo = settings.bisection_floor;
  double hi = 2.0 * rel.previous;
  double glo = rel.value(lo);
  double ghi = rel.value(hi);
  if (!(glo * ghi < 0.0)) {
    if (rel.level != ModelLevel::Full && glo > 0.0 && ghi > 0.0)
      throw DrainedPipeError("no positive pressure root at " + describe_step(k, rel.previous));
    throw NewtonDivergenceError("no bracketing interval at " + describe_step(k, rel.previous));
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    check_sonic(mid);
    const double gm = rel.value(mid);
    if (std::abs(gm) <= settings.relative_tolerance * mid) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
  }
  throw NewtonDivergenceError("bisection did not converge at " + describe_step(k, rel.previous));
}

}  // namespace

Grid Grid::with_intervals(double length, int intervals) {
  if (!(length > 0.0) || intervals < 1)
    throw InvalidGridError("grid needs positive length and at least one interval");
  return {length, intervals};
}

Grid Grid::coarsened(int factor) const {
  if (factor < 1 || intervals % factor != 0)
    throw IncompatibleGridsError("cannot coarsen " + std::to_string(intervals) + " intervals by " +
                                 std::to_string(factor));
  return {length, intervals / factor};
}

PressureProfile integrate(ModelLevel level, const PipeProperties& pipe, const GasParameters& gas, double p0,
                          double q, const Grid& grid, const NewtonSettings& settings) {
  if (!(p0 > 0.0)) throw NonPositivePressureError("initial pressure " + std::to_string(p0) + " Pa");
  if (grid.intervals < 1 || !(grid.length > 0.0)) throw InvalidGridError("empty grid");

  const auto k = MomentumCoefficients::of(pipe, gas);
  PressureProfile out{grid, {}, level, q};
  out.values.reserve(static_cast<std::size_t>(grid.intervals) + 1);
  out.values.push_back(p0);

  StepRelation rel{level, grid.stepsize(), k.friction * std::abs(q) * q, k.gravity, k.ram * q * q, p0};
  for (int step = 1; step <= grid.intervals; ++step) {
    const double p = solve_step(rel, step, settings);
    out.values.push_back(p);
    rel.previous = p;
  }
  return out;
}

PressureProfile restrict_to_grid(const PressureProfile& profile, const Grid& target) {
  const Grid& src = profile.grid;
  if (target.intervals < 1 || std::abs(target.length - src.length) > kLengthRelTol * src.length ||
      src.intervals % target.intervals != 0)
    throw IncompatibleGridsError("cannot restrict " + std::to_string(src.intervals) + " intervals onto " +
                                 std::to_string(target.intervals));
  const int stride = src.intervals / target.intervals;
  PressureProfile out{target, {}, profile.level, profile.flow};
  out.values.reserve(static_cast<std::size_t>(target.intervals) + 1);
  for (int r = 0; r <= target.intervals; ++r) out.values.push_back(profile.values[static_cast<std::size_t>(r * stride)]);
  return out;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw IncompatibleGridsError("profiles differ in length");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace gasadapt
