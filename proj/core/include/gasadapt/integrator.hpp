#pragma once

#include <span>
#include <vector>

#include "gasadapt/pipe_models.hpp"

namespace gasadapt {

/// Equidistant grid x_k = k * h, k = 0..n, over a pipe of the given length.
/// Grids used by the adaptive loop keep n a multiple of 4 so that the 2h and
/// 4h subgrids exist; coarse evaluation grids themselves may have any n >= 1.
struct Grid {
  double length = 0.0;
  int intervals = 0;

  static Grid with_intervals(double length, int intervals);

  double stepsize() const { return length / intervals; }
  double position(int k) const { return k == intervals ? length : k * stepsize(); }
  bool supports_evaluation_grid() const { return intervals > 0 && intervals % 4 == 0; }
  /// Grid with the stepsize multiplied by `factor` (must divide `intervals`).
  Grid coarsened(int factor) const;
};

struct PressureProfile {
  Grid grid;
  std::vector<double> values;
  ModelLevel level = ModelLevel::FrictionOnly;
  double flow = 0.0;
};

struct NewtonSettings {
  int max_iterations = 50;
  double relative_tolerance = 1e-10;
  double bisection_floor = 1.0;  // Pa
};

/// Implicit-Euler integration of the chosen model from p(0) = p0 with
/// constant mass flow q. Each step solves the scalar implicit relation with
/// Newton's method started at the previous value, falling back to bisection
/// on [1 Pa, 2 p_{k-1}].
PressureProfile integrate(ModelLevel level, const PipeProperties& pipe, const GasParameters& gas, double p0,
                          double q, const Grid& grid, const NewtonSettings& settings = {});

/// Samples the profile at the gridpoints of a coarser, aligned grid.
PressureProfile restrict_to_grid(const PressureProfile& profile, const Grid& target);

/// Max-norm of the pointwise difference of two profiles on the same grid.
double max_abs_difference(std::span<const double> a, std::span<const double> b);

}  // namespace gasadapt
