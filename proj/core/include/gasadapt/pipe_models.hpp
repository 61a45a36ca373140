#pragma once

#include <optional>
#include <string>

#include "gasadapt/network.hpp"

namespace gasadapt {

/// Stationary isothermal pipe models ordered from most to least accurate.
///   Full         momentum balance with ram pressure and gravity
///   NoRam        ram pressure neglected
///   FrictionOnly ram pressure and gravity neglected
enum class ModelLevel : int { Full = 1, NoRam = 2, FrictionOnly = 3 };

inline constexpr int level_number(ModelLevel l) { return static_cast<int>(l); }
std::optional<ModelLevel> model_level_from_int(int v);
std::string to_string(ModelLevel l);

/// One level finer (towards Full); Full stays Full.
ModelLevel finer(ModelLevel l);
/// One level coarser (towards FrictionOnly); FrictionOnly stays.
ModelLevel coarser(ModelLevel l);

/// Geometry and friction of one pipe with its slope resolved.
struct PipeProperties {
  double length = 0.0;
  double diameter = 0.0;
  double cross_area = 0.0;
  double friction = 0.0;
  double slope = 0.0;

  static PipeProperties of(const Pipe& pipe, const Network& net);
  /// Same pipe traversed from its far end.
  PipeProperties reversed() const;
};

double sound_speed(const GasParameters& gas);

/// Constants of the momentum equation for one pipe:
///   dp/dx (1 - ram/p^2 * q^2) = -friction * |q|q / p - gravity * p
struct MomentumCoefficients {
  double friction = 0.0;  // lambda c^2 / (2 A^2 D)
  double gravity = 0.0;   // g s / c^2
  double ram = 0.0;       // c^2 / A^2

  static MomentumCoefficients of(const PipeProperties& pipe, const GasParameters& gas);
};

/// Threshold on |1 - q^2 c^2 / (A^2 p^2)| below which the Full model is
/// considered sonic.
inline constexpr double kSonicGuard = 1e-9;

/// dp/dx of the continuous model at pressure p and mass flow q.
/// Throws NonPositivePressureError for p <= 0 and SonicFlowError near the
/// sonic point of the Full model.
double rhs(ModelLevel level, double p, double q, const PipeProperties& pipe, const GasParameters& gas);

/// Closed-form pressure profiles of the NoRam and FrictionOnly models.
/// Throws UnsupportedError for Full and DrainedPipeError when the pipe runs dry
/// before x.
double analytic_pressure(ModelLevel level, const PipeProperties& pipe, const GasParameters& gas, double p0,
                         double q, double x);

}  // namespace gasadapt
