#include "gasadapt/pipe_models.hpp"

#include <cmath>

#include "gasadapt/errors.hpp"

namespace gasadapt {

std::optional<ModelLevel> model_level_from_int(int v) {
  switch (v) {
    case 1: return ModelLevel::Full;
    case 2: return ModelLevel::NoRam;
    case 3: return ModelLevel::FrictionOnly;
    default: return std::nullopt;
  }
}

std::string to_string(ModelLevel l) { return std::to_string(level_number(l)); }

ModelLevel finer(ModelLevel l) {
  return l == ModelLevel::FrictionOnly ? ModelLevel::NoRam : ModelLevel::Full;
}

ModelLevel coarser(ModelLevel l) {
  return l == ModelLevel::Full ? ModelLevel::NoRam : ModelLevel::FrictionOnly;
}

PipeProperties PipeProperties::of(const Pipe& pipe, const Network& net) {
  return {pipe.length, pipe.diameter, pipe.cross_area, pipe.friction, slope_of(pipe, net)};
}

PipeProperties PipeProperties::reversed() const {
  PipeProperties r = *this;
  r.slope = -slope;
  return r;
}

double sound_speed(const GasParameters& gas) {
  return std::sqrt(gas.specific_gas_constant * gas.temperature * gas.compressibility);
}

MomentumCoefficients MomentumCoefficients::of(const PipeProperties& pipe, const GasParameters& gas) {
  const double c2 = gas.specific_gas_constant * gas.temperature * gas.compressibility;
  const double a2 = pipe.cross_area * pipe.cross_area;
  return {pipe.friction * c2 / (2.0 * a2 * pipe.diameter), gas.gravity * pipe.slope / c2, c2 / a2};
}

double rhs(ModelLevel level, double p, double q, const PipeProperties& pipe, const GasParameters& gas) {
  if (!(p > 0.0)) throw NonPositivePressureError("pressure " + std::to_string(p) + " Pa");
  const auto k = MomentumCoefficients::of(pipe, gas);
  const double friction_term = -k.friction * std::abs(q) * q / p;
  if (level == ModelLevel::FrictionOnly) return friction_term;
  const double base = friction_term - k.gravity * p;
  if (level == ModelLevel::NoRam) return base;
  const double ram_factor = 1.0 - k.ram * q * q / (p * p);
  if (std::abs(ram_factor) < kSonicGuard)
    throw SonicFlowError("ram factor " + std::to_string(ram_factor) + " at p = " + std::to_string(p));
  return base / ram_factor;
}

double analytic_pressure(ModelLevel level, const PipeProperties& pipe, const GasParameters& gas, double p0,
                         double q, double x) {
  if (level == ModelLevel::Full) throw UnsupportedError("no closed form for the full model");
  const auto k = MomentumCoefficients::of(pipe, gas);
  const double kq = k.friction * std::abs(q) * q;
  double square = 0.0;
  if (level == ModelLevel::FrictionOnly || k.gravity == 0.0) {
    square = p0 * p0 - 2.0 * kq * x;
  } else {
    const double ratio = kq / k.gravity;
    square = (p0 * p0 + ratio) * std::exp(-2.0 * k.gravity * x) - ratio;
  }
  if (!(square > 0.0)) throw DrainedPipeError("closed-form pressure squared " + std::to_string(square));
  return std::sqrt(square);
}

}  // namespace gasadapt
