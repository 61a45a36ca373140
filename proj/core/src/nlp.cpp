#include "gasadapt/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "gasadapt/errors.hpp"

namespace gasadapt {

namespace {

constexpr double kPressureScale = kPascalPerBar;

double to_solver_bound(double v) {
  if (v <= -kUnboundedFlow || v <= -ipm::kInfinity) return -ipm::kInfinity;
  if (v >= kUnboundedFlow || v >= ipm::kInfinity) return ipm::kInfinity;
  return v;
}

/// Linear interpolation of equidistant samples over [0, 1] at fraction t.
double interpolate_profile(const std::vector<double>& values, double t) {
  const std::size_t n = values.size() - 1;
  if (n == 0) return values.front();
  const double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(n);
  const std::size_t k = std::min(static_cast<std::size_t>(pos), n - 1);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

}  // namespace

const char* to_string(NlpStatus s) {
  switch (s) {
    case NlpStatus::LocalOptimum: return "LocalOptimum";
    case NlpStatus::Infeasible: return "Infeasible";
    case NlpStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

std::string VariableInfo::name() const {
  switch (kind) {
    case VariableKind::NodePressure: return "p[" + owner + "]";
    case VariableKind::ArcFlow: return "q[" + owner + "]";
    case VariableKind::Lift: return "dp[" + owner + "]";
    case VariableKind::PipePressure: return "p[" + owner + "#" + std::to_string(position) + "]";
  }
  return owner;
}

DiscretizationState uniform_state(const Network& net, ModelLevel level, int intervals) {
  DiscretizationState s;
  for (const auto& p : net.pipes()) s[p.id] = {level, intervals};
  return s;
}

DiscretizationState uniform_stepsize_state(const Network& net, ModelLevel level, double stepsize) {
  if (!(stepsize > 0.0) || !std::isfinite(stepsize)) throw InvalidGridError("stepsize must be positive");
  DiscretizationState s;
  for (const auto& p : net.pipes()) {
    const double blocks = std::ceil(p.length / (4.0 * stepsize) * (1.0 - 1e-12));
    if (blocks > 1e8) throw InvalidGridError("stepsize too small for pipe '" + p.id + "'");
    s[p.id] = {level, 4 * std::max(1, static_cast<int>(blocks))};
  }
  return s;
}

NlpInstance NlpInstance::assemble(const Network& net, const Scenario& scn, const GasParameters& gas,
                                  const DiscretizationState& state, const NlpOptions& options) {
  NlpInstance inst;
  inst.options_ = options;
  inst.state_ = state;
  inst.num_nodes_ = net.nodes().size();
  inst.num_arcs_ = net.num_arcs();
  inst.num_compressors_ = net.compressors().size();

  for (const auto& p : net.pipes()) {
    auto it = state.find(p.id);
    if (it == state.end()) throw InvalidGridError("no discretization given for pipe '" + p.id + "'");
    if (it->second.intervals < 4 || it->second.intervals % 4 != 0)
      throw InvalidGridError("pipe '" + p.id + "' needs a positive multiple of 4 intervals, got " +
                             std::to_string(it->second.intervals));
  }
  if (state.size() != net.pipes().size()) throw InvalidGridError("discretization state names unknown pipes");

  const double floor = options.pressure_floor;
  for (const auto& n : net.nodes()) {
    inst.node_ids_.push_back(n.id);
    inst.boundary_flow_.push_back(scn.flow_at(n.id));
    inst.vars_.push_back({VariableKind::NodePressure, n.id, 0, std::max(n.pressure_min, floor),
                          std::max(n.pressure_max, floor)});
  }
  for (const auto& p : net.pipes()) {
    inst.arc_ids_.push_back(p.id);
    inst.vars_.push_back({VariableKind::ArcFlow, p.id, 0, to_solver_bound(p.flow_min), to_solver_bound(p.flow_max)});
  }
  for (const auto& c : net.compressors()) {
    inst.arc_ids_.push_back(c.id);
    inst.vars_.push_back({VariableKind::ArcFlow, c.id, 0, to_solver_bound(c.flow_min), to_solver_bound(c.flow_max)});
  }
  for (const auto& c : net.compressors()) inst.vars_.push_back({VariableKind::Lift, c.id, 0, 0.0, c.lift_max});

  int row = static_cast<int>(inst.num_nodes_ + inst.num_compressors_);
  for (std::size_t a = 0; a < net.pipes().size(); ++a) {
    const Pipe& pipe = net.pipes()[a];
    const auto& disc = state.at(pipe.id);
    PipeBlock b;
    b.pipe = a;
    b.id = pipe.id;
    b.level = disc.level;
    b.intervals = disc.intervals;
    b.length = pipe.length;
    b.h = pipe.length / disc.intervals;
    b.coeff = MomentumCoefficients::of(PipeProperties::of(pipe, net), gas);
    if (b.level == ModelLevel::FrictionOnly) b.coeff.gravity = 0.0;
    if (b.level != ModelLevel::Full) b.coeff.ram = 0.0;
    b.flow_var = inst.arc_flow_var(a);
    b.first_row = row;
    row += disc.intervals;
    b.pressure_vars.push_back(inst.node_pressure_var(*net.node_index(pipe.from)));
    for (int k = 1; k < disc.intervals; ++k) {
      b.pressure_vars.push_back(static_cast<int>(inst.vars_.size()));
      inst.vars_.push_back({VariableKind::PipePressure, pipe.id, k, floor, ipm::kInfinity});
    }
    b.pressure_vars.push_back(inst.node_pressure_var(*net.node_index(pipe.to)));
    inst.pipes_.push_back(std::move(b));
  }
  inst.num_rows_ = row;

  auto add_incidence = [&](std::size_t arc, const std::string& from, const std::string& to) {
    const int v = inst.arc_flow_var(arc);
    inst.incidence_.emplace_back(static_cast<int>(*net.node_index(to)), v, 1.0);
    inst.incidence_.emplace_back(static_cast<int>(*net.node_index(from)), v, -1.0);
  };
  for (std::size_t a = 0; a < net.pipes().size(); ++a) add_incidence(a, net.pipes()[a].from, net.pipes()[a].to);
  double max_cost = 0.0;
  for (std::size_t c = 0; c < net.compressors().size(); ++c) {
    const auto& comp = net.compressors()[c];
    add_incidence(net.pipes().size() + c, comp.from, comp.to);
    inst.compressors_.push_back({comp.id, inst.node_pressure_var(*net.node_index(comp.from)),
                                 inst.node_pressure_var(*net.node_index(comp.to)),
                                 inst.arc_flow_var(net.pipes().size() + c), inst.lift_var(c), comp.cost_coeff});
    max_cost = std::max(max_cost, comp.cost_coeff);
  }
  inst.obj_scale_ = 1.0 / std::max(1.0, max_cost * kPressureScale);
  return inst;
}

double NlpInstance::smooth(double q) const {
  const double s = options_.flow_smoothing;
  return q * std::sqrt(q * q + s * s);
}

double NlpInstance::smooth_d1(double q) const {
  const double s2 = options_.flow_smoothing * options_.flow_smoothing;
  const double r = std::sqrt(q * q + s2);
  return (2.0 * q * q + s2) / r;
}

double NlpInstance::smooth_d2(double q) const {
  const double s2 = options_.flow_smoothing * options_.flow_smoothing;
  const double r = std::sqrt(q * q + s2);
  return q * (2.0 * q * q + 3.0 * s2) / (r * r * r);
}

void NlpInstance::bounds(ipm::Vector& lower, ipm::Vector& upper) const {
  lower.resize(num_variables());
  upper.resize(num_variables());
  for (int i = 0; i < num_variables(); ++i) {
    lower[i] = vars_[static_cast<std::size_t>(i)].lower;
    upper[i] = vars_[static_cast<std::size_t>(i)].upper;
  }
}

double NlpInstance::objective(const ipm::Vector& x) const {
  double f = 0.0;
  for (const auto& c : compressors_) f += c.cost * x[c.lift_var];
  return f;
}

void NlpInstance::objective_gradient(const ipm::Vector&, ipm::Vector& grad) const {
  grad = ipm::Vector::Zero(num_variables());
  for (const auto& c : compressors_) grad[c.lift_var] = c.cost;
}

void NlpInstance::constraints(const ipm::Vector& x, ipm::Vector& c) const {
  c = ipm::Vector::Zero(num_rows_);
  for (std::size_t v = 0; v < num_nodes_; ++v) c[static_cast<int>(v)] = -boundary_flow_[v];
  for (const auto& [r, var, sign] : incidence_) c[r] += sign * x[var];
  for (std::size_t k = 0; k < compressors_.size(); ++k) {
    const auto& cb = compressors_[k];
    c[compressor_row(k)] = x[cb.to_var] - x[cb.from_var] - x[cb.lift_var];
  }
  for (const auto& b : pipes_) {
    const double q = x[b.flow_var];
    const double fq = b.coeff.friction * smooth(q);
    const double ram_q2 = b.coeff.ram * q * q;
    for (int k = 1; k <= b.intervals; ++k) {
      const double prev = x[b.pressure_vars[static_cast<std::size_t>(k - 1)]];
      const double p = x[b.pressure_vars[static_cast<std::size_t>(k)]];
      const double d = p - prev;
      c[b.first_row + k - 1] = d / b.h * (1.0 - ram_q2 / (p * p)) + fq / p + b.coeff.gravity * p;
    }
  }
}

void NlpInstance::jacobian(const ipm::Vector& x, std::vector<ipm::Triplet>& out) const {
  out.clear();
  out.reserve(incidence_.size() + 3 * compressors_.size() + 3 * static_cast<std::size_t>(num_rows_));
  for (const auto& [r, var, sign] : incidence_) out.emplace_back(r, var, sign);
  for (std::size_t k = 0; k < compressors_.size(); ++k) {
    const auto& cb = compressors_[k];
    const int r = compressor_row(k);
    out.emplace_back(r, cb.to_var, 1.0);
    out.emplace_back(r, cb.from_var, -1.0);
    out.emplace_back(r, cb.lift_var, -1.0);
  }
  for (const auto& b : pipes_) {
    const double q = x[b.flow_var];
    const double beta = b.coeff.ram;
    const double k0 = b.coeff.friction;
    const double fq = k0 * smooth(q);
    const double fq1 = k0 * smooth_d1(q);
    for (int k = 1; k <= b.intervals; ++k) {
      const int iprev = b.pressure_vars[static_cast<std::size_t>(k - 1)];
      const int ip = b.pressure_vars[static_cast<std::size_t>(k)];
      const double prev = x[iprev];
      const double u = x[ip];
      const double d = u - prev;
      const double u2 = u * u;
      const int r = b.first_row + k - 1;
      out.emplace_back(r, iprev, -1.0 / b.h + beta * q * q / (b.h * u2));
      out.emplace_back(r, ip,
                       1.0 / b.h - beta * q * q / (b.h * u2) + 2.0 * beta * q * q * d / (b.h * u2 * u) - fq / u2 +
                           b.coeff.gravity);
      out.emplace_back(r, b.flow_var, -2.0 * beta * q * d / (b.h * u2) + fq1 / u);
    }
  }
}

void NlpInstance::hessian(const ipm::Vector& x, double, const ipm::Vector& y,
                          std::vector<ipm::Triplet>& out) const {
  // The objective is linear; only the pipe relations contribute.
  out.clear();
  out.reserve(5 * static_cast<std::size_t>(num_rows_));
  auto put = [&](int a, int b, double v) { out.emplace_back(std::max(a, b), std::min(a, b), v); };
  for (const auto& b : pipes_) {
    const double q = x[b.flow_var];
    const double beta = b.coeff.ram;
    const double k0 = b.coeff.friction;
    const double f0 = k0 * smooth(q);
    const double f1 = k0 * smooth_d1(q);
    const double f2 = k0 * smooth_d2(q);
    const double h = b.h;
    for (int k = 1; k <= b.intervals; ++k) {
      const int iprev = b.pressure_vars[static_cast<std::size_t>(k - 1)];
      const int ip = b.pressure_vars[static_cast<std::size_t>(k)];
      const double w = y[b.first_row + k - 1];
      const double prev = x[iprev];
      const double u = x[ip];
      const double d = u - prev;
      const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2;
      const double bq2 = beta * q * q;
      put(ip, iprev, w * (-2.0 * bq2 / (h * u3)));
      put(b.flow_var, iprev, w * (2.0 * beta * q / (h * u2)));
      put(ip, ip, w * (4.0 * bq2 / (h * u3) - 6.0 * bq2 * d / (h * u4) + 2.0 * f0 / u3));
      put(b.flow_var, ip, w * (-2.0 * beta * q / (h * u2) + 4.0 * beta * q * d / (h * u3) - f1 / u2));
      put(b.flow_var, b.flow_var, w * (-2.0 * beta * d / (h * u2) + f2 / u));
    }
  }
}

ipm::Vector NlpInstance::variable_scaling() const {
  ipm::Vector s(num_variables());
  for (int i = 0; i < num_variables(); ++i)
    s[i] = vars_[static_cast<std::size_t>(i)].kind == VariableKind::ArcFlow ? flow_scale_ : kPressureScale;
  return s;
}

ipm::Vector NlpInstance::constraint_scaling() const {
  ipm::Vector s(num_rows_);
  for (std::size_t v = 0; v < num_nodes_; ++v) s[static_cast<int>(v)] = 1.0 / flow_scale_;
  for (std::size_t k = 0; k < compressors_.size(); ++k) s[compressor_row(k)] = 1.0 / kPressureScale;
  for (const auto& b : pipes_)
    for (int k = 0; k < b.intervals; ++k) s[b.first_row + k] = b.h / kPressureScale;
  return s;
}

double NlpInstance::objective_scaling() const { return obj_scale_; }

std::vector<double> NlpInstance::residuals(const ipm::Vector& x) const {
  ipm::Vector c;
  constraints(x, c);
  return {c.data(), c.data() + c.size()};
}

ipm::Vector NlpInstance::initial_point() const {
  const int n = num_variables();
  ipm::Vector x = ipm::Vector::Zero(n);
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    const auto& info = vars_[v];
    x[static_cast<int>(v)] = info.upper < ipm::kInfinity ? 0.5 * (info.lower + info.upper) : 1.1 * info.lower;
  }

  // Min-norm flows satisfying the balance: q = B^T w with (B B^T) w = m.
  using Sparse = Eigen::SparseMatrix<double>;
  const int nn = static_cast<int>(num_nodes_);
  std::vector<ipm::Triplet> lap;
  std::vector<std::pair<int, int>> arcs(num_arcs_, {-1, -1});
  for (const auto& [r, var, sign] : incidence_) {
    auto& a = arcs[static_cast<std::size_t>(var) - num_nodes_];
    (sign > 0 ? a.second : a.first) = r;
  }
  for (const auto& [from, to] : arcs) {
    lap.emplace_back(from, from, 1.0);
    lap.emplace_back(to, to, 1.0);
    lap.emplace_back(from, to, -1.0);
    lap.emplace_back(to, from, -1.0);
  }
  for (int v = 0; v < nn; ++v) lap.emplace_back(v, v, 1e-9);
  Sparse l(nn, nn);
  l.setFromTriplets(lap.begin(), lap.end());
  Eigen::SimplicialLDLT<Sparse> ldlt(l);
  ipm::Vector m(nn);
  for (int v = 0; v < nn; ++v) m[v] = boundary_flow_[static_cast<std::size_t>(v)];
  const ipm::Vector w = ldlt.solve(m);
  for (std::size_t a = 0; a < num_arcs_; ++a) {
    const auto [from, to] = arcs[a];
    const int var = arc_flow_var(a);
    const auto& info = vars_[static_cast<std::size_t>(var)];
    x[var] = std::clamp(w[to] - w[from], info.lower, info.upper);
  }

  for (const auto& b : pipes_) {
    const double p0 = x[b.pressure_vars.front()];
    const double pn = x[b.pressure_vars.back()];
    for (int k = 1; k < b.intervals; ++k) {
      const double t = static_cast<double>(k) / b.intervals;
      x[b.pressure_vars[static_cast<std::size_t>(k)]] = (1.0 - t) * p0 + t * pn;
    }
  }
  return x;
}

ipm::StartPoint NlpInstance::warm_start(const NlpSolution& previous) const {
  ipm::StartPoint sp;
  const int n = num_variables();
  const std::size_t shared_vars = num_nodes_ + num_arcs_ + num_compressors_;
  const std::size_t shared_rows = num_nodes_ + num_compressors_;
  if (previous.x.size() < shared_vars || previous.y_scaled.size() < shared_rows) {
    sp.x = initial_point();
    return sp;
  }

  sp.x = ipm::Vector::Zero(n);
  ipm::Vector y = ipm::Vector::Zero(num_rows_);
  ipm::Vector zl = ipm::Vector::Zero(n), zu = ipm::Vector::Zero(n);
  for (std::size_t i = 0; i < shared_vars; ++i) {
    sp.x[static_cast<int>(i)] = previous.x[i];
    zl[static_cast<int>(i)] = previous.z_lower_scaled[i];
    zu[static_cast<int>(i)] = previous.z_upper_scaled[i];
  }
  for (std::size_t r = 0; r < shared_rows; ++r) y[static_cast<int>(r)] = previous.y_scaled[r];

  // Rows of the previous instance's pipe blocks follow network order.
  std::size_t prev_row = shared_rows;
  std::size_t prev_var = shared_vars;
  for (const auto& b : pipes_) {
    const auto& prof = previous.pipe_profiles.at(b.id);
    const int prev_n = previous.state.at(b.id).intervals;
    const bool same = prev_n == b.intervals;
    // Bound multipliers of interior pressures, padded at the pipe ends.
    std::vector<double> prev_zl(static_cast<std::size_t>(prev_n) + 1, 0.0);
    std::vector<double> prev_zu(prev_zl.size(), 0.0);
    if (previous.z_lower_scaled.size() >= prev_var + static_cast<std::size_t>(prev_n) - 1) {
      for (int k = 1; k < prev_n; ++k) {
        prev_zl[static_cast<std::size_t>(k)] = previous.z_lower_scaled[prev_var + static_cast<std::size_t>(k) - 1];
        prev_zu[static_cast<std::size_t>(k)] = previous.z_upper_scaled[prev_var + static_cast<std::size_t>(k) - 1];
      }
      if (prev_n > 1) {
        prev_zl.front() = prev_zl[1];
        prev_zl.back() = prev_zl[static_cast<std::size_t>(prev_n) - 1];
        prev_zu.front() = prev_zu[1];
        prev_zu.back() = prev_zu[static_cast<std::size_t>(prev_n) - 1];
      }
    }
    for (int k = 1; k < b.intervals; ++k) {
      const double t = static_cast<double>(k) / b.intervals;
      const int v = b.pressure_vars[static_cast<std::size_t>(k)];
      if (same) {
        sp.x[v] = prof[static_cast<std::size_t>(k)];
        zl[v] = prev_zl[static_cast<std::size_t>(k)];
        zu[v] = prev_zu[static_cast<std::size_t>(k)];
      } else {
        sp.x[v] = interpolate_profile(prof, t);
        zl[v] = interpolate_profile(prev_zl, t);
        zu[v] = interpolate_profile(prev_zu, t);
      }
    }
    prev_var += static_cast<std::size_t>(std::max(prev_n - 1, 0));
    // Row k of a pipe block sits at position k / n; multipliers of the
    // scaled rows approximate a continuous adjoint and are interpolated.
    std::vector<double> prev_y(static_cast<std::size_t>(prev_n) + 1);
    for (int k = 1; k <= prev_n; ++k)
      prev_y[static_cast<std::size_t>(k)] = previous.y_scaled[prev_row + static_cast<std::size_t>(k) - 1];
    prev_y[0] = prev_y[1];
    for (int k = 1; k <= b.intervals; ++k) {
      const double t = static_cast<double>(k) / b.intervals;
      y[b.first_row + k - 1] = same ? prev_y[static_cast<std::size_t>(k)] : interpolate_profile(prev_y, t);
    }
    prev_row += static_cast<std::size_t>(prev_n);
  }
  sp.y_scaled = y;
  sp.z_lower_scaled = zl;
  sp.z_upper_scaled = zu;
  return sp;
}

NlpSolution NlpInstance::make_solution(const ipm::Result& result) const {
  NlpSolution s;
  switch (result.status) {
    case ipm::Status::Optimal: s.status = NlpStatus::LocalOptimum; break;
    case ipm::Status::Infeasible: s.status = NlpStatus::Infeasible; break;
    default: s.status = NlpStatus::IterationLimit; break;
  }
  s.objective = result.objective;
  s.kkt_error = result.kkt_error;
  s.stationarity = result.stationarity;
  s.constraint_violation = result.constraint_violation;
  s.iterations = result.iterations;
  s.message = result.message;
  s.state = state_;
  const auto& x = result.x;
  for (std::size_t v = 0; v < num_nodes_; ++v) s.node_pressures[node_ids_[v]] = x[static_cast<int>(v)];
  for (std::size_t a = 0; a < num_arcs_; ++a) s.arc_flows[arc_ids_[a]] = x[arc_flow_var(a)];
  for (std::size_t c = 0; c < compressors_.size(); ++c) s.lifts[compressors_[c].id] = x[lift_var(c)];
  for (const auto& b : pipes_) {
    std::vector<double> prof;
    prof.reserve(b.pressure_vars.size());
    for (int v : b.pressure_vars) prof.push_back(x[v]);
    s.pipe_profiles[b.id] = std::move(prof);
  }
  s.x.assign(x.data(), x.data() + x.size());
  s.y_scaled.assign(result.y_scaled.data(), result.y_scaled.data() + result.y_scaled.size());
  s.z_lower_scaled.assign(result.z_lower_scaled.data(), result.z_lower_scaled.data() + result.z_lower_scaled.size());
  s.z_upper_scaled.assign(result.z_upper_scaled.data(), result.z_upper_scaled.data() + result.z_upper_scaled.size());
  s.mu = result.mu;
  return s;
}

void NlpInstance::dump(std::ostream& os, const ipm::Vector& x) const {
  os << std::setprecision(17);
  os << "# variables " << num_variables() << "\n";
  for (int i = 0; i < num_variables(); ++i) {
    const auto& v = vars_[static_cast<std::size_t>(i)];
    os << i << " " << v.name() << " lower=" << v.lower << " upper=" << v.upper << " value=" << x[i] << "\n";
  }
  os << "# objective " << objective(x) << "\n";
  for (const auto& c : compressors_) os << "cost " << c.id << " " << c.cost << "\n";
  const auto res = residuals(x);
  os << "# constraints " << num_rows_ << "\n";
  for (std::size_t v = 0; v < num_nodes_; ++v) os << v << " balance[" << node_ids_[v] << "] " << res[v] << "\n";
  for (std::size_t k = 0; k < compressors_.size(); ++k)
    os << compressor_row(k) << " compressor[" << compressors_[k].id << "] "
       << res[static_cast<std::size_t>(compressor_row(k))] << "\n";
  for (const auto& b : pipes_)
    for (int k = 1; k <= b.intervals; ++k)
      os << b.first_row + k - 1 << " pipe[" << b.id << "#" << k << ",level=" << level_number(b.level)
         << "] " << res[static_cast<std::size_t>(b.first_row + k - 1)] << "\n";
}

NlpSolution solve(const NlpInstance& instance, const NlpSolution* warm_start) {
  const auto& o = instance.options();
  ipm::Options opt;
  opt.tolerance = o.eps_opt;
  opt.constraint_violation_tolerance = o.eps_opt;
  opt.max_iterations = o.max_iterations;
  opt.verbose = o.verbose;

  ipm::StartPoint start;
  if (warm_start) {
    start = instance.warm_start(*warm_start);
    const double prev_mu = warm_start->mu > 0.0 ? warm_start->mu : 1e-9;
    opt.mu_init = o.warm_start_mu > 0.0 ? std::max(o.warm_start_mu, prev_mu) : prev_mu;
  } else {
    start.x = instance.initial_point();
  }
  return instance.make_solution(ipm::solve(instance, start, opt));
}

}  // namespace gasadapt
