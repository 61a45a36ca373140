#include "gasadapt/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

namespace gasadapt::ipm {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kKappaEps = 10.0;      // barrier subproblem accuracy factor
constexpr double kKappaSigma = 1e10;    // bound multiplier safeguard
constexpr double kTauMin = 0.99;        // fraction-to-the-boundary
constexpr double kArmijo = 1e-4;
constexpr double kGammaTheta = 1e-5;  // filter margins
constexpr double kGammaPhi = 1e-8;
constexpr double kGammaAlpha = 0.05;
constexpr double kSTheta = 1.1;  // switching condition exponents
constexpr double kSPhi = 2.3;
constexpr double kKappaSoc = 0.99;
constexpr int kMaxSoc = 4;
constexpr double kScaleMax = 100.0;
constexpr double kAlphaMin = 1e-14;
constexpr double kFirstPerturbation = 1e-4;

/// Views a problem in its scaled coordinates.
class ScaledProblem final : public Problem {
 public:
  explicit ScaledProblem(const Problem& base) : base_(base) {
    const int n = base.num_variables();
    const int m = base.num_constraints();
    dx_ = base.variable_scaling();
    if (dx_.size() == 0) dx_ = Vector::Ones(n);
    dc_ = base.constraint_scaling();
    if (dc_.size() == 0) dc_ = Vector::Ones(m);
    df_ = base.objective_scaling();
  }

  int num_variables() const override { return base_.num_variables(); }
  int num_constraints() const override { return base_.num_constraints(); }

  void bounds(Vector& lower, Vector& upper) const override {
    base_.bounds(lower, upper);
    for (int i = 0; i < lower.size(); ++i) {
      if (lower[i] > -kInfinity) lower[i] /= dx_[i];
      if (upper[i] < kInfinity) upper[i] /= dx_[i];
    }
  }

  double objective(const Vector& x) const override { return df_ * base_.objective(unscale(x)); }

  void objective_gradient(const Vector& x, Vector& grad) const override {
    base_.objective_gradient(unscale(x), grad);
    grad = df_ * grad.cwiseProduct(dx_);
  }

  void constraints(const Vector& x, Vector& c) const override {
    base_.constraints(unscale(x), c);
    c = c.cwiseProduct(dc_);
  }

  void jacobian(const Vector& x, std::vector<Triplet>& out) const override {
    base_.jacobian(unscale(x), out);
    for (auto& t : out) t = Triplet(t.row(), t.col(), t.value() * dc_[t.row()] * dx_[t.col()]);
  }

  void hessian(const Vector& x, double obj_factor, const Vector& y, std::vector<Triplet>& out) const override {
    base_.hessian(unscale(x), obj_factor * df_, y.cwiseProduct(dc_), out);
    for (auto& t : out) t = Triplet(t.row(), t.col(), t.value() * dx_[t.row()] * dx_[t.col()]);
  }

  Vector unscale(const Vector& x) const { return x.cwiseProduct(dx_); }
  Vector scale(const Vector& x) const { return x.cwiseQuotient(dx_); }
  const Vector& constraint_factors() const { return dc_; }

 private:
  const Problem& base_;
  Vector dx_;
  Vector dc_;
  double df_ = 1.0;
};

/// min 0.5 ||c(x)||^2 within the bounds of an (already scaled) problem.
/// The Hessian is the Gauss-Newton term J^T J.
class RestorationProblem final : public Problem {
 public:
  explicit RestorationProblem(const Problem& base) : base_(base) {}

  int num_variables() const override { return base_.num_variables(); }
  int num_constraints() const override { return 0; }
  void bounds(Vector& lower, Vector& upper) const override { base_.bounds(lower, upper); }

  double objective(const Vector& x) const override {
    Vector c(base_.num_constraints());
    base_.constraints(x, c);
    return 0.5 * c.squaredNorm();
  }

  void objective_gradient(const Vector& x, Vector& grad) const override {
    Vector c(base_.num_constraints());
    base_.constraints(x, c);
    grad = jacobian_matrix(x).transpose() * c;
  }

  void constraints(const Vector&, Vector& c) const override { c.resize(0); }
  void jacobian(const Vector&, std::vector<Triplet>& out) const override { out.clear(); }

  void hessian(const Vector& x, double obj_factor, const Vector&, std::vector<Triplet>& out) const override {
    const SparseMatrix j = jacobian_matrix(x);
    const SparseMatrix jtj = SparseMatrix(j.transpose()) * j;
    out.clear();
    for (int k = 0; k < jtj.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(jtj, k); it; ++it)
        if (it.row() >= it.col()) out.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), obj_factor * it.value());
  }

  double violation(const Vector& x) const {
    Vector c(base_.num_constraints());
    base_.constraints(x, c);
    return c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;
  }

 private:
  SparseMatrix jacobian_matrix(const Vector& x) const {
    std::vector<Triplet> t;
    base_.jacobian(x, t);
    SparseMatrix j(base_.num_constraints(), base_.num_variables());
    j.setFromTriplets(t.begin(), t.end());
    return j;
  }

  const Problem& base_;
};

struct PhaseOutcome {
  Status status = Status::NumericalFailure;
  Vector x, y, zl, zu;
  double mu = 0.0;
  double kkt_error = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  int restorations = 0;
  bool reached_target = false;
  std::string message;
};

/// One run of the barrier method on a scaled problem.
class BarrierMethod {
 public:
  BarrierMethod(const Problem& problem, const Options& options, bool restoration_phase)
      : p_(problem), opt_(options), restoration_(restoration_phase), n_(problem.num_variables()),
        m_(problem.num_constraints()) {
    lower_.resize(n_);
    upper_.resize(n_);
    p_.bounds(lower_, upper_);
    has_l_.assign(n_, false);
    has_u_.assign(n_, false);
    fixed_.assign(n_, false);
    free_index_.assign(n_, -1);
    for (int i = 0; i < n_; ++i) {
      has_l_[i] = lower_[i] > -kInfinity;
      has_u_[i] = upper_[i] < kInfinity;
      if (has_l_[i] && has_u_[i] && upper_[i] - lower_[i] <= 1e-14 * std::max(1.0, std::abs(lower_[i]))) {
        fixed_[i] = true;
        has_l_[i] = has_u_[i] = false;
      } else {
        free_index_[i] = nf_++;
      }
    }
  }

  /// Unscaled constraint violation of the outer problem, used for the
  /// termination test of the main phase.
  std::function<double(const Vector&)> outer_violation;
  /// Restoration phase: stop as soon as this measure drops below the target.
  std::function<double(const Vector&)> restoration_measure;
  double restoration_target = 0.0;
  /// Entered when the main phase line search stalls.
  std::function<std::optional<Vector>(const Vector&, int&, bool&)> restore;

  PhaseOutcome run(Vector x, std::optional<Vector> y0, std::optional<Vector> zl0, std::optional<Vector> zu0,
                   double mu_init, double bound_push) {
    PhaseOutcome out;
    mu_ = mu_init;
    mu_min_ = std::min(opt_.tolerance, opt_.constraint_violation_tolerance) / 10.0;
    tau_ = std::max(kTauMin, 1.0 - mu_);

    push_into_interior(x, bound_push);
    Vector y = (y0 && y0->size() == m_) ? *y0 : Vector::Zero(m_);
    Vector zl = Vector::Zero(n_), zu = Vector::Zero(n_);
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i]) zl[i] = (zl0 && zl0->size() == n_ && (*zl0)[i] > 0.0) ? (*zl0)[i] : mu_ / (x[i] - lower_[i]);
      if (has_u_[i]) zu[i] = (zu0 && zu0->size() == n_ && (*zu0)[i] > 0.0) ? (*zu0)[i] : mu_ / (upper_[i] - x[i]);
    }
    if (!zl0 && !zu0) {
      for (int i = 0; i < n_; ++i) {
        if (has_l_[i]) zl[i] = 1.0;
        if (has_u_[i]) zu[i] = 1.0;
      }
    }
    safeguard_multipliers(x, zl, zu);

    filter_.clear();
    filter_mu_ = -1.0;
    theta_max_ = theta_min_ = 0.0;
    double delta_w_last = 0.0;
    double theta_best = std::numeric_limits<double>::infinity();
    int theta_best_iter = 0;
    bool force_mu_reduction = false;

    Vector g(n_), c(m_), grad_lag(n_);
    std::vector<Triplet> jac_t, hess_t;

    for (int iter = 0;; ++iter) {
      out.iterations = iter;
      evaluate(x, g, c, jac_t);
      SparseMatrix jac(m_, n_);
      jac.setFromTriplets(jac_t.begin(), jac_t.end());

      const Errors err = errors(x, y, zl, zu, g, c, jac);
      const double e0 = err.total(0.0);
      out.kkt_error = e0;
      out.stationarity = err.dual / err.s_d;

      if (opt_.verbose) {
        std::cerr << (restoration_ ? "R" : " ") << iter << " f=" << p_.objective(x) << " inf_pr=" << err.primal
                  << " inf_du=" << err.dual / err.s_d << " mu=" << mu_ << " E0=" << e0 << "\n";
      }

      if (restoration_ && restoration_measure && restoration_measure(x) <= restoration_target) {
        out.reached_target = true;
        return finish(out, Status::Optimal, x, y, zl, zu, "restoration target reached");
      }
      if (e0 <= opt_.tolerance && (!outer_violation || outer_violation(x) <= opt_.constraint_violation_tolerance))
        return finish(out, Status::Optimal, x, y, zl, zu, "converged");
      if (iter >= opt_.max_iterations) return finish(out, Status::IterationLimit, x, y, zl, zu, "iteration limit");

      // Monotone barrier update.
      while (mu_ > mu_min_ && (force_mu_reduction || err.total(mu_) <= kKappaEps * mu_)) {
        mu_ = std::max(mu_min_, std::min(opt_.mu_reduction * mu_, std::pow(mu_, opt_.mu_superlinear_power)));
        tau_ = std::max(kTauMin, 1.0 - mu_);
        force_mu_reduction = false;
      }
      force_mu_reduction = false;

      p_.hessian(x, 1.0, y, hess_t);

      // Barrier gradient and Newton right-hand side.
      Vector grad_phi = g;
      Vector sigma = Vector::Zero(n_);
      for (int i = 0; i < n_; ++i) {
        if (has_l_[i]) {
          const double s = x[i] - lower_[i];
          grad_phi[i] -= mu_ / s;
          sigma[i] += zl[i] / s;
        }
        if (has_u_[i]) {
          const double s = upper_[i] - x[i];
          grad_phi[i] += mu_ / s;
          sigma[i] += zu[i] / s;
        }
      }
      Vector jty = m_ ? Vector(jac.transpose() * y) : Vector::Zero(n_);
      Vector rhs(nf_ + m_);
      for (int i = 0; i < n_; ++i)
        if (free_index_[i] >= 0) rhs[free_index_[i]] = -(grad_phi[i] + jty[i]);
      for (int r = 0; r < m_; ++r) rhs[nf_ + r] = -c[r];

      double delta_w = 0.0;
      if (!factorize(hess_t, jac_t, sigma, delta_w_last, delta_w)) {
        return finish(out, Status::NumericalFailure, x, y, zl, zu, "KKT factorization failed");
      }
      if (delta_w > 0.0) delta_w_last = delta_w;

      const Vector sol = solve_kkt(rhs);
      Vector dx = Vector::Zero(n_), dy(m_);
      for (int i = 0; i < n_; ++i)
        if (free_index_[i] >= 0) dx[i] = sol[free_index_[i]];
      for (int r = 0; r < m_; ++r) dy[r] = sol[nf_ + r];

      Vector dzl = Vector::Zero(n_), dzu = Vector::Zero(n_);
      for (int i = 0; i < n_; ++i) {
        if (has_l_[i]) {
          const double s = x[i] - lower_[i];
          dzl[i] = mu_ / s - zl[i] - zl[i] / s * dx[i];
        }
        if (has_u_[i]) {
          const double s = upper_[i] - x[i];
          dzu[i] = mu_ / s - zu[i] + zu[i] / s * dx[i];
        }
      }

      const double alpha_max = max_step(x, dx);
      const double alpha_z = max_dual_step(zl, dzl, zu, dzu);

      // Tiny steps: accept and tighten the barrier.
      bool tiny = true;
      for (int i = 0; i < n_ && tiny; ++i)
        if (std::abs(dx[i]) > 10.0 * kEps * (1.0 + std::abs(x[i]))) tiny = false;

      double alpha = alpha_max;
      Vector x_new = x + alpha * dx;
      bool accepted = tiny;

      if (!accepted) {
        const double theta = m_ ? c.lpNorm<1>() : 0.0;
        const double phi = barrier_value(x);
        const double slope = grad_phi.dot(dx);
        if (filter_mu_ != mu_) {
          filter_.clear();
          filter_mu_ = mu_;
        }
        if (!(theta_max_ > 0.0)) {
          theta_max_ = 1e4 * std::max(1.0, theta);
          theta_min_ = 1e-4 * std::max(1.0, theta);
        }
        // Smallest step before falling back to restoration.
        double alpha_min = kGammaTheta;
        if (slope < 0.0) {
          alpha_min = std::min(alpha_min, kGammaPhi * theta / -slope);
          if (theta <= theta_min_)
            alpha_min = std::min(alpha_min, std::pow(theta, kSTheta) / std::pow(-slope, kSPhi));
        }
        alpha_min = std::max(kAlphaMin, kGammaAlpha * alpha_min);

        bool f_type = false;
        auto acceptable = [&](const Vector& trial, double trial_alpha) {
          if (!interior(trial)) return false;
          const double phi_t = barrier_value(trial);
          if (!std::isfinite(phi_t)) return false;
          double theta_t = 0.0;
          if (m_) {
            Vector ct(m_);
            p_.constraints(trial, ct);
            theta_t = ct.lpNorm<1>();
          }
          if (!std::isfinite(theta_t) || theta_t > theta_max_) return false;
          for (const auto& [ft, fp] : filter_)
            if (theta_t >= ft && phi_t >= fp) return false;
          const bool switching =
              slope < 0.0 && trial_alpha * std::pow(-slope, kSPhi) > std::pow(theta, kSTheta);
          if (theta <= theta_min_ && switching) {
            f_type = true;
            return phi_t <= phi + kArmijo * trial_alpha * slope + 10.0 * kEps * std::max(1.0, std::abs(phi));
          }
          f_type = false;
          return theta_t <= (1.0 - kGammaTheta) * theta || phi_t <= phi - kGammaPhi * theta;
        };

        for (bool first = true; alpha >= alpha_min; first = false, alpha *= 0.5) {
          x_new = x + alpha * dx;
          if (acceptable(x_new, alpha)) {
            accepted = true;
            break;
          }
          if (first && m_ > 0) {
            // Second-order corrections for the full step.
            Vector c_acc = alpha * c;
            Vector step = alpha * dx;
            double theta_prev = std::numeric_limits<double>::infinity();
            for (int k = 0; k < kMaxSoc; ++k) {
              Vector c_trial(m_);
              p_.constraints(x + step, c_trial);
              const double theta_trial = c_trial.lpNorm<1>();
              if (!(theta_trial < kKappaSoc * theta_prev)) break;
              theta_prev = theta_trial;
              c_acc += c_trial;
              Vector rhs_soc(nf_ + m_);
              for (int i = 0; i < n_; ++i)
                if (free_index_[i] >= 0) rhs_soc[free_index_[i]] = rhs[free_index_[i]];
              for (int r = 0; r < m_; ++r) rhs_soc[nf_ + r] = -c_acc[r];
              const Vector corr = solve_kkt(rhs_soc);
              Vector dsoc = Vector::Zero(n_);
              for (int i = 0; i < n_; ++i)
                if (free_index_[i] >= 0) dsoc[i] = corr[free_index_[i]];
              const double a_soc = max_step(x, dsoc);
              step = a_soc * dsoc;
              if (acceptable(x + step, alpha)) {
                x_new = x + step;
                accepted = true;
                break;
              }
            }
            if (accepted) break;
          }
        }
        if (accepted && !f_type) filter_.emplace_back((1.0 - kGammaTheta) * theta, phi - kGammaPhi * theta);
      }

      if (!accepted) {
        if (!restoration_ && restore) {
          int restorations = out.restorations;
          bool infeasible = false;
          auto restored = restore(x, restorations, infeasible);
          out.restorations = restorations;
          if (!restored) {
            return finish(out, infeasible ? Status::Infeasible : Status::NumericalFailure, x, y, zl, zu,
                          infeasible ? "restoration could not reduce the constraint violation"
                                     : "line search failed");
          }
          x = *restored;
          push_into_interior(x, 1e-8);
          y.setZero();
          for (int i = 0; i < n_; ++i) {
            if (has_l_[i]) zl[i] = mu_ / (x[i] - lower_[i]);
            if (has_u_[i]) zu[i] = mu_ / (upper_[i] - x[i]);
          }
          filter_.clear();
          theta_best = std::numeric_limits<double>::infinity();
          theta_best_iter = iter;
          continue;
        }
        return finish(out, Status::NumericalFailure, x, y, zl, zu, "line search failed");
      }

      if (tiny) force_mu_reduction = true;
      x = x_new;
      y += alpha * dy;
      zl += alpha_z * dzl;
      zu += alpha_z * dzu;
      safeguard_multipliers(x, zl, zu);

      // Stagnating infeasibility also triggers restoration.
      if (!restoration_ && restore && m_ > 0) {
        Vector c_now(m_);
        p_.constraints(x, c_now);
        const double theta = c_now.lpNorm<Eigen::Infinity>();
        if (theta < 0.99 * theta_best) {
          theta_best = theta;
          theta_best_iter = iter;
        } else if (theta > 1e-6 && iter - theta_best_iter > 40) {
          int restorations = out.restorations;
          bool infeasible = false;
          auto restored = restore(x, restorations, infeasible);
          out.restorations = restorations;
          if (!restored)
            return finish(out, infeasible ? Status::Infeasible : Status::NumericalFailure, x, y, zl, zu,
                          "infeasibility stagnated");
          x = *restored;
          push_into_interior(x, 1e-8);
          y.setZero();
          for (int i = 0; i < n_; ++i) {
            if (has_l_[i]) zl[i] = mu_ / (x[i] - lower_[i]);
            if (has_u_[i]) zu[i] = mu_ / (upper_[i] - x[i]);
          }
          filter_.clear();
          theta_best = std::numeric_limits<double>::infinity();
          theta_best_iter = iter;
        }
      }
    }
  }

 private:
  struct Errors {
    double dual = 0.0;
    double primal = 0.0;
    double s_d = 1.0;
    double s_c = 1.0;
    Vector sl, sl_z, su, su_z;  // slack * multiplier products per bound

    double total(double mu) const {
      double compl_err = 0.0;
      for (int i = 0; i < sl_z.size(); ++i) compl_err = std::max(compl_err, std::abs(sl_z[i] - mu));
      for (int i = 0; i < su_z.size(); ++i) compl_err = std::max(compl_err, std::abs(su_z[i] - mu));
      return std::max({dual / s_d, primal, compl_err / s_c});
    }
  };

  void evaluate(const Vector& x, Vector& g, Vector& c, std::vector<Triplet>& jac_t) const {
    p_.objective_gradient(x, g);
    if (m_) {
      p_.constraints(x, c);
      p_.jacobian(x, jac_t);
    } else {
      jac_t.clear();
    }
  }

  Errors errors(const Vector& x, const Vector& y, const Vector& zl, const Vector& zu, const Vector& g,
                const Vector& c, const SparseMatrix& jac) const {
    Errors e;
    Vector grad_lag = g;
    if (m_) grad_lag += jac.transpose() * y;
    grad_lag -= zl;
    grad_lag += zu;
    double zsum = 0.0;
    int nbounds = 0;
    std::vector<double> lz, uz;
    for (int i = 0; i < n_; ++i) {
      if (fixed_[i]) continue;
      e.dual = std::max(e.dual, std::abs(grad_lag[i]));
      if (has_l_[i]) {
        lz.push_back((x[i] - lower_[i]) * zl[i]);
        zsum += zl[i];
        ++nbounds;
      }
      if (has_u_[i]) {
        uz.push_back((upper_[i] - x[i]) * zu[i]);
        zsum += zu[i];
        ++nbounds;
      }
    }
    e.sl_z = Eigen::Map<Vector>(lz.data(), static_cast<Eigen::Index>(lz.size()));
    e.su_z = Eigen::Map<Vector>(uz.data(), static_cast<Eigen::Index>(uz.size()));
    e.primal = m_ ? c.lpNorm<Eigen::Infinity>() : 0.0;
    const double ysum = m_ ? y.lpNorm<1>() : 0.0;
    e.s_d = std::max(kScaleMax, (ysum + zsum) / std::max(1, m_ + nbounds)) / kScaleMax;
    e.s_c = std::max(kScaleMax, zsum / std::max(1, nbounds)) / kScaleMax;
    return e;
  }

  void push_into_interior(Vector& x, double push) const {
    for (int i = 0; i < n_; ++i) {
      if (fixed_[i]) {
        x[i] = lower_[i];
        continue;
      }
      const bool l = has_l_[i], u = has_u_[i];
      if (l && u) {
        const double width = upper_[i] - lower_[i];
        const double pl_eff = std::min(push * std::max(1.0, std::abs(lower_[i])), push * width);
        const double pu_eff = std::min(push * std::max(1.0, std::abs(upper_[i])), push * width);
        x[i] = std::clamp(x[i], lower_[i] + pl_eff, upper_[i] - pu_eff);
      } else if (l) {
        x[i] = std::max(x[i], lower_[i] + push * std::max(1.0, std::abs(lower_[i])));
      } else if (u) {
        x[i] = std::min(x[i], upper_[i] - push * std::max(1.0, std::abs(upper_[i])));
      }
    }
  }

  void safeguard_multipliers(const Vector& x, Vector& zl, Vector& zu) const {
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i]) {
        const double s = x[i] - lower_[i];
        zl[i] = std::clamp(zl[i], mu_ / (kKappaSigma * s), kKappaSigma * mu_ / s);
      }
      if (has_u_[i]) {
        const double s = upper_[i] - x[i];
        zu[i] = std::clamp(zu[i], mu_ / (kKappaSigma * s), kKappaSigma * mu_ / s);
      }
    }
  }

  double max_step(const Vector& x, const Vector& dx) const {
    double alpha = 1.0;
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i] && dx[i] < 0.0) alpha = std::min(alpha, -tau_ * (x[i] - lower_[i]) / dx[i]);
      if (has_u_[i] && dx[i] > 0.0) alpha = std::min(alpha, tau_ * (upper_[i] - x[i]) / dx[i]);
    }
    return alpha;
  }

  double max_dual_step(const Vector& zl, const Vector& dzl, const Vector& zu, const Vector& dzu) const {
    double alpha = 1.0;
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i] && dzl[i] < 0.0) alpha = std::min(alpha, -tau_ * zl[i] / dzl[i]);
      if (has_u_[i] && dzu[i] < 0.0) alpha = std::min(alpha, -tau_ * zu[i] / dzu[i]);
    }
    return alpha;
  }

  double barrier_value(const Vector& x) const {
    double v = p_.objective(x);
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i]) v -= mu_ * std::log(x[i] - lower_[i]);
      if (has_u_[i]) v -= mu_ * std::log(upper_[i] - x[i]);
    }
    return v;
  }

  bool interior(const Vector& x) const {
    for (int i = 0; i < n_; ++i) {
      if (has_l_[i] && !(x[i] > lower_[i])) return false;
      if (has_u_[i] && !(x[i] < upper_[i])) return false;
    }
    return true;
  }

  bool factorize(const std::vector<Triplet>& hess_t, const std::vector<Triplet>& jac_t, const Vector& sigma,
                 double delta_w_last, double& delta_w) {
    auto attempt = [&](double dw) {
      std::vector<Triplet> t;
      t.reserve(hess_t.size() + jac_t.size() + static_cast<std::size_t>(nf_ + m_));
      for (const auto& h : hess_t) {
        const int fi = free_index_[h.row()], fj = free_index_[h.col()];
        if (fi < 0 || fj < 0) continue;
        t.emplace_back(std::max(fi, fj), std::min(fi, fj), h.value());
      }
      for (int i = 0; i < n_; ++i)
        if (free_index_[i] >= 0) t.emplace_back(free_index_[i], free_index_[i], sigma[i] + dw);
      for (const auto& j : jac_t) {
        const int fj = free_index_[j.col()];
        if (fj < 0) continue;
        t.emplace_back(nf_ + j.row(), fj, j.value());
      }
      for (int r = 0; r < m_; ++r) t.emplace_back(nf_ + r, nf_ + r, -opt_.constraint_regularization);
      kkt_.resize(nf_ + m_, nf_ + m_);
      kkt_.setFromTriplets(t.begin(), t.end());
      kkt_.makeCompressed();
      if (!same_pattern()) {
        ldlt_.analyzePattern(kkt_);
        remember_pattern();
      }
      ldlt_.factorize(kkt_);
      if (ldlt_.info() != Eigen::Success) return false;
      const Vector d = ldlt_.vectorD();
      int pos = 0, neg = 0;
      for (int i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i])) return false;
        if (d[i] > 0.0) ++pos;
        else if (d[i] < 0.0) ++neg;
      }
      return pos == nf_ && neg == m_;
    };

    delta_w = 0.0;
    if (attempt(0.0)) return true;
    delta_w = delta_w_last == 0.0 ? kFirstPerturbation
                                  : std::max(opt_.min_hessian_perturbation, delta_w_last / 3.0);
    for (int k = 0; k < 60; ++k) {
      if (attempt(delta_w)) return true;
      delta_w *= (delta_w_last == 0.0 ? 100.0 : 8.0);
      if (delta_w > 1e40) break;
    }
    return false;
  }

  bool same_pattern() const {
    if (pattern_outer_.size() != static_cast<std::size_t>(kkt_.outerSize() + 1)) return false;
    if (pattern_inner_.size() != static_cast<std::size_t>(kkt_.nonZeros())) return false;
    return std::equal(pattern_outer_.begin(), pattern_outer_.end(), kkt_.outerIndexPtr()) &&
           std::equal(pattern_inner_.begin(), pattern_inner_.end(), kkt_.innerIndexPtr());
  }

  void remember_pattern() {
    pattern_outer_.assign(kkt_.outerIndexPtr(), kkt_.outerIndexPtr() + kkt_.outerSize() + 1);
    pattern_inner_.assign(kkt_.innerIndexPtr(), kkt_.innerIndexPtr() + kkt_.nonZeros());
  }

  Vector solve_kkt(const Vector& rhs) const {
    Vector sol = ldlt_.solve(rhs);
    // One step of iterative refinement against the factored matrix.
    const Vector residual = rhs - kkt_.selfadjointView<Eigen::Lower>() * sol;
    sol += ldlt_.solve(residual);
    return sol;
  }

  PhaseOutcome& finish(PhaseOutcome& out, Status status, const Vector& x, const Vector& y, const Vector& zl,
                       const Vector& zu, std::string message) const {
    out.status = status;
    out.x = x;
    out.y = y;
    out.zl = zl;
    out.zu = zu;
    out.mu = mu_;
    out.message = std::move(message);
    return out;
  }

  const Problem& p_;
  const Options& opt_;
  bool restoration_;
  int n_, m_;
  int nf_ = 0;
  Vector lower_, upper_;
  std::vector<bool> has_l_, has_u_, fixed_;
  std::vector<int> free_index_;
  double mu_ = 0.1;
  std::vector<std::pair<double, double>> filter_;
  double filter_mu_ = -1.0;
  double theta_max_ = 0.0;
  double theta_min_ = 0.0;
  double mu_min_ = 1e-9;
  double tau_ = 0.99;
  SparseMatrix kkt_;
  Ldlt ldlt_;
  std::vector<int> pattern_outer_, pattern_inner_;
};

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::IterationLimit: return "IterationLimit";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

Result solve(const Problem& problem, const StartPoint& start, const Options& options) {
  const ScaledProblem scaled(problem);
  const int m = problem.num_constraints();
  const Vector& dc = scaled.constraint_factors();

  BarrierMethod main(scaled, options, false);
  main.outer_violation = [&](const Vector& xs) {
    if (m == 0) return 0.0;
    Vector c(m);
    scaled.constraints(xs, c);
    return c.cwiseQuotient(dc).lpNorm<Eigen::Infinity>();
  };

  int total_restoration_iterations = 0;
  main.restore = [&](const Vector& xs, int& restorations, bool& infeasible) -> std::optional<Vector> {
    infeasible = false;
    if (restorations >= options.max_restorations) return std::nullopt;
    ++restorations;
    RestorationProblem resto(scaled);
    const double theta0 = resto.violation(xs);
    Options ropt = options;
    ropt.max_iterations = std::max(100, options.max_iterations / 2);
    BarrierMethod phase(resto, ropt, true);
    phase.restoration_measure = [&](const Vector& x) { return resto.violation(x); };
    phase.restoration_target = std::max(0.1 * theta0, 0.1 * options.constraint_violation_tolerance);
    const double mu0 = std::max(options.mu_init * 1e-2, std::min(0.1, theta0));
    PhaseOutcome r = phase.run(xs, std::nullopt, std::nullopt, std::nullopt, mu0, 1e-8);
    total_restoration_iterations += r.iterations;
    if (r.reached_target) return r.x;
    // Converged to a stationary point of the violation without reaching the
    // target: locally infeasible.
    infeasible = r.status == Status::Optimal || resto.violation(r.x) > 1e-6;
    return std::nullopt;
  };

  Vector x0 = start.x.size() == problem.num_variables() ? scaled.scale(start.x)
                                                        : Vector::Zero(problem.num_variables());
  const bool warm = start.y_scaled.has_value() || start.z_lower_scaled.has_value();
  PhaseOutcome r = main.run(x0, start.y_scaled, start.z_lower_scaled, start.z_upper_scaled, options.mu_init,
                            warm ? std::min(options.bound_push, 1e-12) : options.bound_push);

  Result res;
  res.status = r.status;
  res.x = scaled.unscale(r.x);
  res.y_scaled = r.y;
  res.z_lower_scaled = r.zl;
  res.z_upper_scaled = r.zu;
  res.objective = problem.objective(res.x);
  res.kkt_error = r.kkt_error;
  res.stationarity = r.stationarity;
  res.constraint_violation = main.outer_violation(r.x);
  res.mu = r.mu;
  res.iterations = r.iterations + total_restoration_iterations;
  res.restorations = r.restorations;
  res.message = r.message;
  return res;
}

}  // namespace gasadapt::ipm
