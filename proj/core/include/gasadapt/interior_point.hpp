#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace gasadapt::ipm {

using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

/// Bounds at or beyond this magnitude are treated as absent.
inline constexpr double kInfinity = 1e19;

/// Smooth equality-constrained problem with simple bounds:
///
///   min f(x)  s.t.  c(x) = 0,  lower <= x <= upper.
///
/// `jacobian` and `hessian` must report the same sparsity structure on every
/// call (values may be zero). `hessian` returns the lower triangle
/// (row >= col) of  obj_factor * grad^2 f + sum_i y_i grad^2 c_i.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int num_variables() const = 0;
  virtual int num_constraints() const = 0;
  virtual void bounds(Vector& lower, Vector& upper) const = 0;

  virtual double objective(const Vector& x) const = 0;
  virtual void objective_gradient(const Vector& x, Vector& grad) const = 0;
  virtual void constraints(const Vector& x, Vector& c) const = 0;
  virtual void jacobian(const Vector& x, std::vector<Triplet>& out) const = 0;
  virtual void hessian(const Vector& x, double obj_factor, const Vector& y, std::vector<Triplet>& out) const = 0;

  /// Variable scaling x = D_x * x_scaled. Empty means unit scaling.
  virtual Vector variable_scaling() const { return {}; }
  /// Constraint scaling c_scaled = D_c * c. Empty means unit scaling.
  virtual Vector constraint_scaling() const { return {}; }
  virtual double objective_scaling() const { return 1.0; }
};

enum class Status { Optimal, Infeasible, IterationLimit, NumericalFailure };

const char* to_string(Status s);

struct Options {
  /// Tolerance on the scaled KKT error (dual infeasibility, primal
  /// infeasibility, complementarity).
  double tolerance = 1e-8;
  /// Tolerance on the unscaled max-norm constraint violation.
  double constraint_violation_tolerance = 1e-8;
  int max_iterations = 500;
  double mu_init = 0.1;
  double mu_reduction = 0.2;
  /// Barrier update mu <- min(mu_reduction * mu, mu^power).
  double mu_superlinear_power = 1.5;
  /// Relative push of the starting point into the interior of the bounds.
  double bound_push = 1e-2;
  /// Smallest nonzero Hessian shift applied by inertia correction.
  double min_hessian_perturbation = 1e-8;
  /// Constant negative shift on the constraint block of the KKT matrix,
  /// keeps the system regular when equality constraints are dependent.
  double constraint_regularization = 1e-8;
  int max_restorations = 4;
  bool verbose = false;
};

/// Optional starting data in the unscaled space. Multipliers are those of the
/// scaled problem (they are what the solver returns in `Result`).
struct StartPoint {
  Vector x;
  std::optional<Vector> y_scaled;
  std::optional<Vector> z_lower_scaled;
  std::optional<Vector> z_upper_scaled;
};

struct Result {
  Status status = Status::NumericalFailure;
  Vector x;  // unscaled
  Vector y_scaled;
  Vector z_lower_scaled;
  Vector z_upper_scaled;
  double objective = 0.0;
  double kkt_error = 0.0;             // scaled, with mu = 0
  double constraint_violation = 0.0;  // unscaled max-norm
  double stationarity = 0.0;          // scaled dual infeasibility
  double mu = 0.0;
  int iterations = 0;
  int restorations = 0;
  std::string message;
};

/// Primal-dual interior-point method: logarithmic barrier on the bounds,
/// damped Newton steps on the perturbed KKT system factored by a sparse
/// LDL^T with inertia correction, fraction-to-the-boundary rule, l1 merit
/// line search with a second-order correction, and monotone reduction of the
/// barrier parameter. A feasibility restoration phase (minimizing the squared
/// constraint violation within the bounds) is entered when the line search
/// stalls; if it cannot make the constraints vanish the problem is reported
/// infeasible.
Result solve(const Problem& problem, const StartPoint& start, const Options& options = {});

}  // namespace gasadapt::ipm
