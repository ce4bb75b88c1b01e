#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace ptds {

/// Linear constraint system  A v <= b,  E v = e.
/// Either block may have zero rows; column counts must agree when both are present.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;

  int dim() const { return A.rows() > 0 ? int(A.cols()) : int(E.cols()); }
};

enum class QpStatus {
  Converged,
  IterationCap,          // best iterate returned, KKT residual above tolerance
  InfeasibleEqualities,  // E v = e has no solution
  InfeasibleInequalities // reduced inequalities contradict (system is empty)
};

/// Output of project_onto_system. `v` minimizes ||v - f|| over the system;
/// `lambda` holds one nonnegative multiplier per inequality row.
struct QpResult {
  Eigen::VectorXd v;
  Eigen::VectorXd lambda;
  int iterations = 0;        // dual coordinate sweeps
  double kkt_residual = 0.0; // max of primal violation and complementarity slack
  QpStatus status = QpStatus::Converged;
};

struct QpOptions {
  double tol = 1e-9;
  int max_sweeps = 10000;
};

/// Euclidean projection of f onto {A v <= b, E v = e}.
///
/// Equalities are eliminated exactly first (minimum-norm particular solution
/// plus an orthonormal null-space basis); inequalities are then handled by
/// cyclic dual coordinate ascent on the reduced problem. Suitable for the
/// small, dense systems produced by active constraint sets.
QpResult project_onto_system(const Eigen::VectorXd& f, const LinearSystem& sys,
                             const QpOptions& opts = {});

/// Returns a point satisfying the system within `tol`, or nullopt if the
/// system is infeasible. Decided by minimizing the convex piecewise-quadratic
/// violation 0.5*||(Av-b)+||^2 + 0.5*||Ev-e||^2 with a semismooth Newton
/// iteration; a stationary point with positive violation certifies emptiness.
std::optional<Eigen::VectorXd> feasible_point(const LinearSystem& sys, double tol = 1e-9);

/// Nonnegative least squares: minimize ||G x - r|| subject to x >= 0
/// (Lawson-Hanson active set).
struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;
};
NnlsResult nnls(const Eigen::MatrixXd& G, const Eigen::VectorXd& r, double tol = 1e-12);

/// Best approximation of r by  G_cone * lambda + G_free * mu  with lambda >= 0.
/// Used to verify stationarity of projections: the residual is the distance
/// from r to the cone spanned by active inequality gradients plus the span of
/// equality gradients (gradients are the *columns* of the inputs).
struct ConeDecomposition {
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu;
  double residual = 0.0;
};
ConeDecomposition cone_decompose(const Eigen::VectorXd& r, const Eigen::MatrixXd& g_cone,
                                 const Eigen::MatrixXd& g_free);

/// Numerical rank with a relative singular value threshold (sigma_i > rel * sigma_max).
int numerical_rank(const Eigen::MatrixXd& m, double rel = 1e-9);

} // namespace ptds
