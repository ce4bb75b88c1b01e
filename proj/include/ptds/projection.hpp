#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ptds/domain.hpp"
#include "ptds/tangent.hpp"

namespace ptds {

/// Result of projecting a point or velocity. piece_index is -1 for
/// single-polyhedron projections, otherwise the index of the winning piece
/// (ties resolved to the lowest index). active_rows are the constraint rows
/// tight at the solution within the reporting tolerance.
struct ProjectionResult {
  Eigen::VectorXd vector;
  double distance = 0.0;
  int piece_index = -1;
  std::vector<int> active_rows;
  int iterations = 0;
};

struct ProjectOptions {
  double tol = 1e-9;       // KKT residual target
  int max_sweeps = 10000;  // dual coordinate sweeps before erroring
  double tie_tol = 1e-9;   // distances closer than this count as tied
};

/// Euclidean projection of f onto one feasible-velocity polyhedron.
/// Throws EmptyTangentError when the polyhedron is empty (qualification EMPTY
/// or inconsistent rows) and ConvergenceError past the sweep cap (message
/// carries the best distance reached).
ProjectionResult project_polyhedron(const Eigen::VectorXd& f, const TemporalTangentPolyhedron& p,
                                    const ProjectOptions& opts = {});

/// Projection onto a union of polyhedra: best member projection, ties to the
/// lowest piece index. Empty members are skipped; throws EmptyTangentError
/// when every member is empty.
ProjectionResult project_union(const Eigen::VectorXd& f, const PolyhedronUnion& u,
                               const ProjectOptions& opts = {});

struct SetProjectOptions {
  double kkt_tol = 1e-7;     // stationarity residual target at smooth points
  int multistarts = 8;       // seed count beyond warm start
  int max_iterations = 60;   // linearize-project rounds per seed
  double search_radius = 1.0;// half-width of the seed grid around the query
  double tie_tol = 1e-9;
  std::optional<Eigen::VectorXd> warm_start;
};

/// Nearest point of the domain at time t: per-piece Gauss-Newton on the
/// active constraints with multistart seeding, then the best piece wins
/// (ties to the lowest piece index; symmetric in-piece minimizers resolve to
/// the lexicographically greatest point). Throws ConvergenceError when no
/// piece produces a feasible stationary candidate.
ProjectionResult project_to_set(const Eigen::VectorXd& y, const PiecewiseDomain& domain, double t,
                                const SetProjectOptions& opts = {});

/// Brute-force reference: scans the axis-aligned grid lo + k*resolution over
/// the box and returns the feasible grid point nearest to y. Deterministic;
/// independent of the iterative solvers (shares only constraint evaluation).
/// Throws InfeasibleError when no feasible grid point exists in the box.
/// Accuracy is bounded by resolution * sqrt(n) whenever the box contains the
/// true nearest point. Dimensions above 16 are refused.
struct OracleResult {
  Eigen::VectorXd point;
  double distance = 0.0;
  long long evaluated = 0;
};
OracleResult oracle_project(const Eigen::VectorXd& y, const PiecewiseDomain& domain, double t,
                            const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                            double resolution);

} // namespace ptds
