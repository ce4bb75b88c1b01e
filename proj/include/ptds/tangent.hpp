#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ptds/domain.hpp"
#include "ptds/field.hpp"

namespace ptds {

/// First-order feasible-velocity polyhedron of one piece at (x, t):
///   { v | A v <= b, E v = e }
/// with rows built from the active constraint gradients (A = grad_x g_I,
/// b = -partial_t g_I and likewise for equalities). The right-hand sides carry
/// the time drift, so this is an affine polyhedron, not a cone, unless the
/// piece is stationary at (x, t). It may be empty; `qualification` grades
/// that before any projection is attempted.
struct TemporalTangentPolyhedron {
  LinearSystem sys;
  Eigen::VectorXd x;
  double t = 0.0;
  ActiveSet active;
  QualificationReport qualification;

  int dim() const { return int(x.size()); }
  bool contains(const Eigen::VectorXd& v, double tau = 1e-9) const;
  /// True when all right-hand sides vanish (stationary constraints), in which
  /// case the polyhedron is a genuine cone (closed under positive scaling).
  bool stationary(double tau = 1e-12) const;
};

/// Member polyhedra for every piece containing x. The feasible-velocity set of
/// the union domain is the union of the members.
struct PolyhedronUnion {
  Eigen::VectorXd x;
  double t = 0.0;
  std::vector<TemporalTangentPolyhedron> members;

  bool contains(const Eigen::VectorXd& v, double tau = 1e-9) const;
};

/// Build the feasible-velocity polyhedron of a single piece. Throws
/// InfeasibleError when x is not in the piece (within tol.tau_feas).
TemporalTangentPolyhedron temporal_tangent(const BasicSet& set, const Eigen::VectorXd& x,
                                           double t, const Tolerances& tol);

/// Members for every piece of the domain containing x; throws InfeasibleError
/// when x lies in no piece. Member order follows piece order; piece_index is
/// recorded in each member's active set.
PolyhedronUnion temporal_tangent_union(const PiecewiseDomain& domain, const Eigen::VectorXd& x,
                                       double t);

/// Cloud of projected-field samples around x: the projection of f onto the
/// feasible-velocity union is evaluated at `count` feasible points drawn
/// uniformly from the eps-ball around x (the center itself is always sample
/// zero). Errors if fewer than `count` feasible draws occur within
/// 100 * count attempts. With eps = 0 every sample equals the center
/// projection, so count = 1 yields the singleton {projection at x}.
struct HullSample {
  std::vector<Eigen::VectorXd> vectors;
  int attempts = 0;
};
HullSample krasovskii_hull_sample(const VectorField& field, const PiecewiseDomain& domain,
                                  const Eigen::VectorXd& x, double t, double eps, int count,
                                  std::uint64_t seed = 0);

} // namespace ptds
