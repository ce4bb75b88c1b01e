#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ptds/constraints.hpp"
#include "ptds/qp.hpp"

namespace ptds {

struct Tolerances {
  double tau_feas = 1e-8; // feasibility slack for membership tests
  double tau_act = 1e-8;  // activation band for boundary detection
};

/// One smooth piece: { x | g_i(x,t) <= 0, h_j(x,t) = 0 }.
struct BasicSet {
  int dim = 0;
  std::string name;
  std::vector<ScalarConstraint> inequalities;
  std::vector<ScalarConstraint> equalities;
};

/// Finite union of smooth pieces, evaluated at a common dimension and
/// tolerance set. The domain at time t is the union of its pieces at t.
struct PiecewiseDomain {
  int dim = 0;
  std::vector<BasicSet> pieces;
  Tolerances tol;
};

/// Largest constraint violation of x against the piece at time t
/// (max over g_i(x,t) and |h_j(x,t)|; 0 or negative means feasible).
double violation(const BasicSet& set, const Eigen::VectorXd& x, double t);

/// Smallest piece violation across the union.
double violation(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t);

bool contains(const BasicSet& set, const Eigen::VectorXd& x, double t, double tau_feas);
bool contains(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t);

/// Indices of pieces containing x at time t (ascending).
std::vector<int> member_pieces(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t);

/// Inequality rows active at (x, t). Equalities are always active and are not
/// listed here. piece_index is -1 unless filled in by a union-level caller.
struct ActiveSet {
  int piece_index = -1;
  std::vector<int> indices;
  double tau_act = 0.0;
};

/// Requires x feasible in the piece within tau_feas; throws InfeasibleError
/// otherwise. A row i is active when g_i(x,t) >= -tau_act.
ActiveSet active_indices(const BasicSet& set, const Eigen::VectorXd& x, double t,
                         const Tolerances& tol);

enum class QualStatus {
  FullRank,          // stacked active gradients have full row rank
  DegenerateNonempty,// rank-deficient, but the linearized system is feasible
  Empty              // the linearized system has no solution
};

struct QualificationReport {
  QualStatus status = QualStatus::FullRank;
  int rank = 0;            // numerical rank of [grad h; grad g_I]
  int active_row_count = 0;// equality rows plus active inequality rows
};

const char* qual_status_name(QualStatus s);

/// First-order linearization of the active constraints at (x, t):
///   A v <= b with A = grad_x g_I, b = -partial_t g_I,
///   E v = e  with E = grad_x h,   e = -partial_t h.
LinearSystem linearized_system(const BasicSet& set, const Eigen::VectorXd& x, double t,
                               const ActiveSet& active);

/// Grades the constraint geometry at (x, t). Rank uses a relative singular
/// value threshold of 1e-9; rank-deficient systems are graded by linear
/// feasibility of the linearized system.
QualificationReport qualification_check(const BasicSet& set, const Eigen::VectorXd& x, double t,
                                        const ActiveSet& active);

/// Build a domain from its JSON description:
/// { "dimension": n, "tolerances": {...}, "pieces": [ { "name": ...,
///   "inequalities": [...], "equalities": [...] }, ... ] }
PiecewiseDomain domain_from_json(const Json& j);

/// Serialize back to the JSON form (constraint descriptors round-trip).
Json domain_to_json(const PiecewiseDomain& domain);

} // namespace ptds
