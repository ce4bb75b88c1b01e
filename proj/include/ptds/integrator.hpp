#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ptds/domain.hpp"
#include "ptds/field.hpp"
#include "ptds/projection.hpp"

namespace ptds {

/// CATCHING_UP projects the unconstrained Euler step onto the set at the new
/// time; TANGENT_EULER first projects the field onto the feasible-velocity
/// union at the current time, then steps and restores feasibility. CatchingUp
/// is the default: it needs no velocity polyhedron at degenerate points.
enum class Scheme { CatchingUp, TangentEuler };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct IntegratorOptions {
  Scheme scheme = Scheme::CatchingUp;
  double dt = 1e-3;
  SetProjectOptions projection;
};

struct StepResult {
  Eigen::VectorXd x;
  int piece_index = -1;
  double speed = 0.0;         // ||x_next - x|| / dt
  double feas_residual = 0.0; // domain violation at (x_next, t + dt), clamped at 0
};

/// One step of either scheme. Throws EmptyTangentError when TANGENT_EULER
/// meets an empty velocity union, ConvergenceError when a projection fails.
StepResult step(const PiecewiseDomain& domain, const VectorField& field,
                const Eigen::VectorXd& x, double t, double dt,
                const IntegratorOptions& opts = {});

/// Node arrays all share one length. speeds[k] is the step speed into node k
/// (speeds[0] = 0); pieces[k] is the union member the state landed in.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<int> pieces;
  std::vector<double> feas_residuals;
  std::vector<double> speeds;

  int size() const { return int(times.size()); }
};

struct SimulationResult {
  Trajectory trajectory;
  bool aborted = false;
  int abort_step = -1; // node index that could not be produced
  std::string error;
};

/// Time stepping from t0 to t_end with node times t0 + k*dt and a final short
/// step onto t_end. An infeasible start aborts at step 0 with a message
/// suggesting a pre-projection; step failures abort with the partial
/// trajectory retained.
SimulationResult simulate(const PiecewiseDomain& domain, const VectorField& field,
                          const Eigen::VectorXd& x0, double t0, double t_end,
                          const IntegratorOptions& opts = {});

struct ConvergenceRow {
  double dt_coarse = 0.0;
  double dt_fine = 0.0;
  double sup_deviation = 0.0; // max state gap over node times shared by both grids
};

/// Runs the simulation once per step size and compares consecutive pairs.
/// Step sizes must be strictly decreasing and divide t_end - t0; a single
/// entry yields an empty table. Aborted runs surface as ConvergenceError.
std::vector<ConvergenceRow> convergence_study(const PiecewiseDomain& domain,
                                              const VectorField& field,
                                              const Eigen::VectorXd& x0, double t0, double t_end,
                                              const std::vector<double>& dts,
                                              const IntegratorOptions& opts = {});

} // namespace ptds
