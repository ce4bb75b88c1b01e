#include "ptds/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ptds/errors.hpp"
#include "ptds/tangent.hpp"

namespace ptds {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::CatchingUp: return "CATCHING_UP";
    case Scheme::TangentEuler: return "TANGENT_EULER";
  }
  return "CATCHING_UP";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "CATCHING_UP" || name == "catching-up" || name == "catching_up")
    return Scheme::CatchingUp;
  if (name == "TANGENT_EULER" || name == "tangent-euler" || name == "tangent_euler")
    return Scheme::TangentEuler;
  throw ConfigError("unknown scheme '" + name + "' (expected CATCHING_UP or TANGENT_EULER)");
}

StepResult step(const PiecewiseDomain& domain, const VectorField& field,
                const Eigen::VectorXd& x, double t, double dt, const IntegratorOptions& opts) {
  if (dt <= 0.0) throw ConfigError("step: dt must be positive");
  if (field.dim != domain.dim) throw ConfigError("step: field and domain dimensions differ");
  if (int(x.size()) != domain.dim) throw ConfigError("step: state dimension differs from domain");

  Eigen::VectorXd predictor;
  if (opts.scheme == Scheme::CatchingUp) {
    predictor = x + dt * field(x, t);
  } else {
    PolyhedronUnion u = temporal_tangent_union(domain, x, t);
    ProjectionResult vel = project_union(field(x, t), u);
    predictor = x + dt * vel.vector;
  }

  SetProjectOptions popts = opts.projection;
  popts.warm_start = x;
  ProjectionResult pr = project_to_set(predictor, domain, t + dt, popts);

  StepResult out;
  out.x = pr.vector;
  out.piece_index = pr.piece_index;
  out.speed = (pr.vector - x).norm() / dt;
  out.feas_residual = std::max(0.0, violation(domain, pr.vector, t + dt));
  return out;
}

SimulationResult simulate(const PiecewiseDomain& domain, const VectorField& field,
                          const Eigen::VectorXd& x0, double t0, double t_end,
                          const IntegratorOptions& opts) {
  if (opts.dt <= 0.0) throw ConfigError("simulate: dt must be positive");
  if (t_end < t0) throw ConfigError("simulate: t_end must not precede t0");
  if (x0.size() != domain.dim) throw ConfigError("simulate: x0 dimension mismatch");

  SimulationResult out;
  double v0 = violation(domain, x0, t0);
  if (v0 > domain.tol.tau_feas) {
    out.aborted = true;
    out.abort_step = 0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "initial state infeasible at t0 (violation %.3e > %.3e); "
                  "project x0 onto the domain at t0 before simulating",
                  v0, domain.tol.tau_feas);
    out.error = buf;
    return out;
  }

  Trajectory& traj = out.trajectory;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  {
    std::vector<int> members = member_pieces(domain, x0, t0);
    traj.pieces.push_back(members.empty() ? -1 : members.front());
  }
  traj.feas_residuals.push_back(std::max(0.0, v0));
  traj.speeds.push_back(0.0);

  const double span = t_end - t0;
  const long long steps = span > 0.0 ? (long long)std::ceil(span / opts.dt - 1e-9) : 0;

  for (long long k = 0; k < steps; ++k) {
    double t_k = t0 + double(k) * opts.dt;
    double dt_k = std::min(opts.dt, t_end - t_k);
    if (dt_k <= 0.0) break;
    double t_next = (k + 1 == steps) ? t_end : t0 + double(k + 1) * opts.dt;

    StepResult sr;
    try {
      IntegratorOptions sopts = opts;
      sopts.dt = dt_k;
      sr = step(domain, field, traj.states.back(), t_k, dt_k, sopts);
    } catch (const EmptyTangentError& err) {
      out.aborted = true;
      out.abort_step = int(k) + 1;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "step %lld at t=%.9g: ", k, t_k);
      out.error = std::string(buf) + err.what() +
                  "; the feasible-velocity union is empty here, consistent with a "
                  "failed forward-Lipschitz certificate (run certify at this time)";
      return out;
    } catch (const std::runtime_error& err) {
      out.aborted = true;
      out.abort_step = int(k) + 1;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "step %lld at t=%.9g: ", k, t_k);
      out.error = std::string(buf) + err.what();
      return out;
    }

    traj.times.push_back(t_next);
    traj.states.push_back(sr.x);
    traj.pieces.push_back(sr.piece_index);
    traj.feas_residuals.push_back(sr.feas_residual);
    traj.speeds.push_back(sr.speed);
  }
  return out;
}

std::vector<ConvergenceRow> convergence_study(const PiecewiseDomain& domain,
                                              const VectorField& field,
                                              const Eigen::VectorXd& x0, double t0, double t_end,
                                              const std::vector<double>& dts,
                                              const IntegratorOptions& opts) {
  const double span = t_end - t0;
  for (size_t i = 0; i < dts.size(); ++i) {
    if (dts[i] <= 0.0) throw ConfigError("convergence_study: step sizes must be positive");
    if (i > 0 && dts[i] >= dts[i - 1])
      throw ConfigError("convergence_study: step sizes must be strictly decreasing");
    double cycles = span / dts[i];
    if (std::abs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles))
      throw ConfigError("convergence_study: every step size must divide t_end - t0");
  }

  std::vector<ConvergenceRow> table;
  if (dts.size() < 2) return table;

  std::vector<Trajectory> runs;
  for (double dt : dts) {
    IntegratorOptions ropts = opts;
    ropts.dt = dt;
    SimulationResult res = simulate(domain, field, x0, t0, t_end, ropts);
    if (res.aborted)
      throw ConvergenceError("convergence_study: run at dt=" + std::to_string(dt) +
                             " aborted: " + res.error);
    runs.push_back(std::move(res.trajectory));
  }

  for (size_t i = 0; i + 1 < runs.size(); ++i) {
    const Trajectory& coarse = runs[i];
    const Trajectory& fine = runs[i + 1];
    ConvergenceRow row;
    row.dt_coarse = dts[i];
    row.dt_fine = dts[i + 1];
    for (int k = 0; k < coarse.size(); ++k) {
      double offset = (coarse.times[k] - t0) / dts[i + 1];
      long long j = (long long)std::llround(offset);
      if (std::abs(offset - double(j)) > 1e-6) continue; // node not shared by the fine grid
      if (j < 0 || j >= fine.size()) continue;
      row.sup_deviation =
          std::max(row.sup_deviation, (coarse.states[k] - fine.states[j]).norm());
    }
    table.push_back(row);
  }
  return table;
}

} // namespace ptds
