#include "ptds/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptds/errors.hpp"

namespace ptds {

namespace {

bool lex_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) > b(i)) return true;
    if (a(i) < b(i)) return false;
  }
  return false;
}

std::vector<int> tight_rows(const LinearSystem& sys, const Eigen::VectorXd& v,
                            const Eigen::VectorXd& lambda, double tol) {
  std::vector<int> rows;
  for (int i = 0; i < sys.A.rows(); ++i) {
    double slack = sys.b(i) - sys.A.row(i).dot(v);
    if (slack <= tol * (1.0 + std::abs(sys.b(i))) || (lambda.size() > i && lambda(i) > tol))
      rows.push_back(i);
  }
  return rows;
}

} // namespace

ProjectionResult project_polyhedron(const Eigen::VectorXd& f, const TemporalTangentPolyhedron& p,
                                    const ProjectOptions& opts) {
  if (p.qualification.status == QualStatus::Empty)
    throw EmptyTangentError("project_polyhedron: polyhedron graded EMPTY at its anchor point");

  QpResult qr = project_onto_system(f, p.sys, {opts.tol, opts.max_sweeps});
  if (qr.status == QpStatus::InfeasibleEqualities || qr.status == QpStatus::InfeasibleInequalities)
    throw EmptyTangentError("project_polyhedron: constraint rows are inconsistent");
  if (qr.status == QpStatus::IterationCap) {
    std::ostringstream msg;
    msg << "project_polyhedron: sweep cap " << opts.max_sweeps << " reached, KKT residual "
        << qr.kkt_residual << ", best distance " << (qr.v - f).norm();
    throw ConvergenceError(msg.str());
  }

  ProjectionResult out;
  out.vector = qr.v;
  out.distance = (qr.v - f).norm();
  out.piece_index = -1;
  out.iterations = qr.iterations;
  out.active_rows = tight_rows(p.sys, qr.v, qr.lambda, 1e-8);
  return out;
}

ProjectionResult project_union(const Eigen::VectorXd& f, const PolyhedronUnion& u,
                               const ProjectOptions& opts) {
  ProjectionResult best;
  bool found = false;
  for (const auto& member : u.members) {
    if (member.qualification.status == QualStatus::Empty) continue;
    ProjectionResult r;
    try {
      r = project_polyhedron(f, member, opts);
    } catch (const EmptyTangentError&) {
      continue; // member turned out inconsistent; treat like a graded-empty one
    }
    r.piece_index = member.active.piece_index;
    if (!found || r.distance < best.distance - opts.tie_tol) {
      best = r;
      found = true;
    }
  }
  if (!found)
    throw EmptyTangentError("project_union: every member polyhedron is empty");
  return best;
}

namespace {

struct PieceCandidate {
  Eigen::VectorXd x;
  double dist = std::numeric_limits<double>::infinity();
  std::vector<int> active;
  int iterations = 0;
  double kkt = std::numeric_limits<double>::infinity();
};

// Gauss-Newton feasibility restoration: drive equalities and violated
// inequalities to zero. Returns false when the merit stalls while infeasible,
// or when the restored point drifts more than max_move from the start (the
// linearized crossing of curved constraints can lie far from the nearest
// feasible point, and callers polishing a local step must not teleport).
bool restore(const BasicSet& piece, double t, Eigen::VectorXd& x, double target, int max_iters,
             int& iterations,
             double max_move = std::numeric_limits<double>::infinity()) {
  const int n = piece.dim;
  const Eigen::VectorXd x_start = x;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<int> viol_rows;
    for (size_t i = 0; i < piece.inequalities.size(); ++i)
      if (piece.inequalities[i].value(x, t) > target) viol_rows.push_back(int(i));
    Eigen::VectorXd h(piece.equalities.size());
    for (size_t j = 0; j < piece.equalities.size(); ++j) h(j) = piece.equalities[j].value(x, t);

    double viol = h.size() > 0 ? h.cwiseAbs().maxCoeff() : 0.0;
    for (int i : viol_rows) viol = std::max(viol, piece.inequalities[i].value(x, t));
    if (viol <= target) return true;

    const int rows = int(viol_rows.size() + piece.equalities.size());
    Eigen::MatrixXd J(rows, n);
    Eigen::VectorXd c(rows);
    int r = 0;
    for (size_t j = 0; j < piece.equalities.size(); ++j, ++r) {
      J.row(r) = piece.equalities[j].grad_x(x, t).transpose();
      c(r) = h(j);
    }
    for (int i : viol_rows) {
      J.row(r) = piece.inequalities[i].grad_x(x, t).transpose();
      c(r) = piece.inequalities[i].value(x, t);
      ++r;
    }

    Eigen::VectorXd d = J.completeOrthogonalDecomposition().solve(-c);
    double merit0 = c.norm();
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 7; ++ls) {
      Eigen::VectorXd trial = x + alpha * d;
      double merit = 0.0;
      for (const auto& hc : piece.equalities) {
        double v = hc.value(trial, t);
        merit += v * v;
      }
      for (const auto& gc : piece.inequalities) {
        double v = std::max(0.0, gc.value(trial, t));
        merit += v * v;
      }
      merit = std::sqrt(merit);
      if (merit <= (1.0 - 0.2 * alpha) * merit0) {
        x = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    ++iterations;
    if (!moved) return false;
    if ((x - x_start).norm() > max_move) return false;
  }
  // Accept whatever the loop reached if it happens to satisfy the target.
  double final_viol = violation(piece, x, t);
  return final_viol <= target;
}

// Linearize-project rounds for min ||x - y|| over one piece, from one seed.
PieceCandidate polish(const BasicSet& piece, double t, const Eigen::VectorXd& y,
                      Eigen::VectorXd x, const Tolerances& tol, const SetProjectOptions& opts) {
  PieceCandidate cand;
  const double restore_target = std::min(tol.tau_feas * 0.01, 1e-11);
  int iterations = 0;
  if (!restore(piece, t, x, restore_target, 60, iterations)) return cand;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    ++iterations;
    // Every inequality enters the step subproblem. Rows with slack act as
    // linearized bounds, so a step cannot shoot past the crossing of two
    // curved boundaries the way an active-set-only subproblem allows.
    const size_t m = piece.inequalities.size();
    LinearSystem sys;
    sys.A.resize(m, piece.dim);
    sys.b.resize(m);
    for (size_t r = 0; r < m; ++r) {
      sys.A.row(r) = piece.inequalities[r].grad_x(x, t).transpose();
      sys.b(r) = -piece.inequalities[r].value(x, t);
    }
    sys.E.resize(piece.equalities.size(), piece.dim);
    sys.e.resize(piece.equalities.size());
    for (size_t r = 0; r < piece.equalities.size(); ++r) {
      sys.E.row(r) = piece.equalities[r].grad_x(x, t).transpose();
      sys.e(r) = -piece.equalities[r].value(x, t);
    }

    QpResult qp = project_onto_system(y - x, sys, {1e-10, 4000});
    if (qp.status != QpStatus::Converged && qp.status != QpStatus::IterationCap) break;
    Eigen::VectorXd d = qp.v;
    if (d.norm() <= 1e-11 * (1.0 + x.norm())) break;

    double dist0 = (x - y).norm();
    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 8; ++ls) {
      Eigen::VectorXd trial = x + alpha * d;
      // The restore correction is O(step^2) curvature cleanup; a larger move
      // means it left the step's neighborhood and the trial tells us nothing.
      double max_move = 4.0 * alpha * d.norm() + 1e-9;
      if (restore(piece, t, trial, restore_target, 15, iterations, max_move) &&
          (trial - y).norm() <= dist0 + 1e-13) {
        double progress = (trial - x).norm();
        x = trial;
        accepted = progress > 1e-12 * (1.0 + x.norm());
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }

  if (violation(piece, x, t) > tol.tau_feas) return cand;

  cand.x = x;
  cand.dist = (x - y).norm();
  cand.iterations = iterations;
  for (size_t i = 0; i < piece.inequalities.size(); ++i)
    if (piece.inequalities[i].value(x, t) >= -tol.tau_act) cand.active.push_back(int(i));

  // Stationarity: y - x must decompose over the active gradients.
  Eigen::MatrixXd g_cone(piece.dim, cand.active.size());
  for (size_t c = 0; c < cand.active.size(); ++c)
    g_cone.col(c) = piece.inequalities[cand.active[c]].grad_x(x, t);
  Eigen::MatrixXd g_free(piece.dim, piece.equalities.size());
  for (size_t c = 0; c < piece.equalities.size(); ++c)
    g_free.col(c) = piece.equalities[c].grad_x(x, t);
  cand.kkt = cone_decompose(y - x, g_cone, g_free).residual;
  return cand;
}

} // namespace

ProjectionResult project_to_set(const Eigen::VectorXd& y, const PiecewiseDomain& domain, double t,
                                const SetProjectOptions& opts) {
  ProjectionResult best;
  bool found = false;

  for (size_t pi = 0; pi < domain.pieces.size(); ++pi) {
    const BasicSet& piece = domain.pieces[pi];

    std::vector<Eigen::VectorXd> seeds;
    if (opts.warm_start && opts.warm_start->size() == y.size()) seeds.push_back(*opts.warm_start);
    seeds.push_back(y);
    {
      // Coarse grid around y, ranked by (violation, distance); top picks seed
      // the multistart so pieces reachable only through curved geometry get
      // distinct basins.
      const int per_axis = domain.dim <= 3 ? 5 : 3;
      std::vector<std::pair<std::pair<double, double>, Eigen::VectorXd>> ranked;
      std::vector<int> idx(domain.dim, 0);
      while (true) {
        Eigen::VectorXd p(domain.dim);
        for (int d = 0; d < domain.dim; ++d)
          p(d) = y(d) - opts.search_radius +
                 2.0 * opts.search_radius * double(idx[d]) / double(per_axis - 1);
        ranked.push_back({{std::max(0.0, violation(piece, p, t)), (p - y).norm()}, p});
        int d = 0;
        while (d < domain.dim && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == domain.dim) break;
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return lex_greater(a.second, b.second); // deterministic tie order
      });
      for (int s = 0; s < opts.multistarts && s < int(ranked.size()); ++s)
        seeds.push_back(ranked[s].second);
    }

    PieceCandidate piece_best;
    for (const auto& seed : seeds) {
      PieceCandidate cand = polish(piece, t, y, seed, domain.tol, opts);
      if (!std::isfinite(cand.dist)) continue;
      // Feasible but non-stationary endpoints (a stalled line search, an
      // iteration cap) are not projections; drop them here rather than letting
      // a short distance from a bad basin win the piece.
      if (cand.kkt > opts.kkt_tol * (1.0 + cand.dist)) continue;
      if (cand.dist < piece_best.dist - opts.tie_tol ||
          (std::abs(cand.dist - piece_best.dist) <= opts.tie_tol &&
           (piece_best.x.size() == 0 || lex_greater(cand.x, piece_best.x))))
        piece_best = cand;
    }
    if (!std::isfinite(piece_best.dist)) continue;

    if (!found || piece_best.dist < best.distance - opts.tie_tol) {
      best.vector = piece_best.x;
      best.distance = piece_best.dist;
      best.piece_index = int(pi);
      best.active_rows = piece_best.active;
      best.iterations = piece_best.iterations;
      found = true;
    }
  }

  if (!found) {
    std::ostringstream msg;
    msg << "project_to_set: no piece produced a feasible candidate at t=" << t;
    throw ConvergenceError(msg.str());
  }
  return best;
}

OracleResult oracle_project(const Eigen::VectorXd& y, const PiecewiseDomain& domain, double t,
                            const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                            double resolution) {
  const int n = int(y.size());
  if (n > 16) throw ConfigError("oracle_project: dimensions above 16 are unsupported");
  if (resolution <= 0.0) throw ConfigError("oracle_project: resolution must be positive");
  if (box_lo.size() != n || box_hi.size() != n)
    throw ConfigError("oracle_project: box bounds must match the query dimension");

  // Axis values sorted by |value - y_d| so the scan tightens `best` early and
  // the partial-sum bound prunes aggressively.
  std::vector<std::vector<double>> axis(n);
  for (int d = 0; d < n; ++d) {
    if (box_hi(d) < box_lo(d)) throw ConfigError("oracle_project: box_hi below box_lo");
    long long count = (long long)std::floor((box_hi(d) - box_lo(d)) / resolution + 1e-9) + 1;
    axis[d].reserve(count);
    for (long long k = 0; k < count; ++k) axis[d].push_back(box_lo(d) + double(k) * resolution);
    std::sort(axis[d].begin(), axis[d].end(), [&](double a, double b) {
      double da = std::abs(a - y(d)), db = std::abs(b - y(d));
      if (da != db) return da < db;
      return a < b;
    });
  }

  OracleResult out;
  double best2 = std::numeric_limits<double>::infinity();
  Eigen::VectorXd point(n);
  long long evaluated = 0;

  auto dfs = [&](auto&& self, int d, double partial2) -> void {
    if (d == n) {
      ++evaluated;
      if (violation(domain, point, t) <= domain.tol.tau_feas && partial2 < best2) {
        best2 = partial2;
        out.point = point;
      }
      return;
    }
    for (double v : axis[d]) {
      double dv = v - y(d);
      double p2 = partial2 + dv * dv;
      if (p2 >= best2) break; // axis sorted by |dv|: the rest are farther
      point(d) = v;
      self(self, d + 1, p2);
    }
  };
  dfs(dfs, 0, 0.0);

  out.evaluated = evaluated;
  if (!std::isfinite(best2))
    throw InfeasibleError("oracle_project: no feasible grid point in the box");
  out.distance = std::sqrt(best2);
  return out;
}

} // namespace ptds
