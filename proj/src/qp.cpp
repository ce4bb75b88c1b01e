#include "ptds/qp.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace ptds {

namespace {

// Null-space aware splitting of E v = e: minimum-norm particular solution and
// an orthonormal basis Z of ker(E). Returns false when the system is inconsistent.
bool split_equalities(const Eigen::MatrixXd& E, const Eigen::VectorXd& e, double tol,
                      Eigen::VectorXd& v0, Eigen::MatrixXd& Z) {
  const int n = int(E.cols());
  if (E.rows() == 0) {
    v0 = Eigen::VectorXd::Zero(n);
    Z = Eigen::MatrixXd::Identity(n, n);
    return true;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * std::max(1.0, smax)) ++rank;

  Eigen::VectorXd ue = svd.matrixU().transpose() * e;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < rank; ++i) y(i) = ue(i) / sv(i);
  v0 = svd.matrixV().leftCols(sv.size()) * y;
  Z = svd.matrixV().rightCols(n - rank);

  double consistency = (E * v0 - e).cwiseAbs().maxCoeff();
  return consistency <= tol * (1.0 + e.cwiseAbs().maxCoeff());
}

} // namespace

QpResult project_onto_system(const Eigen::VectorXd& f, const LinearSystem& sys,
                             const QpOptions& opts) {
  QpResult out;
  const int k = int(sys.A.rows());
  out.lambda = Eigen::VectorXd::Zero(k);

  Eigen::VectorXd v0;
  Eigen::MatrixXd Z;
  if (!split_equalities(sys.E, sys.e, opts.tol, v0, Z)) {
    out.v = v0;
    out.status = QpStatus::InfeasibleEqualities;
    out.kkt_residual = (sys.E * v0 - sys.e).cwiseAbs().maxCoeff();
    return out;
  }

  const int m = int(Z.cols());
  if (m == 0) {
    // Equalities pin the point; inequalities can only be checked.
    out.v = v0;
    double viol = 0.0;
    if (k > 0) viol = std::max(0.0, (sys.A * v0 - sys.b).maxCoeff());
    out.kkt_residual = viol;
    out.status = viol <= opts.tol ? QpStatus::Converged : QpStatus::InfeasibleInequalities;
    return out;
  }

  Eigen::MatrixXd Ar;
  Eigen::VectorXd br, w0;
  if (k > 0) {
    Ar = sys.A * Z;
    br = sys.b - sys.A * v0;
  } else {
    Ar.resize(0, m);
    br.resize(0);
  }
  w0 = Z.transpose() * (f - v0);

  std::vector<double> rownorm2(k);
  std::vector<bool> vacuous(k, false);
  for (int i = 0; i < k; ++i) {
    rownorm2[i] = Ar.row(i).squaredNorm();
    if (rownorm2[i] <= 1e-24) {
      vacuous[i] = true;
      if (br(i) < -opts.tol) {
        out.v = v0 + Z * w0;
        out.status = QpStatus::InfeasibleInequalities;
        out.kkt_residual = -br(i);
        return out;
      }
    }
  }

  Eigen::VectorXd w = w0;
  Eigen::VectorXd& lam = out.lambda;
  int sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    // The dual sweep diverges instead of converging when the primal system is
    // empty, so a stalled run gets one definitive feasibility check.
    if (sweep == 100 && !feasible_point(sys, opts.tol)) {
      out.v = v0 + Z * w;
      out.iterations = sweep;
      out.kkt_residual = (sys.A * out.v - sys.b).maxCoeff();
      out.status = QpStatus::InfeasibleInequalities;
      return out;
    }
    for (int i = 0; i < k; ++i) {
      if (vacuous[i]) continue;
      double r = Ar.row(i).dot(w) - br(i);
      double delta = std::max(-lam(i), r / rownorm2[i]);
      if (delta != 0.0) {
        lam(i) += delta;
        w.noalias() -= delta * Ar.row(i).transpose();
      }
    }
    double viol = 0.0, comp = 0.0;
    for (int i = 0; i < k; ++i) {
      if (vacuous[i]) continue;
      double r = Ar.row(i).dot(w) - br(i);
      viol = std::max(viol, r);
      comp = std::max(comp, std::abs(lam(i) * r));
    }
    out.kkt_residual = std::max(viol, comp);
    if (out.kkt_residual <= opts.tol) {
      ++sweep;
      break;
    }
  }
  out.iterations = sweep;
  out.status = out.kkt_residual <= opts.tol ? QpStatus::Converged : QpStatus::IterationCap;
  out.v = v0 + Z * w;
  return out;
}

std::optional<Eigen::VectorXd> feasible_point(const LinearSystem& sys, double tol) {
  const int n = sys.dim();
  const int k = int(sys.A.rows());
  const int p = int(sys.E.rows());
  if (k == 0 && p == 0) return Eigen::VectorXd::Zero(n);

  double scale = 1.0;
  if (k > 0) scale += sys.b.cwiseAbs().maxCoeff();
  if (p > 0) scale += sys.e.cwiseAbs().maxCoeff();
  const double feas_tol = tol * scale;

  auto violation = [&](const Eigen::VectorXd& v) {
    double viol = 0.0;
    if (k > 0) viol = std::max(viol, (sys.A * v - sys.b).maxCoeff());
    if (p > 0) viol = std::max(viol, (sys.E * v - sys.e).cwiseAbs().maxCoeff());
    return viol;
  };
  auto phi = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    if (k > 0) s += (sys.A * v - sys.b).cwiseMax(0.0).squaredNorm();
    if (p > 0) s += (sys.E * v - sys.e).squaredNorm();
    return 0.5 * s;
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (p > 0) {
    // Start from the equality-consistent point; often already feasible.
    Eigen::VectorXd v0;
    Eigen::MatrixXd Z;
    split_equalities(sys.E, sys.e, tol, v0, Z);
    v = v0;
  }

  for (int iter = 0; iter < 120; ++iter) {
    if (violation(v) <= feas_tol) return v;

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) * 1e-12;
    if (k > 0) {
      Eigen::VectorXd s = sys.A * v - sys.b;
      for (int i = 0; i < k; ++i) {
        if (s(i) > 0) {
          grad.noalias() += s(i) * sys.A.row(i).transpose();
          H.noalias() += sys.A.row(i).transpose() * sys.A.row(i);
        }
      }
    }
    if (p > 0) {
      Eigen::VectorXd r = sys.E * v - sys.e;
      grad.noalias() += sys.E.transpose() * r;
      H.noalias() += sys.E.transpose() * sys.E;
    }

    if (grad.cwiseAbs().maxCoeff() <= 1e-13 * scale) break; // stationary

    Eigen::VectorXd d = H.ldlt().solve(-grad);
    double f0 = phi(v);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      if (phi(v + alpha * d) < f0 - 1e-16) {
        v += alpha * d;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if (violation(v) <= feas_tol) return v;
  return std::nullopt; // stationary with positive violation: system is empty
}

NnlsResult nnls(const Eigen::MatrixXd& G, const Eigen::VectorXd& r, double tol) {
  const int m = int(G.cols());
  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(m);
  if (m == 0) {
    out.residual = r.norm();
    return out;
  }
  std::vector<bool> passive(m, false);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (passive[i]) idx.push_back(i);
    z = Eigen::VectorXd::Zero(m);
    if (idx.empty()) return;
    Eigen::MatrixXd Gp(G.rows(), idx.size());
    for (size_t j = 0; j < idx.size(); ++j) Gp.col(j) = G.col(idx[j]);
    Eigen::VectorXd zp = Gp.completeOrthogonalDecomposition().solve(r);
    for (size_t j = 0; j < idx.size(); ++j) z(idx[j]) = zp(j);
  };

  const double wtol = tol * std::max(1.0, r.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * m + 30; ++outer) {
    Eigen::VectorXd w = G.transpose() * (r - G * out.x);
    int best = -1;
    double best_w = wtol;
    for (int i = 0; i < m; ++i)
      if (!passive[i] && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    if (best < 0) break;
    passive[best] = true;

    Eigen::VectorXd z;
    solve_passive(z);
    for (int inner = 0; inner < 3 * m + 30; ++inner) {
      double alpha = 1.0;
      int blocker = -1;
      for (int i = 0; i < m; ++i) {
        if (!passive[i] || z(i) > 0) continue;
        double a = out.x(i) / (out.x(i) - z(i));
        if (a < alpha) {
          alpha = a;
          blocker = i;
        }
      }
      if (blocker < 0) break;
      out.x += alpha * (z - out.x);
      for (int i = 0; i < m; ++i)
        if (passive[i] && out.x(i) <= tol) passive[i] = false;
      solve_passive(z);
    }
    out.x = z.cwiseMax(0.0);
  }
  out.residual = (G * out.x - r).norm();
  return out;
}

ConeDecomposition cone_decompose(const Eigen::VectorXd& r, const Eigen::MatrixXd& g_cone,
                                 const Eigen::MatrixXd& g_free) {
  ConeDecomposition out;
  const int kc = int(g_cone.cols());
  const int kf = int(g_free.cols());
  Eigen::VectorXd rt = r;
  Eigen::MatrixXd Gt = g_cone;
  Eigen::MatrixXd Q1; // orthonormal basis of range(g_free)
  if (kf > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g_free);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(g_free.rows(), kf);
    int rank = numerical_rank(g_free, 1e-12);
    Q1 = Q.leftCols(rank);
    rt -= Q1 * (Q1.transpose() * r);
    if (kc > 0) Gt -= Q1 * (Q1.transpose() * g_cone);
  }
  if (kc > 0) {
    NnlsResult nr = nnls(Gt, rt);
    out.lambda = nr.x;
  } else {
    out.lambda.resize(0);
  }
  Eigen::VectorXd rem = r;
  if (kc > 0) rem -= g_cone * out.lambda;
  if (kf > 0)
    out.mu = g_free.completeOrthogonalDecomposition().solve(rem);
  else
    out.mu.resize(0);
  Eigen::VectorXd fit = Eigen::VectorXd::Zero(r.size());
  if (kc > 0) fit += g_cone * out.lambda;
  if (kf > 0) fit += g_free * out.mu;
  out.residual = (fit - r).norm();
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m, double rel) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * smax) ++rank;
  return rank;
}

} // namespace ptds
