#include "ptds/tangent.hpp"

#include <sstream>

#include "ptds/errors.hpp"
#include "ptds/projection.hpp"
#include "ptds/rng.hpp"

namespace ptds {

bool TemporalTangentPolyhedron::contains(const Eigen::VectorXd& v, double tau) const {
  if (sys.A.rows() > 0 && ((sys.A * v - sys.b).array() > tau).any()) return false;
  if (sys.E.rows() > 0 && ((sys.E * v - sys.e).cwiseAbs().array() > tau).any()) return false;
  return true;
}

bool TemporalTangentPolyhedron::stationary(double tau) const {
  if (sys.b.size() > 0 && sys.b.cwiseAbs().maxCoeff() > tau) return false;
  if (sys.e.size() > 0 && sys.e.cwiseAbs().maxCoeff() > tau) return false;
  return true;
}

bool PolyhedronUnion::contains(const Eigen::VectorXd& v, double tau) const {
  for (const auto& m : members)
    if (m.qualification.status != QualStatus::Empty && m.contains(v, tau)) return true;
  return false;
}

TemporalTangentPolyhedron temporal_tangent(const BasicSet& set, const Eigen::VectorXd& x,
                                           double t, const Tolerances& tol) {
  TemporalTangentPolyhedron poly;
  poly.x = x;
  poly.t = t;
  poly.active = active_indices(set, x, t, tol);
  poly.sys = linearized_system(set, x, t, poly.active);
  poly.qualification = qualification_check(set, x, t, poly.active);
  return poly;
}

PolyhedronUnion temporal_tangent_union(const PiecewiseDomain& domain, const Eigen::VectorXd& x,
                                       double t) {
  PolyhedronUnion u;
  u.x = x;
  u.t = t;
  std::vector<int> pieces = member_pieces(domain, x, t);
  if (pieces.empty()) {
    std::ostringstream msg;
    msg << "temporal_tangent_union: point lies in no piece at t=" << t << " (violation "
        << violation(domain, x, t) << ")";
    throw InfeasibleError(msg.str());
  }
  for (int idx : pieces) {
    TemporalTangentPolyhedron m = temporal_tangent(domain.pieces[idx], x, t, domain.tol);
    m.active.piece_index = idx;
    u.members.push_back(std::move(m));
  }
  return u;
}

HullSample krasovskii_hull_sample(const VectorField& field, const PiecewiseDomain& domain,
                                  const Eigen::VectorXd& x, double t, double eps, int count,
                                  std::uint64_t seed) {
  if (count < 1) throw ConfigError("krasovskii_hull_sample: count must be >= 1");
  HullSample out;
  Rng rng(derive_seed(seed, 0x6b726173ULL));

  auto projected_velocity = [&](const Eigen::VectorXd& xq) {
    PolyhedronUnion u = temporal_tangent_union(domain, xq, t);
    return project_union(field(xq, t), u).vector;
  };

  out.vectors.push_back(projected_velocity(x)); // center sample, always present
  const int cap = 100 * count;
  while (int(out.vectors.size()) < count) {
    if (out.attempts >= cap) {
      std::ostringstream msg;
      msg << "krasovskii_hull_sample: only " << out.vectors.size() << " of " << count
          << " feasible draws within " << cap << " attempts (eps=" << eps << ")";
      throw ConvergenceError(msg.str());
    }
    ++out.attempts;
    Eigen::VectorXd xq = x + eps * rng.ball(int(x.size()));
    if (!ptds::contains(domain, xq, t)) continue;
    out.vectors.push_back(projected_velocity(xq));
  }
  return out;
}

} // namespace ptds
