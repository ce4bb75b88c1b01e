#include "ptds/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ptds/errors.hpp"

namespace ptds {

double violation(const BasicSet& set, const Eigen::VectorXd& x, double t) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& g : set.inequalities) v = std::max(v, g.value(x, t));
  for (const auto& h : set.equalities) v = std::max(v, std::abs(h.value(x, t)));
  if (set.inequalities.empty() && set.equalities.empty()) v = 0.0;
  return v;
}

double violation(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : domain.pieces) best = std::min(best, violation(piece, x, t));
  return best;
}

bool contains(const BasicSet& set, const Eigen::VectorXd& x, double t, double tau_feas) {
  return violation(set, x, t) <= tau_feas;
}

bool contains(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t) {
  return violation(domain, x, t) <= domain.tol.tau_feas;
}

std::vector<int> member_pieces(const PiecewiseDomain& domain, const Eigen::VectorXd& x, double t) {
  std::vector<int> out;
  for (size_t i = 0; i < domain.pieces.size(); ++i)
    if (contains(domain.pieces[i], x, t, domain.tol.tau_feas)) out.push_back(int(i));
  return out;
}

ActiveSet active_indices(const BasicSet& set, const Eigen::VectorXd& x, double t,
                         const Tolerances& tol) {
  double v = violation(set, x, t);
  if (v > tol.tau_feas) {
    std::ostringstream msg;
    msg << "active_indices: point is infeasible (violation " << v << " > tau_feas "
        << tol.tau_feas << ")";
    throw InfeasibleError(msg.str());
  }
  ActiveSet active;
  active.tau_act = tol.tau_act;
  for (size_t i = 0; i < set.inequalities.size(); ++i)
    if (set.inequalities[i].value(x, t) >= -tol.tau_act) active.indices.push_back(int(i));
  return active;
}

LinearSystem linearized_system(const BasicSet& set, const Eigen::VectorXd& x, double t,
                               const ActiveSet& active) {
  const int n = set.dim;
  LinearSystem sys;
  sys.A.resize(active.indices.size(), n);
  sys.b.resize(active.indices.size());
  for (size_t r = 0; r < active.indices.size(); ++r) {
    const auto& g = set.inequalities[active.indices[r]];
    sys.A.row(r) = g.grad_x(x, t).transpose();
    double dt = g.partial_t(x, t);
    sys.b(r) = dt == 0.0 ? 0.0 : -dt; // avoid -0 in serialized systems
  }
  sys.E.resize(set.equalities.size(), n);
  sys.e.resize(set.equalities.size());
  for (size_t r = 0; r < set.equalities.size(); ++r) {
    const auto& h = set.equalities[r];
    sys.E.row(r) = h.grad_x(x, t).transpose();
    double dt = h.partial_t(x, t);
    sys.e(r) = dt == 0.0 ? 0.0 : -dt;
  }
  return sys;
}

const char* qual_status_name(QualStatus s) {
  switch (s) {
    case QualStatus::FullRank: return "FULL_RANK";
    case QualStatus::DegenerateNonempty: return "DEGENERATE_NONEMPTY";
    case QualStatus::Empty: return "EMPTY";
  }
  return "EMPTY";
}

QualificationReport qualification_check(const BasicSet& set, const Eigen::VectorXd& x, double t,
                                        const ActiveSet& active) {
  QualificationReport report;
  LinearSystem sys = linearized_system(set, x, t, active);
  const int rows = int(sys.A.rows() + sys.E.rows());
  report.active_row_count = rows;
  if (rows == 0) {
    report.rank = 0;
    report.status = QualStatus::FullRank;
    return report;
  }
  Eigen::MatrixXd stacked(rows, set.dim);
  stacked.topRows(sys.E.rows()) = sys.E;
  stacked.bottomRows(sys.A.rows()) = sys.A;
  report.rank = numerical_rank(stacked, 1e-9);
  if (report.rank == rows) {
    report.status = QualStatus::FullRank;
    return report;
  }
  report.status = feasible_point(sys).has_value() ? QualStatus::DegenerateNonempty
                                                  : QualStatus::Empty;
  return report;
}

PiecewiseDomain domain_from_json(const Json& j) {
  PiecewiseDomain domain;
  if (!j.contains("dimension")) throw ConfigError("domain: missing \"dimension\"");
  domain.dim = j.at("dimension").get<int>();
  if (domain.dim <= 0) throw ConfigError("domain: dimension must be positive");
  if (j.contains("tolerances")) {
    const Json& tj = j.at("tolerances");
    domain.tol.tau_feas = tj.value("tau_feas", domain.tol.tau_feas);
    domain.tol.tau_act = tj.value("tau_act", domain.tol.tau_act);
  }
  if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
    throw ConfigError("domain: needs a non-empty \"pieces\" array");
  for (const auto& pj : j.at("pieces")) {
    BasicSet piece;
    piece.dim = domain.dim;
    piece.name = pj.value("name", std::string{});
    if (pj.contains("inequalities"))
      for (const auto& cj : pj.at("inequalities"))
        piece.inequalities.push_back(constraint_from_json(cj, domain.dim));
    if (pj.contains("equalities"))
      for (const auto& cj : pj.at("equalities"))
        piece.equalities.push_back(constraint_from_json(cj, domain.dim));
    domain.pieces.push_back(std::move(piece));
  }
  return domain;
}

Json domain_to_json(const PiecewiseDomain& domain) {
  Json j;
  j["dimension"] = domain.dim;
  j["tolerances"] = Json{{"tau_feas", domain.tol.tau_feas}, {"tau_act", domain.tol.tau_act}};
  Json pieces = Json::array();
  for (const auto& piece : domain.pieces) {
    Json pj;
    if (!piece.name.empty()) pj["name"] = piece.name;
    Json ineq = Json::array();
    for (const auto& g : piece.inequalities) ineq.push_back(g.descriptor);
    Json eq = Json::array();
    for (const auto& h : piece.equalities) eq.push_back(h.descriptor);
    pj["inequalities"] = ineq;
    pj["equalities"] = eq;
    pieces.push_back(pj);
  }
  j["pieces"] = pieces;
  return j;
}

} // namespace ptds
