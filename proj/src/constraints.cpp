#include "ptds/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "ptds/errors.hpp"

namespace ptds {

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> points)
    : pts_(std::move(points)) {
  if (pts_.empty()) throw ConfigError("piecewise-linear function needs at least one point");
  if (!std::is_sorted(pts_.begin(), pts_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw ConfigError("piecewise-linear breakpoints must be sorted by time");
}

double PiecewiseLinear::value(double t) const {
  if (t <= pts_.front().first) return pts_.front().second;
  if (t >= pts_.back().first) return pts_.back().second;
  for (size_t i = 1; i < pts_.size(); ++i) {
    if (t <= pts_[i].first) {
      const auto& [t0, v0] = pts_[i - 1];
      const auto& [t1, v1] = pts_[i];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return pts_.back().second;
}

double PiecewiseLinear::rate(double t) const {
  if (t < pts_.front().first || t >= pts_.back().first) return 0.0;
  for (size_t i = 1; i < pts_.size(); ++i) {
    if (t < pts_[i].first) {
      const auto& [t0, v0] = pts_[i - 1];
      const auto& [t1, v1] = pts_[i];
      return (v1 - v0) / (t1 - t0);
    }
  }
  return 0.0;
}

ScalarConstraint affine_constraint(const Eigen::VectorXd& a, double c, double d) {
  ScalarConstraint g;
  g.dim = int(a.size());
  g.kind = "affine";
  g.value = [a, c, d](const Eigen::VectorXd& x, double t) { return a.dot(x) + c * t + d; };
  g.grad_x = [a](const Eigen::VectorXd&, double) { return a; };
  g.partial_t = [c](const Eigen::VectorXd&, double) { return c; };
  g.descriptor = Json{{"kind", "affine"},
                      {"a", std::vector<double>(a.data(), a.data() + a.size())},
                      {"c", c},
                      {"d", d}};
  return g;
}

ScalarConstraint quadratic_constraint(const Eigen::MatrixXd& Q, const Eigen::VectorXd& a,
                                      double c, double d) {
  if (Q.rows() != Q.cols() || Q.rows() != a.size())
    throw ConfigError("quadratic constraint: Q must be square and match a");
  ScalarConstraint g;
  g.dim = int(a.size());
  g.kind = "quadratic";
  Eigen::MatrixXd Qs = Q + Q.transpose(); // gradient factor
  g.value = [Q, a, c, d](const Eigen::VectorXd& x, double t) {
    return x.dot(Q * x) + a.dot(x) + c * t + d;
  };
  g.grad_x = [Qs, a](const Eigen::VectorXd& x, double) -> Eigen::VectorXd { return Qs * x + a; };
  g.partial_t = [c](const Eigen::VectorXd&, double) { return c; };
  std::vector<std::vector<double>> qrows(Q.rows(), std::vector<double>(Q.cols()));
  for (int i = 0; i < Q.rows(); ++i)
    for (int j = 0; j < Q.cols(); ++j) qrows[i][j] = Q(i, j);
  g.descriptor = Json{{"kind", "quadratic"},
                      {"q", qrows},
                      {"a", std::vector<double>(a.data(), a.data() + a.size())},
                      {"c", c},
                      {"d", d}};
  return g;
}

ScalarConstraint two_bus_active_power(const PiecewiseLinear& load) {
  ScalarConstraint g;
  g.dim = 4;
  g.kind = "two_bus_active_power";
  g.value = [load](const Eigen::VectorXd& x, double t) {
    return x(0) - load.value(t) - x(2) * std::sin(x(3));
  };
  g.grad_x = [](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd grad(4);
    grad << 1.0, 0.0, -std::sin(x(3)), -x(2) * std::cos(x(3));
    return grad;
  };
  g.partial_t = [load](const Eigen::VectorXd&, double t) { return -load.rate(t); };
  std::vector<std::vector<double>> pts;
  for (const auto& [t, v] : load.points()) pts.push_back({t, v});
  g.descriptor = Json{{"kind", "two_bus_active_power"}, {"load", pts}};
  return g;
}

ScalarConstraint two_bus_reactive_power() {
  ScalarConstraint g;
  g.dim = 4;
  g.kind = "two_bus_reactive_power";
  g.value = [](const Eigen::VectorXd& x, double) {
    return x(1) + x(2) * std::cos(x(3)) - x(2) * x(2);
  };
  g.grad_x = [](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd grad(4);
    grad << 0.0, 1.0, std::cos(x(3)) - 2.0 * x(2), -x(2) * std::sin(x(3));
    return grad;
  };
  g.partial_t = [](const Eigen::VectorXd&, double) { return 0.0; };
  g.descriptor = Json{{"kind", "two_bus_reactive_power"}};
  return g;
}

namespace {

Eigen::VectorXd vector_from_json(const Json& j, int dim, const char* what) {
  if (!j.is_array() || int(j.size()) != dim)
    throw ConfigError(std::string(what) + ": expected array of length " + std::to_string(dim));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = j[i].get<double>();
  return v;
}

} // namespace

ScalarConstraint constraint_from_json(const Json& j, int dim) {
  if (!j.contains("kind")) throw ConfigError("constraint entry missing \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();

  if (kind == "affine") {
    Eigen::VectorXd a = vector_from_json(j.at("a"), dim, "affine.a");
    return affine_constraint(a, j.value("c", 0.0), j.value("d", 0.0));
  }
  if (kind == "quadratic") {
    const Json& q = j.at("q");
    if (!q.is_array() || int(q.size()) != dim) throw ConfigError("quadratic.q: bad row count");
    Eigen::MatrixXd Q(dim, dim);
    for (int i = 0; i < dim; ++i) Q.row(i) = vector_from_json(q[i], dim, "quadratic.q row");
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
    if (j.contains("a")) a = vector_from_json(j.at("a"), dim, "quadratic.a");
    return quadratic_constraint(Q, a, j.value("c", 0.0), j.value("d", 0.0));
  }
  if (kind == "two_bus_active_power") {
    if (dim != 4) throw ConfigError("two_bus_active_power requires dimension 4");
    if (!j.contains("load")) throw ConfigError("two_bus_active_power missing \"load\"");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("load")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("load breakpoints must be [t, value]");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return two_bus_active_power(PiecewiseLinear(std::move(pts)));
  }
  if (kind == "two_bus_reactive_power") {
    if (dim != 4) throw ConfigError("two_bus_reactive_power requires dimension 4");
    return two_bus_reactive_power();
  }
  throw ConfigError("unknown constraint kind \"" + kind + "\"");
}

} // namespace ptds
