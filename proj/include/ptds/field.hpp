#pragma once

#include <Eigen/Dense>
#include <functional>

namespace ptds {

/// Time-varying vector field f(x, t) driving the projected dynamics.
struct VectorField {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> f;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x, double t) const { return f(x, t); }
};

inline VectorField zero_field(int dim) {
  return {dim, [dim](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(dim); }};
}

inline VectorField constant_field(const Eigen::VectorXd& v) {
  return {int(v.size()), [v](const Eigen::VectorXd&, double) { return v; }};
}

} // namespace ptds
