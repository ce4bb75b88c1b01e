#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ptds {

using Json = nlohmann::ordered_json;

/// Continuous piecewise-linear function of time, constant outside its
/// breakpoints. rate() returns the right-hand slope so forward-time callers
/// see the upcoming segment at a breakpoint.
class PiecewiseLinear {
public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<std::pair<double, double>> points);

  double value(double t) const;
  double rate(double t) const;
  const std::vector<std::pair<double, double>>& points() const { return pts_; }

private:
  std::vector<std::pair<double, double>> pts_;
};

/// One scalar constraint g(x, t) with analytic first derivatives.
/// Inequality rows mean g <= 0; equality rows mean g = 0. The descriptor
/// holds the JSON form the constraint was built from, so domains can be
/// serialized back into configs and manifests.
struct ScalarConstraint {
  int dim = 0;
  std::string kind;
  std::function<double(const Eigen::VectorXd&, double)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> grad_x;
  std::function<double(const Eigen::VectorXd&, double)> partial_t;
  Json descriptor;
};

/// g(x, t) = a.x + c*t + d
ScalarConstraint affine_constraint(const Eigen::VectorXd& a, double c, double d);

/// g(x, t) = x'Qx + a.x + c*t + d
ScalarConstraint quadratic_constraint(const Eigen::MatrixXd& Q, const Eigen::VectorXd& a,
                                      double c, double d);

/// Active power balance residual for the two-bus network,
/// x = (p_G, q_G, v, theta2):  p_G - p_load(t) - v*sin(theta2).
ScalarConstraint two_bus_active_power(const PiecewiseLinear& load);

/// Reactive power balance residual:  q_G + v*cos(theta2) - v^2.
ScalarConstraint two_bus_reactive_power();

/// Instantiate a constraint from its JSON descriptor. Throws ConfigError on
/// unknown kinds or malformed parameters.
ScalarConstraint constraint_from_json(const Json& j, int dim);

} // namespace ptds
