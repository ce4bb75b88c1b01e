#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ptds/domain.hpp"
#include "ptds/field.hpp"

namespace ptds {

/// Two-bus network with unit line parameters, state x = (p_G, q_G, v, theta2).
/// The load ramp is sized so the regulated regime saturates its reactive
/// ceiling partway through the default horizon.
struct TwoBusParams {
  double q_min = -0.3;
  double q_max = 0.3;
  double p_ref = 0.2;
  PiecewiseLinear load{{{0.0, 0.0}, {1.625, 1.3}}};
};

/// Two pieces split by the sign of x1:
///   { x1 >= 0, x2 >= 0, x2 <= x1 - t }  and  { x1 <= 0, x2 >= 0, x2 <= -x1 - t }.
PiecewiseDomain wedge_domain();

/// Single piece { x2 >= 0, x2 <= x1^2 - t }.
PiecewiseDomain parabola_domain();

/// Three regimes sharing the power balance equalities:
///   pv:     v = 1,       q_min <= q_G <= q_max
///   pq-min: q_G = q_min,  v >= 1
///   pq-max: q_G = q_max,  v <= 1
PiecewiseDomain two_bus_domain(const TwoBusParams& params = {});

/// Gradient descent on 1/2 (p_G - p_ref)^2: f = (-(p_G - p_ref), 0, 0, 0).
VectorField default_feedback_field(const TwoBusParams& params = {});

/// Named, ready-to-run configuration: domain, driving field, start state,
/// time window, and the box used to draw certification and probe samples.
struct Scenario {
  std::string name;
  PiecewiseDomain domain;
  VectorField field;
  Eigen::VectorXd x0;
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  double certify_t = 0.0;
  Eigen::VectorXd box_lo, box_hi;
  std::vector<Eigen::VectorXd> anchors;
  Json params; // scenario knobs echoed into run manifests
};

/// Builds a named scenario. `params` overrides scenario knobs (for two-bus:
/// q_min, q_max, p_ref, load as [[t, value], ...]); unknown keys are refused.
Scenario make_scenario(const std::string& name, const Json& params = Json::object());

std::vector<std::string> scenario_names();

/// Randomized fat polyhedron with a query point just outside it, sized so a
/// grid oracle over [box_lo, box_hi] resolves the projection: every row keeps
/// slack >= 0.3 at an interior center, and the query sits within 0.25 of the
/// boundary, so feasible grid points exist near the true nearest point.
struct PolyhedralInstance {
  PiecewiseDomain domain; // single affine piece
  Eigen::VectorXd query;
  Eigen::VectorXd box_lo, box_hi;
};

PolyhedralInstance random_polyhedron_instance(int dim, std::uint64_t seed);

} // namespace ptds
