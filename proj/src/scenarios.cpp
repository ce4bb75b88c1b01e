#include "ptds/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptds/errors.hpp"
#include "ptds/rng.hpp"

namespace ptds {

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec4(double a, double b, double c, double d) {
  Eigen::VectorXd v(4);
  v << a, b, c, d;
  return v;
}

Json affine_json(std::vector<double> a, double c, double d) {
  return Json{{"kind", "affine"}, {"a", std::move(a)}, {"c", c}, {"d", d}};
}

} // namespace

PiecewiseDomain wedge_domain() {
  Json j;
  j["dimension"] = 2;
  j["pieces"] = Json::array();
  j["pieces"].push_back(Json{
      {"name", "right"},
      {"inequalities",
       Json::array({affine_json({-1, 0}, 0, 0),   // x1 >= 0
                    affine_json({0, -1}, 0, 0),   // x2 >= 0
                    affine_json({-1, 1}, 1, 0)})} // x2 - x1 + t <= 0
  });
  j["pieces"].push_back(Json{
      {"name", "left"},
      {"inequalities",
       Json::array({affine_json({1, 0}, 0, 0),   // x1 <= 0
                    affine_json({0, -1}, 0, 0),  // x2 >= 0
                    affine_json({1, 1}, 1, 0)})} // x2 + x1 + t <= 0
  });
  return domain_from_json(j);
}

PiecewiseDomain parabola_domain() {
  Json j;
  j["dimension"] = 2;
  j["pieces"] = Json::array();
  j["pieces"].push_back(Json{
      {"name", "parabola"},
      {"inequalities",
       Json::array({affine_json({0, -1}, 0, 0), // x2 >= 0
                    Json{{"kind", "quadratic"}, // x2 - x1^2 + t <= 0
                         {"q", {{-1.0, 0.0}, {0.0, 0.0}}},
                         {"a", {0.0, 1.0}},
                         {"c", 1.0},
                         {"d", 0.0}}})}});
  return domain_from_json(j);
}

PiecewiseDomain two_bus_domain(const TwoBusParams& params) {
  if (!(params.q_min < params.q_max))
    throw ConfigError("two_bus_domain: q_min must be below q_max");

  Json load_pts = Json::array();
  for (const auto& [t, v] : params.load.points()) load_pts.push_back(Json::array({t, v}));
  Json h1{{"kind", "two_bus_active_power"}, {"load", load_pts}};
  Json h2{{"kind", "two_bus_reactive_power"}};

  Json j;
  j["dimension"] = 4;
  j["pieces"] = Json::array();
  j["pieces"].push_back(Json{
      {"name", "pv"},
      {"inequalities",
       Json::array({affine_json({0, -1, 0, 0}, 0, params.q_min),    // q_G >= q_min
                    affine_json({0, 1, 0, 0}, 0, -params.q_max)})}, // q_G <= q_max
      {"equalities", Json::array({h1, h2, affine_json({0, 0, 1, 0}, 0, -1.0)})} // v = 1
  });
  j["pieces"].push_back(Json{
      {"name", "pq-min"},
      {"inequalities", Json::array({affine_json({0, 0, -1, 0}, 0, 1.0)})}, // v >= 1
      {"equalities",
       Json::array({h1, h2, affine_json({0, 1, 0, 0}, 0, -params.q_min)})} // q_G = q_min
  });
  j["pieces"].push_back(Json{
      {"name", "pq-max"},
      {"inequalities", Json::array({affine_json({0, 0, 1, 0}, 0, -1.0)})}, // v <= 1
      {"equalities",
       Json::array({h1, h2, affine_json({0, 1, 0, 0}, 0, -params.q_max)})} // q_G = q_max
  });
  return domain_from_json(j);
}

VectorField default_feedback_field(const TwoBusParams& params) {
  double p_ref = params.p_ref;
  return {4, [p_ref](const Eigen::VectorXd& x, double) {
            Eigen::VectorXd f = Eigen::VectorXd::Zero(4);
            f(0) = -(x(0) - p_ref);
            return f;
          }};
}

namespace {

TwoBusParams two_bus_params_from(const Json& overrides) {
  TwoBusParams p;
  for (const auto& [key, value] : overrides.items()) {
    if (key == "q_min") p.q_min = value.get<double>();
    else if (key == "q_max") p.q_max = value.get<double>();
    else if (key == "p_ref") p.p_ref = value.get<double>();
    else if (key == "load") {
      std::vector<std::pair<double, double>> pts;
      for (const auto& pair : value) {
        if (!pair.is_array() || pair.size() != 2)
          throw ConfigError("two-bus load: expected [[t, value], ...]");
        pts.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
      p.load = PiecewiseLinear(pts);
    } else {
      throw ConfigError("two-bus params: unknown key \"" + key + "\"");
    }
  }
  return p;
}

Json two_bus_params_json(const TwoBusParams& p) {
  Json load_pts = Json::array();
  for (const auto& [t, v] : p.load.points()) load_pts.push_back(Json::array({t, v}));
  return Json{{"q_min", p.q_min}, {"q_max", p.q_max}, {"p_ref", p.p_ref}, {"load", load_pts}};
}

} // namespace

Scenario make_scenario(const std::string& name, const Json& params) {
  Scenario s;
  s.name = name;
  s.params = Json::object();

  if (name != "two-bus" && !params.empty())
    throw ConfigError("scenario \"" + name + "\" takes no params");

  if (name == "wedge") {
    s.domain = wedge_domain();
    s.field = zero_field(2);
    s.x0 = vec2(0, 0);
    s.t_end = 1.0;
    s.box_lo = vec2(-0.5, -0.5);
    s.box_hi = vec2(0.5, 0.5);
    s.anchors = {vec2(0, 0)};
  } else if (name == "parabola") {
    s.domain = parabola_domain();
    s.field = zero_field(2);
    s.x0 = vec2(0, 0);
    s.t_end = 0.5;
    s.box_lo = vec2(-0.5, -0.5);
    s.box_hi = vec2(0.5, 0.5);
    s.anchors = {vec2(0, 0)};
  } else if (name == "two-bus") {
    TwoBusParams p = two_bus_params_from(params);
    s.domain = two_bus_domain(p);
    s.field = default_feedback_field(p);
    s.x0 = vec4(0, 0, 1, 0);
    s.t_end = 2.6;
    s.certify_t = 0.5;
    s.box_lo = vec4(-0.6, -0.4, 0.85, -0.9);
    s.box_hi = vec4(1.4, 0.4, 1.15, 0.9);
    s.anchors = {s.x0};
    s.params = two_bus_params_json(p);
  } else if (name == "disk") {
    Json j;
    j["dimension"] = 2;
    j["pieces"] = Json::array({Json{
        {"name", "disk"},
        {"inequalities", Json::array({Json{{"kind", "quadratic"}, // x1^2 + x2^2 <= 1
                                           {"q", {{1.0, 0.0}, {0.0, 1.0}}},
                                           {"a", {0.0, 0.0}},
                                           {"c", 0.0},
                                           {"d", -1.0}}})}}});
    s.domain = domain_from_json(j);
    s.field = zero_field(2);
    s.x0 = vec2(0, 0);
    s.t_end = 1.0;
    s.box_lo = vec2(-1.5, -1.5);
    s.box_hi = vec2(1.5, 1.5);
    s.anchors = {vec2(1, 0)};
  } else if (name == "saturated-flow") {
    Json j;
    j["dimension"] = 1;
    j["pieces"] = Json::array(
        {Json{{"name", "cap"}, {"inequalities", Json::array({affine_json({1}, 0, -1.0)})}}});
    s.domain = domain_from_json(j);
    s.field = constant_field(Eigen::VectorXd::Ones(1));
    s.x0 = Eigen::VectorXd::Zero(1);
    s.t_end = 2.0;
    s.box_lo = Eigen::VectorXd::Constant(1, 0.0);
    s.box_hi = Eigen::VectorXd::Constant(1, 1.5);
    s.anchors = {Eigen::VectorXd::Ones(1)};
  } else if (name == "moving-wall") {
    Json j;
    j["dimension"] = 1;
    j["pieces"] = Json::array(
        {Json{{"name", "wall"}, {"inequalities", Json::array({affine_json({1}, -1.0, 0)})}}});
    s.domain = domain_from_json(j);
    s.field = constant_field(Eigen::VectorXd::Constant(1, 2.0));
    s.x0 = Eigen::VectorXd::Zero(1);
    s.t_end = 1.0;
    s.box_lo = Eigen::VectorXd::Constant(1, -1.0);
    s.box_hi = Eigen::VectorXd::Constant(1, 0.5);
    s.anchors = {Eigen::VectorXd::Zero(1)};
  } else {
    throw ConfigError("unknown scenario \"" + name + "\" (available: wedge, parabola, "
                      "two-bus, disk, saturated-flow, moving-wall)");
  }
  return s;
}

std::vector<std::string> scenario_names() {
  return {"wedge", "parabola", "two-bus", "disk", "saturated-flow", "moving-wall"};
}

PolyhedralInstance random_polyhedron_instance(int dim, std::uint64_t seed) {
  if (dim < 1 || dim > 16) throw ConfigError("random_polyhedron_instance: dim out of range");
  Rng rng(seed);

  Eigen::VectorXd center(dim);
  for (int i = 0; i < dim; ++i) center(i) = rng.uniform(-0.2, 0.2);

  // Random cuts with slack >= 0.3 at the center, boxed at slack 0.8 so every
  // direction is bounded. The interior ball keeps feasible grid points close
  // to any boundary minimizer.
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> slacks;
  for (int i = 0; i < dim + 2; ++i) {
    normals.push_back(rng.unit_vector(dim));
    slacks.push_back(rng.uniform(0.3, 0.5));
  }
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(i) = 1.0;
    normals.push_back(e);
    slacks.push_back(0.8);
    normals.push_back(-e);
    slacks.push_back(0.8);
  }

  Json piece;
  piece["name"] = "random";
  piece["inequalities"] = Json::array();
  for (size_t i = 0; i < normals.size(); ++i) {
    std::vector<double> a(normals[i].data(), normals[i].data() + dim);
    piece["inequalities"].push_back(
        affine_json(std::move(a), 0, -(normals[i].dot(center) + slacks[i])));
  }
  Json j;
  j["dimension"] = dim;
  j["pieces"] = Json::array({piece});

  PolyhedralInstance inst;
  inst.domain = domain_from_json(j);

  // Exit distance along u: smallest slack_i / (a_i . u) over rows facing u.
  auto exit_distance = [&](const Eigen::VectorXd& u) {
    double t_exit = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < normals.size(); ++i) {
      double den = normals[i].dot(u);
      if (den > 1e-9) t_exit = std::min(t_exit, slacks[i] / den);
    }
    return t_exit;
  };

  // The first cut's own normal always exits within its slack, so the bound
  // below holds even when every random direction misses.
  Eigen::VectorXd dir = normals[0];
  double t_exit = exit_distance(dir);
  for (int tries = 0; tries < 100; ++tries) {
    Eigen::VectorXd u = rng.unit_vector(dim);
    double te = exit_distance(u);
    if (te <= 0.5) {
      dir = u;
      t_exit = te;
      break;
    }
  }

  double reach = dim <= 2 ? rng.uniform(0.05, 0.2) : rng.uniform(0.01, 0.05);
  inst.query = center + (t_exit + reach) * dir;
  double half = reach + 0.02;
  inst.box_lo = inst.query.array() - half;
  inst.box_hi = inst.query.array() + half;
  return inst;
}

} // namespace ptds
