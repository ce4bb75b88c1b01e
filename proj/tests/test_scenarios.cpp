#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ptds/errors.hpp"
#include "ptds/integrator.hpp"
#include "ptds/scenarios.hpp"

using namespace ptds;

TEST_CASE("the scenario catalog is complete and rejects strangers") {
  std::vector<std::string> names = scenario_names();
  for (const char* expected :
       {"wedge", "parabola", "two-bus", "disk", "saturated-flow", "moving-wall"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  CHECK_THROWS_AS(make_scenario("three-bus"), ConfigError);
}

TEST_CASE("every scenario starts feasible inside its sample box") {
  for (const std::string& name : scenario_names()) {
    Scenario s = make_scenario(name);
    INFO("scenario ", name);
    CHECK(contains(s.domain, s.x0, s.t0));
    CHECK(s.t_end > s.t0);
    CHECK(s.dt > 0.0);
    REQUIRE(s.box_lo.size() == s.domain.dim);
    REQUIRE(s.box_hi.size() == s.domain.dim);
    CHECK(((s.box_hi - s.box_lo).array() > 0).all());
    for (const auto& anchor : s.anchors) CHECK(anchor.size() == s.domain.dim);
  }
}

TEST_CASE("wedge and parabola domains match their published shapes") {
  Scenario w = make_scenario("wedge");
  REQUIRE(w.domain.pieces.size() == 2);
  CHECK(w.domain.pieces[0].inequalities.size() == 3);
  CHECK(w.domain.pieces[1].inequalities.size() == 3);

  Scenario p = make_scenario("parabola");
  REQUIRE(p.domain.pieces.size() == 1);
  CHECK(p.domain.pieces[0].inequalities.size() == 2);
  // x2 <= x1^2 - t: quadratic in space, linear drift in time.
  Eigen::VectorXd x(2);
  x << 2.0, 1.0;
  CHECK(violation(p.domain, x, 0.0) <= 0.0);
  CHECK(violation(p.domain, x, 3.5) > 0.0);
}

TEST_CASE("two-bus flat start satisfies both balance equations") {
  Scenario s = make_scenario("two-bus");
  REQUIRE(s.domain.pieces.size() == 3);
  CHECK(s.domain.pieces[0].name == "pv");
  CHECK(violation(s.domain.pieces[0], s.x0, 0.0) <= 1e-12);

  // The regulated regime pins the voltage; the limit regimes pin q_G.
  CHECK(s.domain.pieces[0].equalities.size() == 3);
  CHECK(s.domain.pieces[1].equalities.size() == 3);
  CHECK(s.domain.pieces[2].equalities.size() == 3);
}

TEST_CASE("two-bus load ramp saturates the reactive ceiling inside the horizon") {
  TwoBusParams p;
  CHECK(p.load.value(0.0) == doctest::Approx(0.0));
  CHECK(p.load.value(1.625) == doctest::Approx(1.3));
  CHECK(p.load.value(2.6) == doctest::Approx(1.3)); // flat after the ramp
  CHECK(p.load.rate(0.5) == doctest::Approx(0.8));

  // Feedback drives p_G toward its reference and leaves the rest alone.
  VectorField f = default_feedback_field(p);
  Eigen::VectorXd x(4);
  x << 0.5, 0.1, 1.0, -0.2;
  Eigen::VectorXd v = f(x, 0.0);
  CHECK(v(0) == doctest::Approx(-(0.5 - p.p_ref)));
  CHECK(v.tail(3).norm() == 0.0);
}

TEST_CASE("two-bus params are overridable and checked") {
  Scenario s = make_scenario("two-bus", Json{{"q_max", 0.5}, {"p_ref", 0.3}});
  CHECK(s.params["q_max"] == 0.5);
  CHECK(s.params["p_ref"] == 0.3);

  // A reactive output at the stock ceiling is interior under the raised one.
  Eigen::VectorXd x = s.x0;
  x(1) = 0.4;
  const auto& ceiling = s.domain.pieces[0].inequalities[1]; // q_G - q_max
  CHECK(ceiling.value(x, 0.0) == doctest::Approx(-0.1));
  Scenario stock = make_scenario("two-bus");
  CHECK(stock.domain.pieces[0].inequalities[1].value(x, 0.0) == doctest::Approx(0.1));

  CHECK_THROWS_AS(make_scenario("two-bus", Json{{"q_cap", 0.5}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("wedge", Json{{"q_max", 0.5}}), ConfigError);
}

TEST_CASE("two-bus default run crosses into the max-limit regime once") {
  Scenario s = make_scenario("two-bus");
  IntegratorOptions opts;
  opts.dt = 5e-3; // coarse but adequate to see the regime change
  SimulationResult r = simulate(s.domain, s.field, s.x0, s.t0, s.t_end, opts);
  REQUIRE_FALSE(r.aborted);

  int switches = 0;
  for (size_t k = 1; k < r.trajectory.pieces.size(); ++k)
    if (r.trajectory.pieces[k] != r.trajectory.pieces[k - 1]) ++switches;
  CHECK(switches == 1);
  CHECK(r.trajectory.pieces.front() == 0);
  CHECK(r.trajectory.pieces.back() == 2);

  for (int k = 0; k < r.trajectory.size(); ++k) {
    const Eigen::VectorXd& x = r.trajectory.states[k];
    CHECK(x(1) <= 0.3 + 1e-6);                              // q_G ceiling
    if (r.trajectory.pieces[k] == 0) CHECK(std::abs(x(2) - 1.0) <= 1e-6); // pv holds v = 1
    CHECK(r.trajectory.feas_residuals[k] <= 1e-6);
  }
}

TEST_CASE("random instances are fat, deterministic, and genuinely outside") {
  for (int dim : {2, 3}) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull}) {
      PolyhedralInstance a = random_polyhedron_instance(dim, seed);
      PolyhedralInstance b = random_polyhedron_instance(dim, seed);
      CHECK((a.query - b.query).norm() == 0.0);
      CHECK((a.box_lo - b.box_lo).norm() == 0.0);

      REQUIRE(a.domain.pieces.size() == 1);
      CHECK(a.domain.dim == dim);
      CHECK(violation(a.domain, a.query, 0.0) > 0.0); // query is outside
      CHECK(((a.query - a.box_lo).array() >= 0).all());
      CHECK(((a.box_hi - a.query).array() >= 0).all());
    }
  }
  PolyhedralInstance c = random_polyhedron_instance(2, 5);
  PolyhedralInstance d = random_polyhedron_instance(2, 6);
  CHECK((c.query - d.query).norm() > 0.0); // seeds decorrelate
}
