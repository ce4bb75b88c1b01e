#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ptds/errors.hpp"
#include "ptds/integrator.hpp"
#include "ptds/scenarios.hpp"

using namespace ptds;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

} // namespace

TEST_CASE("scheme names round trip and tolerate spelling variants") {
  CHECK(std::string(scheme_name(Scheme::CatchingUp)) == "CATCHING_UP");
  CHECK(std::string(scheme_name(Scheme::TangentEuler)) == "TANGENT_EULER");
  CHECK(scheme_from_name("CATCHING_UP") == Scheme::CatchingUp);
  CHECK(scheme_from_name("catching-up") == Scheme::CatchingUp);
  CHECK(scheme_from_name("tangent_euler") == Scheme::TangentEuler);
  CHECK_THROWS_AS(scheme_from_name("verlet"), ConfigError);
}

TEST_CASE("interior motion is unconstrained under both schemes") {
  Scenario s = make_scenario("saturated-flow");
  IntegratorOptions opts;
  for (Scheme scheme : {Scheme::CatchingUp, Scheme::TangentEuler}) {
    opts.scheme = scheme;
    StepResult r = step(s.domain, s.field, vec1(0.5), 0.0, 0.1, opts);
    CHECK(r.x(0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.speed == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.feas_residual <= 1e-12);
    CHECK(r.piece_index == 0);
  }
}

TEST_CASE("a fast field rides the moving wall at the wall speed") {
  Scenario s = make_scenario("moving-wall");
  StepResult r = step(s.domain, s.field, vec1(0.0), 0.0, 0.01);
  // Unconstrained step reaches 0.02; the wall at t = 0.01 clips it back.
  CHECK(r.x(0) == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(r.speed == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("the vertex evades the descending wedge along the witness direction") {
  PiecewiseDomain wedge = wedge_domain();
  IntegratorOptions opts;
  opts.scheme = Scheme::TangentEuler;
  StepResult te = step(wedge, zero_field(2), vec2(0.0, 0.0), 0.0, 0.01, opts);
  CHECK((te.x - vec2(0.01, 0.0)).norm() <= 1e-9);

  opts.scheme = Scheme::CatchingUp;
  StepResult cu = step(wedge, zero_field(2), vec2(0.0, 0.0), 0.0, 0.01, opts);
  CHECK((cu.x - vec2(0.01, 0.0)).norm() <= 1e-9);
  CHECK(cu.piece_index == 0); // equidistant tips tie to the lower piece
}

TEST_CASE("step validates its inputs") {
  Scenario s = make_scenario("saturated-flow");
  CHECK_THROWS_AS(step(s.domain, s.field, vec1(0.5), 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(step(s.domain, s.field, vec2(0.5, 0.0), 0.0, 0.1), ConfigError);
}

TEST_CASE("saturated flow matches its closed form at every node") {
  Scenario s = make_scenario("saturated-flow");
  SimulationResult r = simulate(s.domain, s.field, s.x0, 0.0, 2.0);
  REQUIRE_FALSE(r.aborted);
  REQUIRE(r.trajectory.size() == 2001);
  CHECK(r.trajectory.times.back() == 2.0);
  for (int k = 0; k < r.trajectory.size(); ++k) {
    double t = r.trajectory.times[k];
    double expected = std::min(t, 1.0); // x0 = 0, unit inflow, cap at 1
    CHECK(std::abs(r.trajectory.states[k](0) - expected) <= 1e-9);
    CHECK(r.trajectory.feas_residuals[k] <= 1e-9);
  }
  CHECK(r.trajectory.speeds[0] == 0.0);
  CHECK(*std::max_element(r.trajectory.speeds.begin(), r.trajectory.speeds.end()) <=
        1.0 + 1e-9);
}

TEST_CASE("moving wall pushes the state at exactly the wall rate") {
  Scenario s = make_scenario("moving-wall");
  SimulationResult r = simulate(s.domain, s.field, s.x0, 0.0, 1.0);
  REQUIRE_FALSE(r.aborted);
  for (int k = 1; k < r.trajectory.size(); ++k) {
    CHECK(std::abs(r.trajectory.states[k](0) - r.trajectory.times[k]) <= 1e-9);
    CHECK(r.trajectory.speeds[k] == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("wedge vertex start rides the tip under both schemes") {
  PiecewiseDomain wedge = wedge_domain();
  IntegratorOptions opts;
  for (Scheme scheme : {Scheme::CatchingUp, Scheme::TangentEuler}) {
    opts.scheme = scheme;
    SimulationResult r = simulate(wedge, zero_field(2), vec2(0.0, 0.0), 0.0, 0.5, opts);
    REQUIRE_FALSE(r.aborted);
    for (int k = 0; k < r.trajectory.size(); ++k) {
      CHECK((r.trajectory.states[k] - vec2(r.trajectory.times[k], 0.0)).norm() <= 1e-8);
      CHECK(r.trajectory.pieces[k] == 0);
    }
  }
}

TEST_CASE("a trailing short step lands exactly on the horizon") {
  Scenario s = make_scenario("saturated-flow");
  IntegratorOptions opts;
  opts.dt = 0.3;
  SimulationResult r = simulate(s.domain, s.field, s.x0, 0.0, 1.0, opts);
  REQUIRE_FALSE(r.aborted);
  REQUIRE(r.trajectory.size() == 5); // 0, 0.3, 0.6, 0.9, 1.0
  CHECK(r.trajectory.times.back() == 1.0);
  CHECK(r.trajectory.states.back()(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("an infeasible start aborts before stepping") {
  Scenario s = make_scenario("saturated-flow");
  SimulationResult r = simulate(s.domain, s.field, vec1(5.0), 0.0, 1.0);
  CHECK(r.aborted);
  CHECK(r.abort_step == 0);
  CHECK(r.trajectory.size() == 0);
  CHECK(r.error.find("project x0") != std::string::npos);
}

TEST_CASE("an empty velocity union aborts tangent Euler with a certificate hint") {
  PiecewiseDomain par = parabola_domain();
  IntegratorOptions opts;
  opts.scheme = Scheme::TangentEuler;
  SimulationResult r = simulate(par, zero_field(2), vec2(0.0, 0.0), 0.0, 0.1, opts);
  CHECK(r.aborted);
  CHECK(r.abort_step == 1);
  REQUIRE(r.trajectory.size() == 1); // the start node survives
  CHECK(r.error.find("certify") != std::string::npos);
}

TEST_CASE("catching up escapes the pinched vertex at unbounded speed") {
  // The same start that kills TANGENT_EULER: projecting onto X(t+dt) jumps to
  // the pocket mouth at distance sqrt(dt), so the step speed is dt^(-1/2).
  PiecewiseDomain par = parabola_domain();
  SimulationResult r = simulate(par, zero_field(2), vec2(0.0, 0.0), 0.0, 0.05, {});
  REQUIRE_FALSE(r.aborted);
  double top = *std::max_element(r.trajectory.speeds.begin(), r.trajectory.speeds.end());
  CHECK(top >= 10.0); // ~31.6 at dt = 1e-3, nothing like the unit field scale
}

TEST_CASE("convergence table compares consecutive grids at shared nodes") {
  // On affine walls each projection lands exactly on the continuous sweeping
  // path, so every grid reproduces the same node values and the table shows
  // only solver noise. Even the off-vertex start with its two kinks (wall
  // arrival at t = 0.1, corner capture at t = 0.5) stays node-exact.
  PiecewiseDomain wedge = wedge_domain();
  std::vector<ConvergenceRow> rows = convergence_study(
      wedge, zero_field(2), vec2(0.3, 0.2), 0.0, 1.0, {0.04, 0.02, 0.01, 0.005});
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].dt_coarse == doctest::Approx(rows[i].dt_fine * 2).epsilon(1e-12));
    CHECK(rows[i].sup_deviation <= 1e-10);
  }
}

TEST_CASE("refinement shrinks genuine curvature error monotonically") {
  // Sliding up the disk boundary has real O(dt) error at every step, so the
  // table must order strictly and stay within first-order bounds.
  Scenario disk = make_scenario("disk");
  std::vector<ConvergenceRow> rows = convergence_study(
      disk.domain, constant_field(vec2(0.0, 1.0)), vec2(1.0, 0.0), 0.0, 1.0,
      {0.04, 0.02, 0.01, 0.005});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sup_deviation >= 1e-6); // real discretization error, not noise
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].sup_deviation <= 2 * rows[i].dt_coarse);
    if (i > 0) CHECK(rows[i].sup_deviation < rows[i - 1].sup_deviation);
  }
}

TEST_CASE("convergence study rejects bad grids") {
  Scenario s = make_scenario("saturated-flow");
  CHECK(convergence_study(s.domain, s.field, s.x0, 0.0, 1.0, {0.1}).empty());
  CHECK_THROWS_AS(
      convergence_study(s.domain, s.field, s.x0, 0.0, 1.0, {0.1, 0.2}), ConfigError);
  CHECK_THROWS_AS(
      convergence_study(s.domain, s.field, s.x0, 0.0, 1.0, {0.1, 0.03}), ConfigError);
  CHECK_THROWS_AS(
      convergence_study(s.domain, s.field, vec1(5.0), 0.0, 1.0, {0.1, 0.05}),
      ConvergenceError);
}

TEST_CASE("scheme agreement tightens as the step shrinks") {
  // Sliding along the disk boundary under an upward push: the schemes differ
  // through the curvature, and the disagreement contracts with dt.
  Scenario s = make_scenario("disk");
  Eigen::VectorXd x0 = vec2(1.0, 0.0);
  VectorField push = constant_field(vec2(0.0, 1.0));
  auto run = [&](Scheme scheme, double dt) {
    IntegratorOptions opts;
    opts.scheme = scheme;
    opts.dt = dt;
    SimulationResult r = simulate(s.domain, push, x0, 0.0, 1.0, opts);
    REQUIRE_FALSE(r.aborted);
    return r.trajectory;
  };
  auto disagreement = [&](double dt) {
    Trajectory cu = run(Scheme::CatchingUp, dt);
    Trajectory te = run(Scheme::TangentEuler, dt);
    double sup = 0.0;
    for (int k = 0; k < cu.size(); ++k)
      sup = std::max(sup, (cu.states[k] - te.states[k]).norm());
    return sup;
  };
  double coarse = disagreement(1e-2);
  double fine = disagreement(1e-3);
  CHECK(coarse > 0.0);
  CHECK(fine < coarse);
  CHECK(coarse <= 2e-2);
}
