#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ptds/errors.hpp"
#include "ptds/projection.hpp"
#include "ptds/rng.hpp"
#include "ptds/scenarios.hpp"
#include "ptds/tangent.hpp"

using namespace ptds;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

PiecewiseDomain unit_disk() {
  Json j;
  j["dimension"] = 2;
  j["pieces"] = Json::array({Json{
      {"name", "disk"},
      {"inequalities", Json::array({Json{{"kind", "quadratic"},
                                         {"q", {{1.0, 0.0}, {0.0, 1.0}}},
                                         {"a", {0.0, 0.0}},
                                         {"c", 0.0},
                                         {"d", -1.0}}})}}});
  return domain_from_json(j);
}

} // namespace

TEST_CASE("zero velocity projects to the vertex evasion speed") {
  PiecewiseDomain wedge = wedge_domain();
  PolyhedronUnion u = temporal_tangent_union(wedge, vec2(0.0, 0.0), 0.0);

  ProjectionResult m0 = project_polyhedron(vec2(0.0, 0.0), u.members[0]);
  CHECK((m0.vector - vec2(1.0, 0.0)).norm() <= 5e-9);
  CHECK(m0.distance == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m0.active_rows == std::vector<int>{1, 2});

  // Both members sit at distance 1; the tie falls to the lower piece index.
  ProjectionResult best = project_union(vec2(0.0, 0.0), u);
  CHECK(best.piece_index == 0);
  CHECK((best.vector - vec2(1.0, 0.0)).norm() <= 5e-9);
}

TEST_CASE("upward field projects onto the wedge flank") {
  PiecewiseDomain wedge = wedge_domain();
  PolyhedronUnion u = temporal_tangent_union(wedge, vec2(0.0, 0.0), 0.0);
  ProjectionResult r = project_union(vec2(0.0, 3.0), u);
  // Nearest feasible velocity on either flank is (+-2, 1); tie -> piece 0.
  CHECK(r.piece_index == 0);
  CHECK((r.vector - vec2(2.0, 1.0)).norm() <= 1e-9);
  CHECK(r.distance == doctest::Approx(std::sqrt(8.0)).epsilon(1e-9));
}

TEST_CASE("feasible velocities are their own projection") {
  PiecewiseDomain wedge = wedge_domain();
  PolyhedronUnion u = temporal_tangent_union(wedge, vec2(0.0, 0.0), 0.0);
  ProjectionResult r = project_union(vec2(3.0, 1.0), u);
  CHECK(r.distance <= 1e-12);
  CHECK((r.vector - vec2(3.0, 1.0)).norm() <= 1e-12);
}

TEST_CASE("radial projection onto the unit disk") {
  PiecewiseDomain disk = unit_disk();
  ProjectionResult r = project_to_set(vec2(2.0, 0.0), disk, 0.0);
  CHECK((r.vector - vec2(1.0, 0.0)).norm() <= 1e-8);
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.piece_index == 0);

  ProjectionResult diag = project_to_set(vec2(3.0, 4.0), disk, 0.0);
  CHECK((diag.vector - vec2(0.6, 0.8)).norm() <= 1e-8);
  CHECK(diag.distance == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("projection from the pinched parabola vertex picks the positive branch") {
  PiecewiseDomain par = parabola_domain();
  // At t = 0.01 the set is { x2 >= 0, x2 <= x1^2 - 0.01 }: nearest points to the
  // origin are (+-0.1, 0); the in-piece tie resolves lexicographically greatest.
  ProjectionResult r = project_to_set(vec2(0.0, 0.0), par, 0.01);
  CHECK(r.vector(0) == doctest::Approx(0.1).epsilon(1e-7));
  CHECK(std::abs(r.vector(1)) <= 1e-9);
  CHECK(r.distance == doctest::Approx(0.1).epsilon(1e-7));
}

TEST_CASE("queries inside the thin parabola throat reach the pocket mouth") {
  PiecewiseDomain par = parabola_domain();
  // The strip |x1| < sqrt(delta) is empty at t = delta; the nearest feasible
  // point from just inside it is the corner (sqrt(delta), 0), not the far
  // crossing of the linearized boundaries.
  Eigen::VectorXd y = vec2(0.012, 0.0);
  ProjectionResult r = project_to_set(y, par, 0.01);
  CHECK(r.vector(0) == doctest::Approx(0.1).epsilon(1e-7));
  CHECK(std::abs(r.vector(1)) <= 1e-9);
  CHECK(r.distance == doctest::Approx(0.088).epsilon(1e-6));

  OracleResult oracle = oracle_project(y, par, 0.01, vec2(-0.3, -0.1), vec2(0.3, 0.2), 1e-3);
  CHECK(r.distance <= oracle.distance + 1e-9);
  CHECK(oracle.distance - r.distance <= 2e-3 * std::sqrt(2.0));
}

TEST_CASE("cross-piece ties resolve to the lowest piece index") {
  PiecewiseDomain wedge = wedge_domain();
  ProjectionResult r = project_to_set(vec2(0.0, 0.0), wedge, 0.1);
  // Tips (0.1, 0) and (-0.1, 0) are equidistant; piece 0 wins.
  CHECK(r.piece_index == 0);
  CHECK((r.vector - vec2(0.1, 0.0)).norm() <= 1e-8);
}

TEST_CASE("warm starts do not change the answer") {
  PiecewiseDomain par = parabola_domain();
  SetProjectOptions opts;
  opts.warm_start = vec2(-0.2, 0.05);
  ProjectionResult warm = project_to_set(vec2(0.0, 0.0), par, 0.01, opts);
  ProjectionResult cold = project_to_set(vec2(0.0, 0.0), par, 0.01);
  CHECK((warm.vector - cold.vector).norm() <= 1e-9);
}

TEST_CASE("set projection is idempotent") {
  PiecewiseDomain disk = unit_disk();
  ProjectionResult once = project_to_set(vec2(2.0, 1.0), disk, 0.0);
  ProjectionResult twice = project_to_set(once.vector, disk, 0.0);
  CHECK(twice.distance <= 1e-10);
  CHECK((twice.vector - once.vector).norm() <= 1e-10);
}

TEST_CASE("set projection is deterministic") {
  PiecewiseDomain par = parabola_domain();
  ProjectionResult a = project_to_set(vec2(0.31, 0.22), par, 0.05);
  ProjectionResult b = project_to_set(vec2(0.31, 0.22), par, 0.05);
  CHECK((a.vector - b.vector).norm() == 0.0);
  CHECK(a.distance == b.distance);
}

TEST_CASE("solver matches the grid oracle on random fat instances") {
  for (int i = 0; i < 10; ++i) {
    int dim = 2 + (i % 2);
    PolyhedralInstance inst = random_polyhedron_instance(dim, derive_seed(42, i));
    ProjectionResult solver = project_to_set(inst.query, inst.domain, 0.0);
    OracleResult oracle =
        oracle_project(inst.query, inst.domain, 0.0, inst.box_lo, inst.box_hi, 1e-3);
    CHECK(solver.distance <= oracle.distance + 1e-9); // oracle is never below optimal
    CHECK(oracle.distance - solver.distance <= 2e-3 * std::sqrt(double(dim)));
  }
}

TEST_CASE("oracle refinement never increases the distance estimate") {
  PiecewiseDomain disk = unit_disk();
  Eigen::VectorXd y = vec2(1.3, 0.4);
  OracleResult coarse = oracle_project(y, disk, 0.0, vec2(-1.5, -1.5), vec2(1.5, 1.5), 4e-2);
  OracleResult fine = oracle_project(y, disk, 0.0, vec2(-1.5, -1.5), vec2(1.5, 1.5), 2e-2);
  CHECK(fine.distance <= coarse.distance + 1e-12);
  CHECK(fine.evaluated > 0);
}

TEST_CASE("oracle returns grid-aligned feasible queries unchanged") {
  PiecewiseDomain disk = unit_disk();
  Eigen::VectorXd y = vec2(0.5, 0.0);
  OracleResult r = oracle_project(y, disk, 0.0, vec2(-1.0, -1.0), vec2(1.0, 1.0), 0.25);
  CHECK((r.point - y).norm() == 0.0);
  CHECK(r.distance == 0.0);
}

TEST_CASE("oracle refuses boxes with no feasible grid point") {
  PiecewiseDomain disk = unit_disk();
  CHECK_THROWS_AS(
      oracle_project(vec2(3.0, 3.0), disk, 0.0, vec2(2.0, 2.0), vec2(4.0, 4.0), 0.1),
      InfeasibleError);
}

TEST_CASE("projection onto moving polyhedra is non-expansive over random pairs") {
  PiecewiseDomain wedge = wedge_domain();
  PolyhedronUnion u = temporal_tangent_union(wedge, vec2(0.3, 0.1), 0.2);
  REQUIRE(u.members.size() == 1);
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd f1(2), f2(2);
    f1 << rng.uniform(-2, 2), rng.uniform(-2, 2);
    f2 << rng.uniform(-2, 2), rng.uniform(-2, 2);
    ProjectionResult p1 = project_polyhedron(f1, u.members[0]);
    ProjectionResult p2 = project_polyhedron(f2, u.members[0]);
    CHECK((p1.vector - p2.vector).norm() <= (f1 - f2).norm() + 1e-9);
  }
}
