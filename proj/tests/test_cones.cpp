#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "ptds/errors.hpp"
#include "ptds/projection.hpp"
#include "ptds/scenarios.hpp"
#include "ptds/tangent.hpp"

using namespace ptds;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

} // namespace

TEST_CASE("wedge vertex velocity polyhedron matches the hand linearization") {
  PiecewiseDomain wedge = wedge_domain();
  TemporalTangentPolyhedron p =
      temporal_tangent(wedge.pieces[0], vec2(0.0, 0.0), 0.0, wedge.tol);

  Eigen::MatrixXd a_expected(3, 2);
  a_expected << -1.0, 0.0, 0.0, -1.0, -1.0, 1.0;
  Eigen::VectorXd b_expected(3);
  b_expected << 0.0, 0.0, -1.0;
  CHECK((p.sys.A - a_expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.sys.b - b_expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.active.indices == std::vector<int>{0, 1, 2});
  CHECK(p.qualification.status == QualStatus::DegenerateNonempty);

  CHECK(p.contains(vec2(1.0, 0.0)));
  CHECK(p.contains(vec2(2.0, 0.5)));
  // Standing still is not allowed: the third row demands v2 - v1 <= -1.
  CHECK_FALSE(p.contains(vec2(0.0, 0.0)));
  CHECK_FALSE(p.stationary()); // right-hand sides carry the time drift
}

TEST_CASE("union members follow piece order and union membership is any-member") {
  PiecewiseDomain wedge = wedge_domain();
  PolyhedronUnion u = temporal_tangent_union(wedge, vec2(0.0, 0.0), 0.0);
  REQUIRE(u.members.size() == 2);
  CHECK(u.members[0].active.piece_index == 0);
  CHECK(u.members[1].active.piece_index == 1);

  CHECK(u.contains(vec2(1.0, 0.0)));  // member 0
  CHECK(u.contains(vec2(-1.0, 0.0))); // member 1
  CHECK_FALSE(u.contains(vec2(0.0, 0.0)));
  CHECK_FALSE(u.contains(vec2(0.0, 1.0)));

  for (double v1 : {-2.0, -1.0, -0.3, 0.0, 0.6, 1.5}) {
    for (double v2 : {-1.5, -0.4, 0.0, 0.8, 2.0}) {
      Eigen::VectorXd v = vec2(v1, v2);
      bool any = u.members[0].contains(v) || u.members[1].contains(v);
      CHECK(u.contains(v) == any);
    }
  }
}

TEST_CASE("points off a piece are refused") {
  PiecewiseDomain wedge = wedge_domain();
  CHECK_THROWS_AS(temporal_tangent(wedge.pieces[0], vec2(-1.0, 0.5), 0.0, wedge.tol),
                  InfeasibleError);
  CHECK_THROWS_AS(temporal_tangent_union(wedge, vec2(5.0, -3.0), 0.0), InfeasibleError);
}

TEST_CASE("parabola vertex yields an empty velocity set") {
  PiecewiseDomain par = parabola_domain();
  PolyhedronUnion u = temporal_tangent_union(par, vec2(0.0, 0.0), 0.0);
  REQUIRE(u.members.size() == 1);
  CHECK(u.members[0].qualification.status == QualStatus::Empty);
  CHECK_FALSE(u.contains(vec2(0.0, 0.0)));
  CHECK_FALSE(u.contains(vec2(3.0, -1.0)));
  CHECK_THROWS_AS(project_union(vec2(0.0, 0.0), u), EmptyTangentError);
  CHECK_THROWS_AS(project_polyhedron(vec2(0.0, 0.0), u.members[0]), EmptyTangentError);
}

TEST_CASE("stationary constraints produce a genuine cone") {
  // Static cap {x <= 1} at its boundary: v <= 0, closed under positive scaling.
  Json j;
  j["dimension"] = 1;
  j["pieces"] = Json::array({Json{
      {"name", "cap"},
      {"inequalities",
       Json::array({Json{{"kind", "affine"}, {"a", {1.0}}, {"c", 0.0}, {"d", -1.0}}})}}});
  PiecewiseDomain cap = domain_from_json(j);
  Eigen::VectorXd x(1);
  x << 1.0;
  TemporalTangentPolyhedron p = temporal_tangent(cap.pieces[0], x, 0.0, cap.tol);
  CHECK(p.stationary());
  Eigen::VectorXd v(1);
  for (double s : {-3.0, -1.0, -0.25}) {
    v << s;
    CHECK(p.contains(v));
    CHECK(p.contains(2.0 * v)); // scaling stays inside
  }

  // Moving wall {x - t <= 0} at the wall: v <= 1 is affine, not a cone.
  Json jm;
  jm["dimension"] = 1;
  jm["pieces"] = Json::array({Json{
      {"name", "wall"},
      {"inequalities",
       Json::array({Json{{"kind", "affine"}, {"a", {1.0}}, {"c", -1.0}, {"d", 0.0}}})}}});
  PiecewiseDomain wall = domain_from_json(jm);
  x << 0.0;
  TemporalTangentPolyhedron w = temporal_tangent(wall.pieces[0], x, 0.0, wall.tol);
  CHECK_FALSE(w.stationary());
  v << 1.0;
  CHECK(w.contains(v));
  CHECK_FALSE(w.contains(2.0 * v)); // scaling escapes the affine polyhedron
}

TEST_CASE("velocity sampling collapses to the center projection at zero radius") {
  PiecewiseDomain wedge = wedge_domain();
  HullSample s =
      krasovskii_hull_sample(zero_field(2), wedge, vec2(0.0, 0.0), 0.0, 0.0, 1, 0);
  REQUIRE(s.vectors.size() == 1);
  CHECK((s.vectors[0] - vec2(1.0, 0.0)).norm() <= 5e-9);
}

TEST_CASE("velocity sampling near the vertex stays bounded and deterministic") {
  PiecewiseDomain wedge = wedge_domain();
  HullSample a =
      krasovskii_hull_sample(zero_field(2), wedge, vec2(0.05, 0.02), 0.0, 0.02, 16, 3);
  HullSample b =
      krasovskii_hull_sample(zero_field(2), wedge, vec2(0.05, 0.02), 0.0, 0.02, 16, 3);
  REQUIRE(a.vectors.size() == 16);
  REQUIRE(b.vectors.size() == 16);
  for (size_t i = 0; i < a.vectors.size(); ++i) {
    CHECK((a.vectors[i] - b.vectors[i]).norm() == 0.0); // same seed, same cloud
    CHECK(a.vectors[i].norm() <= 2.0);
  }
}
