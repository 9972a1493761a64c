#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "shellspec/error.hpp"
#include "shellspec/mesh.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("structured mesh counts and orientation") {
  const auto d = domains::eccentric_annulus(1.0, 2.0, 0.3);
  const auto m = build_transfinite_mesh(d, 32, 4);
  CHECK(m.triangles.size() == 2u * 32 * 4);
  CHECK(m.vertices.size() == 32u * 5);
  CHECK(m.inner_edges.size() == 32u);
  CHECK(m.outer_edges.size() == 32u);
  const auto q = mesh_quality(m);
  CHECK(q.orientation_ok);
  CHECK(q.min_angle_deg > 10.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) CHECK(m.triangle_area(t) > 0.0);
  CHECK(m.boundary_loop(BoundaryTag::Inner).size() == 32u);
}

TEST_CASE("refinement converges to the exact area and perimeters") {
  const auto d = domains::eccentric_annulus(1.0, 2.0, 0.3);
  TriMesh m = build_transfinite_mesh(d, 16, 4);
  double prev_err = std::abs(m.area() - 3.0 * kPi);
  for (int level = 0; level < 3; ++level) {
    m = refine(m);
    const double err = std::abs(m.area() - 3.0 * kPi);
    // piecewise-linear boundary: error falls by about four per level
    CHECK(err < 0.3 * prev_err);
    prev_err = err;
  }
  CHECK(m.triangles.size() == 2u * 16 * 4 * 64);
  CHECK(m.boundary_length(BoundaryTag::Outer) == doctest::Approx(4.0 * kPi).epsilon(1e-3));
  CHECK(m.boundary_length(BoundaryTag::Inner) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
  for (int v : m.boundary_loop(BoundaryTag::Outer)) CHECK(m.vertices[v].norm() == doctest::Approx(2.0));
}

TEST_CASE("polygon corners become mesh vertices") {
  const auto d = domains::disk_minus_square(2.0, 1.0);
  const auto m = refine(build_transfinite_mesh(d, 32, 6));
  for (const Vec2 corner : {Vec2(0.5, 0.5), Vec2(-0.5, 0.5), Vec2(-0.5, -0.5), Vec2(0.5, -0.5)}) {
    double best = 1e9;
    for (int v : m.boundary_loop(BoundaryTag::Inner)) best = std::min(best, (m.vertices[v] - corner).norm());
    CHECK(best <= 1e-12);
  }
  CHECK(m.area() == doctest::Approx(4.0 * kPi - 1.0).epsilon(5e-3));
  CHECK(mesh_quality(m).min_angle_deg > 10.0);
}

TEST_CASE("geometric layers keep cells square on a wide gap") {
  const auto d = domains::concentric_annulus(0.5, 8.0);
  const auto uniform = mesh_quality(build_transfinite_mesh(d, 32, 8));
  MeshOptions opt;
  opt.geometric = true;
  const auto geometric = mesh_quality(build_transfinite_mesh(d, 32, 8, opt));
  CHECK(geometric.max_aspect < uniform.max_aspect);
}

TEST_CASE("JSON round trip keeps vertices and tags") {
  const auto d = domains::polygon_collar({Vec2(0, 0), Vec2(1.5, 0), Vec2(1.8, 1), Vec2(0.5, 1.4), Vec2(-0.3, 0.8)}, 0.5);
  const auto m = build_transfinite_mesh(d, 40, 4);
  const auto r = TriMesh::from_json(m.to_json());
  CHECK(r.vertices.size() == m.vertices.size());
  CHECK(r.triangles == m.triangles);
  CHECK(r.inner_edges == m.inner_edges);
  CHECK(r.outer_edges == m.outer_edges);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(r.vertices[i] == m.vertices[i]);
  CHECK(r.area() == m.area());

  const auto dj = StarAnnularDomain::from_json(d.to_json());
  CHECK(dj.area() == doctest::Approx(d.area()));
}

TEST_CASE("sampled loops and bad input") {
  std::vector<double> in(48), out(48);
  for (int k = 0; k < 48; ++k) {
    in[k] = 0.8 + 0.1 * std::cos(3.0 * 2.0 * kPi * k / 48);
    out[k] = 2.0;
  }
  const StarAnnularDomain d(Vec2::Zero(), StarLoop::sampled(in), StarLoop::sampled(out));
  // chords between samples dip below the sampled radii
  CHECK(d.min_radial_gap() <= 1.1);
  CHECK(d.min_radial_gap() >= 2.0 * std::cos(kPi / 48) - 0.9);
  CHECK(build_transfinite_mesh(d, 48, 4).area() == doctest::Approx(d.area()).epsilon(1e-12));

  try {
    StarAnnularDomain(Vec2::Zero(), StarLoop::circle(Vec2::Zero(), 2.0), StarLoop::circle(Vec2::Zero(), 1.0));
    FAIL("expected a meshing error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Meshing);
  }
}

TEST_CASE("property: point location reproduces linear fields") {
  const auto d = domains::eccentric_annulus(1.0, 2.0, 0.3);
  const auto m = refine(build_transfinite_mesh(d, 32, 4));
  Eigen::VectorXd f(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) f(i) = 3.0 * m.vertices[i].x() - 2.0 * m.vertices[i].y() + 1.0;
  const PointLocator loc(m);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int located = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec2 p(U(rng), U(rng));
    const double r = p.norm(), ri = (p - Vec2(0.3, 0.0)).norm();
    if (r > 1.95 || ri < 1.05) continue;
    const auto v = loc.interpolate(f, p);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(3.0 * p.x() - 2.0 * p.y() + 1.0).epsilon(1e-10));
    ++located;
  }
  CHECK(located > 500);
  CHECK_FALSE(loc.locate(Vec2(50.0, 50.0)).has_value());
}
