#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "shellspec/convex_geometry.hpp"
#include "shellspec/error.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> random_cloud3(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.3, 2.0);
  const Vec3 stretch(U(rng), U(rng), U(rng));
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Vec3(N(rng), N(rng), N(rng)).cwiseProduct(stretch));
  return pts;
}

std::vector<Vec2> random_cloud2(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(U(rng), 0.4 * U(rng));
  return pts;
}

}  // namespace

TEST_CASE("closed-form quermassintegrals") {
  const auto cube = quermassintegrals_3d(ConvexBody3D::cube(1.0));
  CHECK(cube[0] == doctest::Approx(1.0));
  CHECK(cube[1] == doctest::Approx(2.0));
  CHECK(std::abs(cube[2] - kPi) <= 1e-12);
  CHECK(cube[3] == doctest::Approx(4.0 * kPi / 3.0));

  // regular tetrahedron: six edges, dihedral angle arccos(1/3)
  const double a = 1.7;
  const double w2 = 6.0 * a * (kPi - std::acos(1.0 / 3.0)) / 6.0;
  CHECK(quermassintegral_top_3d(ConvexBody3D::regular_tetrahedron(a)) == doctest::Approx(w2));

  // W2 of a ball of radius r is 4 pi r / 3; the icosphere approaches it from below
  const double r = 1.3;
  const double w2_sphere = quermassintegral_top_3d(ConvexBody3D::icosphere(4, r));
  CHECK(w2_sphere <= 4.0 * kPi * r / 3.0);
  CHECK(std::abs(w2_sphere - 4.0 * kPi * r / 3.0) / (4.0 * kPi * r / 3.0) <= 2e-3);

  const auto rect = quermassintegrals_2d(ConvexBody2D::rectangle(2.0, 0.5));
  CHECK(rect.w0 == doctest::Approx(1.0));
  CHECK(rect.w1 == doctest::Approx(2.5));
  CHECK(rect.w2 == doctest::Approx(kPi));

  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi));
  CHECK(shell_volume(2, 1.0, 2.0) == doctest::Approx(3.0 * kPi));
}

TEST_CASE("Steiner fit recovers the cube and a planar polygon") {
  SteinerOptions opt;
  opt.samples = 400'000;
  const auto fit3 = steiner_monte_carlo(ConvexBody3D::cube(1.0), opt);
  REQUIRE(fit3.inner_coefficients.size() == 2);
  CHECK(std::abs(fit3.inner_coefficients[0] - 2.0) <= 3.0 * fit3.inner_sigma[0]);
  CHECK(std::abs(fit3.inner_coefficients[1] - kPi) <= 3.0 * fit3.inner_sigma[1]);

  const auto hex = ConvexBody2D::regular_polygon(6, 1.0);
  const auto fit2 = steiner_monte_carlo(hex, opt);
  REQUIRE(fit2.inner_coefficients.size() == 1);
  CHECK(std::abs(fit2.inner_coefficients[0] - hex.perimeter() / 2.0) <= 3.0 * fit2.inner_sigma[0]);
}

TEST_CASE("Steiner estimate does not depend on the thread split") {
  SteinerOptions opt;
  opt.samples = 100'000;
  const auto cube = ConvexBody3D::cube(1.0);
  const auto a = steiner_monte_carlo(cube, opt);
  const auto b = steiner_monte_carlo_serial(cube, opt);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].volume == b.samples[i].volume);
}

TEST_CASE("property: inequalities and homogeneity on random hulls") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> C(0.2, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto body3 = ConvexBody3D::hull(random_cloud3(rng, 30));
    CHECK(alexandrov_fenchel_check(body3).all_hold);
    CHECK(isoperimetric_holds(body3));
    const double c = C(rng);
    const auto w = quermassintegrals_3d(body3);
    const auto ws = quermassintegrals_3d(body3.scaled(c));
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(ws[i] - std::pow(c, 3 - i) * w[i]) <= 1e-9 * std::abs(ws[i]));

    const auto body2 = ConvexBody2D::hull(random_cloud2(rng, 25));
    CHECK(alexandrov_fenchel_check(body2).all_hold);
    CHECK(isoperimetric_holds(body2));
    const auto q = quermassintegrals_2d(body2);
    const auto qs = quermassintegrals_2d(body2.scaled(c));
    CHECK(std::abs(qs.w0 - c * c * q.w0) <= 1e-9 * qs.w0);
    CHECK(std::abs(qs.w1 - c * q.w1) <= 1e-9 * qs.w1);
  }
}

TEST_CASE("balls are the equality case") {
  const auto af = alexandrov_fenchel_check(ConvexBody2D::regular_polygon(4096, 1.0), 1e-5);
  for (const auto& p : af.pairs) CHECK(p.equality);
}

TEST_CASE("degenerate and non-convex input is rejected") {
  CHECK_THROWS_AS(ConvexBody2D({Vec2(0, 0), Vec2(1, 0)}), Error);
  try {
    ConvexBody2D({Vec2(0, 0), Vec2(2, 0), Vec2(1, 0.2), Vec2(2, 2), Vec2(0, 2)});
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
  }
  // a tetrahedron whose bottom face is dented inward
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0.2, 0.1}};
  const std::vector<std::vector<int>> dent{{4, 2, 1}, {4, 1, 0}, {4, 0, 2},
                                           {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
  CHECK_THROWS_AS(ConvexBody3D(v, dent), Error);
}

TEST_CASE("matched shells and class membership") {
  const auto s = matched_shell_2d(2.0 * kPi, 4.0 * kPi);
  CHECK(s.alpha == doctest::Approx(1.0));
  CHECK(s.beta == doctest::Approx(2.0));

  const auto m = class_membership(domains::eccentric_annulus(1.0, 2.0, 0.3));
  CHECK(m.in_class);
  CHECK(m.alpha == doctest::Approx(1.0));
  CHECK(m.beta == doctest::Approx(2.0));
  CHECK(m.volume_domain == doctest::Approx(m.volume_shell));
  CHECK(m.matched_constraint == "perimeter");

  CHECK(class_membership(domains::disk_minus_square(2.0, 1.0)).in_class);

  // a thin slab around a small hole: the matched shell is far larger
  const auto slab = StarAnnularDomain(
      Vec2::Zero(), StarLoop::circle(Vec2::Zero(), 0.2),
      StarLoop::polygon({Vec2(-4, -0.5), Vec2(4, -0.5), Vec2(4, 0.5), Vec2(-4, 0.5)}));
  const auto out = class_membership(slab);
  CHECK_FALSE(out.in_class);
  CHECK_FALSE(out.volume_ok);

  // spatial class: unit cube inside a large ball
  const auto m3 = class_membership(ConvexBody3D::cube(1.0), Sphere3D{Vec3::Zero(), 3.0});
  CHECK(m3.dim == 3);
  CHECK(m3.alpha == doctest::Approx(3.0 / 4.0));
  CHECK(m3.matched_constraint == "W_{N-1}");
  CHECK(m3.containment_ok);
}
