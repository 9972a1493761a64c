#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "shellspec/morse3d.hpp"

using namespace shellspec;

namespace {

Vec3 fd_gradient(const Vec3& x, double h) {
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e(k) = h;
    g(k) = (v_eval(x + e).value - v_eval(x - e).value) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("stated critical points and Hessians") {
  const auto origin = v_eval(Vec3::Zero());
  CHECK(origin.gradient.norm() == 0.0);
  const Vec3 eo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(origin.hessian).eigenvalues();
  CHECK((eo - Vec3(-4.0, 2.0, 2.0)).norm() <= 1e-12);

  const auto pole = v_eval(Vec3(0, 0, 1));
  CHECK(pole.gradient.norm() <= 1e-14);
  const Vec3 ep = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(pole.hessian).eigenvalues();
  CHECK((ep - Vec3(2.0, 2.0, 8.0)).norm() <= 1e-12);
}

TEST_CASE("regimes: z inside, |x|^2 outside") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 dir = Vec3(N(rng), N(rng), N(rng)).normalized();
    const Vec3 inside = dir * std::sqrt(1.9) * std::abs(N(rng)) / 3.0;
    const double z = inside.x() * inside.x() + inside.y() * inside.y() + std::pow(inside.z(), 4) -
                     2.0 * inside.z() * inside.z();
    if (inside.squaredNorm() <= 2.0) CHECK(v_eval(inside).value == doctest::Approx(z).epsilon(1e-14));
    const Vec3 outside = dir * (std::sqrt(3.0) + 3.0 * std::abs(N(rng)));
    const auto e = v_eval(outside);
    CHECK(e.value == doctest::Approx(outside.squaredNorm()).epsilon(1e-14));
    CHECK((e.gradient - 2.0 * outside).norm() <= 1e-12 * outside.norm());
  }
}

TEST_CASE("smooth step") {
  CHECK(SmoothStep::value(2.0) == 0.0);
  CHECK(SmoothStep::value(3.0) == 1.0);
  CHECK(SmoothStep::value(2.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (double t = 2.01; t < 3.0; t += 0.01) {
    const double s = SmoothStep::value(t);
    CHECK(s >= prev);
    prev = s;
    const double h = 1e-6;
    CHECK(SmoothStep::d1(t) ==
          doctest::Approx((SmoothStep::value(t + h) - SmoothStep::value(t - h)) / (2 * h)).epsilon(1e-6));
    CHECK(SmoothStep::d2(t) ==
          doctest::Approx((SmoothStep::d1(t + h) - SmoothStep::d1(t - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("property: analytic derivatives match finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2.2, 2.2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x(U(rng), U(rng), U(rng));
    const auto e = v_eval(x);
    CHECK((e.gradient - fd_gradient(x, 1e-5)).norm() <= 1e-6 * std::max(1.0, e.gradient.norm()));
    Eigen::Matrix3d H;
    for (int k = 0; k < 3; ++k) {
      Vec3 d = Vec3::Zero();
      d(k) = 1e-5;
      H.col(k) = (v_eval(x + d).gradient - v_eval(x - d).gradient) / 2e-5;
    }
    CHECK((H - e.hessian).norm() <= 1e-5 * std::max(1.0, e.hessian.norm()));
    CHECK((e.hessian - e.hessian.transpose()).norm() == 0.0);
  }
}

TEST_CASE("classification finds the three points, also after scaling") {
  for (double scale : {1.0, 5.0}) {
    ClassifyOptions o;
    o.scale = scale;
    const auto cps = classify_critical_points(o);
    REQUIRE(cps.size() == 3);
    int minima = 0, saddles = 0;
    for (const auto& c : cps) {
      if (c.index == 0) {
        ++minima;
        CHECK(std::abs(std::abs(c.location.z()) - 1.0) <= 1e-10);
        CHECK((c.hessian_eigenvalues - scale * Vec3(2, 2, 8)).norm() <= 1e-8 * scale);
      } else {
        ++saddles;
        CHECK(c.index == 1);
        CHECK(c.location.norm() <= 1e-10);
        CHECK((c.hessian_eigenvalues - scale * Vec3(-4, 2, 2)).norm() <= 1e-8 * scale);
      }
    }
    CHECK(minima == 2);
    CHECK(saddles == 1);
  }
}

TEST_CASE("trajectories") {
  const auto a = trace_flow(Vec3(0, 0, 0.5), FlowDirection::Descent);
  CHECK(a.converged);
  CHECK((a.limit - Vec3(0, 0, 1)).norm() <= 1e-6);
  CHECK(a.monotone);

  const auto b = trace_flow(Vec3(0.5, 0, 0), FlowDirection::Descent);
  CHECK(b.converged);
  CHECK(b.limit.norm() <= 1e-6);
  for (const auto& p : b.points) CHECK(p.z() == 0.0);

  TraceOptions o;
  o.t_max = 3.0;
  const auto c = trace_flow(Vec3(0.1, 0.1, 0.1), FlowDirection::Ascent, o);
  CHECK(c.monotone);
  double prev = 0.0;
  for (const auto& p : c.points) {
    if (p.squaredNorm() >= 3.0) {
      CHECK(p.norm() >= prev);
      prev = p.norm();
    }
  }
  CHECK(prev > std::sqrt(3.0));

  const auto pole = trace_flow(Vec3(0, 0, 4), FlowDirection::Descent);
  CHECK((pole.limit - Vec3(0, 0, 1)).norm() <= 1e-6);
  const auto off = trace_flow(Vec3(4, 0, 1e-3), FlowDirection::Descent);
  CHECK((off.limit - Vec3(0, 0, 1)).norm() <= 1e-6);
}

TEST_CASE("equator of the radius-4 sphere descends to the saddle") {
  const auto s = saddle_sphere_section(4.0, 64);
  REQUIRE(s.points.size() == 64);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(s.points[i].norm() == doctest::Approx(4.0));
    CHECK(s.limits[i].norm() <= 1e-6);
  }
}
