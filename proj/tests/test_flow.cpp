#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shellspec/error.hpp"
#include "shellspec/flow.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Fixture {
  StarAnnularDomain domain;
  TriMesh mesh;
  EigenSolution solution;
};

Fixture make_fixture(const StarAnnularDomain& d, int refinements = 1) {
  TriMesh m = build_transfinite_mesh(d, 64, 8);
  for (int i = 0; i < refinements; ++i) m = refine(m);
  const auto bc = BoundaryCondition::robin(1.0);
  return {d, m, solve_first(m, bc, bc)};
}

const Fixture& concentric() {
  static const Fixture f = make_fixture(domains::concentric_annulus(1.0, 2.0));
  return f;
}

const Fixture& eccentric() {
  static const Fixture f = make_fixture(domains::eccentric_annulus(1.0, 2.0, 0.3));
  return f;
}

/// Radius of the maximum of the radial Robin eigenfunction.
double radial_argmax() {
  const auto bc = BoundaryCondition::robin(1.0);
  const auto r = smallest_eigenvalue(ShellProblem{2, 1.0, 2.0, bc, bc}, 1e-12);
  const auto it = std::max_element(r.profile.u.begin(), r.profile.u.end());
  return r.profile.r[it - r.profile.u.begin()];
}

std::vector<Vec2> circle(double radius, int n) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    pts.emplace_back(radius * std::cos(t), radius * std::sin(t));
  }
  return pts;
}

FlowFront circle_front(double radius, BoundaryTag origin) {
  FlowFront f;
  f.origin = origin;
  f.points = circle(radius, 128);
  return f;
}

int count(const std::vector<CriticalPoint2D>& cps, CriticalType type) {
  return static_cast<int>(std::count_if(cps.begin(), cps.end(), [&](const auto& c) { return c.type == type; }));
}

}  // namespace

TEST_CASE("gradient of linear and constant fields is exact") {
  const auto& m = eccentric().mesh;
  Eigen::VectorXd x(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) x(i) = m.vertices[i].x();
  for (const Vec2& g : gradient_field(m, x)) CHECK((g - Vec2(1.0, 0.0)).norm() <= 1e-12);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(m.vertices.size(), 3.0);
  for (const Vec2& g : gradient_field(m, c)) CHECK(g.norm() <= 1e-12);
}

TEST_CASE("gradient of the radial eigenfunction is radial") {
  // the angular error is O(h) / |grad u|, so the ring of maxima is excluded
  const auto bc = BoundaryCondition::robin(1.0);
  TriMesh m = build_transfinite_mesh(domains::concentric_annulus(1.0, 2.0), 64, 8);
  std::vector<double> worst;
  for (int level = 0; level < 3; ++level) {
    const auto u = solve_first(m, bc, bc).nodal_values;
    const auto g = gradient_field(m, u);
    double gmax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, v.norm());
    double w = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].norm() < 0.2 * gmax) continue;
      const Vec2 radial = m.vertices[i].normalized();
      w = std::max(w, std::abs(radial.x() * g[i].y() - radial.y() * g[i].x()) / g[i].norm());
    }
    worst.push_back(w);
    if (level < 2) m = refine(m);
  }
  CHECK(worst[2] < worst[0]);
  CHECK(worst[2] <= 0.02);
}

TEST_CASE("concentric fronts stay circles and close in on the maximum") {
  const auto& f = concentric();
  const auto rec = advance_fronts(f.mesh, f.solution.nodal_values, FlowOptions{});
  REQUIRE(rec.steps.size() > 10);
  const double r_star = radial_argmax();
  double prev = 0.0;
  for (const auto& s : rec.steps) {
    for (const auto* front : {&s.front_in, &s.front_out}) {
      double lo = 1e9, hi = 0.0;
      for (const auto& p : front->points) {
        lo = std::min(lo, p.norm());
        hi = std::max(hi, p.norm());
      }
      CHECK(hi - lo <= 0.02 * hi);
    }
    CHECK(s.area_in + s.area_out >= prev - 1e-9 * rec.domain_area);
    prev = s.area_in + s.area_out;
  }
  const auto& last = rec.steps.back();
  const double h = 0.4 * f.mesh.boundary_length(BoundaryTag::Inner) / f.mesh.inner_edges.size();
  for (const auto& p : last.front_in.points) CHECK(p.norm() <= r_star + h);
  for (const auto& p : last.front_out.points) CHECK(p.norm() >= r_star - h);
  // the fronts stop O(h) apart around the ring of maxima
  const double coarse_fraction = prev / rec.domain_area;
  CHECK(coarse_fraction >= 0.98);
  const auto fine = make_fixture(domains::concentric_annulus(1.0, 2.0), 2);
  const auto fine_rec = advance_fronts(fine.mesh, fine.solution.nodal_values, FlowOptions{});
  const auto& fl = fine_rec.steps.back();
  const double fine_fraction = (fl.area_in + fl.area_out) / fine_rec.domain_area;
  CHECK(fine_fraction > coarse_fraction);
  CHECK(fine_fraction >= 0.99);

  const auto cut = effectless_cut_estimate(rec, f.domain);
  CHECK(cut.simple);
  const double h_mesh = f.mesh.max_edge_length();
  for (const auto& p : cut.curve) CHECK(std::abs(p.norm() - r_star) <= 2.0 * h_mesh);
}

TEST_CASE("eccentric fronts stay disjoint and the cut separates the loops") {
  const auto& f = eccentric();
  const auto rec = advance_fronts(f.mesh, f.solution.nodal_values, FlowOptions{});
  for (const auto& s : rec.steps) {
    CHECK(polylines_disjoint(s.front_in.points, s.front_out.points));
    CHECK(s.gap > 0.0);
  }
  const auto cut = effectless_cut_estimate(rec, f.domain);
  CHECK(cut.simple);
  for (const auto& p : cut.curve) {
    CHECK((p - Vec2(0.3, 0.0)).norm() > 1.0);
    CHECK(p.norm() < 2.0);
  }

  // the cut is close to a level where the normal derivative vanishes
  const auto g = gradient_field(f.mesh, f.solution.nodal_values);
  double gmax = 0.0;
  for (const auto& v : g) gmax = std::max(gmax, v.norm());
  const VectorFieldSampler field(f.mesh, g);
  const int n = static_cast<int>(cut.curve.size());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 tangent = cut.curve[(i + 1) % n] - cut.curve[(i + n - 1) % n];
    const Vec2 normal = Vec2(tangent.y(), -tangent.x()).normalized();
    worst = std::max(worst, std::abs(field(cut.curve[i]).dot(normal)));
  }
  CHECK(worst <= 0.15 * gmax);
}

TEST_CASE("swept pieces match the radial mixed problems") {
  const auto& d = concentric().domain;
  const auto bc = BoundaryCondition::robin(1.0);
  const double delta = 1.4;
  const auto in = subdomain_eigen(d, circle_front(delta, BoundaryTag::Inner), bc);
  const double rn = smallest_eigenvalue(ShellProblem{2, 1.0, delta, bc, BoundaryCondition::neumann()}, 1e-12).lambda;
  CHECK(std::abs(in.lambda - rn) / rn <= 0.01);

  const auto out = subdomain_eigen(d, circle_front(delta, BoundaryTag::Outer), bc);
  const double nr = smallest_eigenvalue(ShellProblem{2, delta, 2.0, BoundaryCondition::neumann(), bc}, 1e-12).lambda;
  CHECK(std::abs(out.lambda - nr) / nr <= 0.01);

  // thin pieces near the seed boundary lie far above the full eigenvalue
  const double full = concentric().solution.lambda;
  const double thin1 = subdomain_eigen(d, circle_front(1.1, BoundaryTag::Inner), bc).lambda;
  const double thin2 = subdomain_eigen(d, circle_front(1.05, BoundaryTag::Inner), bc).lambda;
  CHECK(thin1 > full);
  CHECK(thin2 > thin1);
}

TEST_CASE("zero tilt leaves the eigenfunction and gives no potential") {
  const auto& f = eccentric();
  const auto bc = BoundaryCondition::robin(1.0);
  const auto p = morse_perturb(f.mesh, bc, bc, f.solution, MorseOptions{Vec2::Zero(), 0.08});
  CHECK(p.potential.cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.sup_norm == 0.0);
  CHECK((p.perturbed - f.solution.nodal_values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.cutoff.minCoeff() >= 0.0);
  CHECK(p.cutoff.maxCoeff() <= 1.0);
}

TEST_CASE("potential scales linearly with the tilt") {
  const auto& f = eccentric();
  const auto bc = BoundaryCondition::robin(1.0);
  const auto a = morse_perturb(f.mesh, bc, bc, f.solution, MorseOptions{Vec2(1e-4, 0.5e-4), 0.08});
  const auto b = morse_perturb(f.mesh, bc, bc, f.solution, MorseOptions{Vec2(1e-5, 0.5e-5), 0.08});
  CHECK(a.sup_norm > 0.0);
  CHECK(a.sup_norm / b.sup_norm == doctest::Approx(10.0).epsilon(0.02));
  CHECK(a.collar_clear());
}

TEST_CASE("discrete critical points") {
  const auto& f = concentric();
  const auto& m = f.mesh;
  Eigen::VectorXd lin(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) lin(i) = m.vertices[i].x() + 0.3 * m.vertices[i].y();
  CHECK(critical_points(m, lin).empty());

  const auto ring = critical_points(m, f.solution.nodal_values);
  CHECK(count(ring, CriticalType::Minimum) == 0);
  CHECK(count(ring, CriticalType::Maximum) >= 1);

  // structured rings: red-refined midpoints sit off the circles and add
  // chord-sag ripples of the same order as the tilt
  const auto fine = build_transfinite_mesh(domains::concentric_annulus(1.0, 2.0), 128, 16);
  const auto bc = BoundaryCondition::robin(1.0);
  Eigen::VectorXd tilted = solve_first(fine, bc, bc).nodal_values;
  for (std::size_t i = 0; i < fine.vertices.size(); ++i) tilted(i) += 0.01 * fine.vertices[i].x();
  const auto cps = critical_points(fine, tilted);
  CHECK(count(cps, CriticalType::Maximum) == 1);
  CHECK(count(cps, CriticalType::Saddle) == 1);
  CHECK(count(cps, CriticalType::Minimum) == 0);
  for (const auto& c : cps) {
    CHECK(c.multiplicity == 1);
    CHECK(std::abs(c.point.y()) <= 1e-12);
    CHECK((c.type == CriticalType::Maximum) == (c.point.x() > 0.0));
  }
}

TEST_CASE("polyline predicates") {
  const auto sq = std::vector<Vec2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(sq) == doctest::Approx(1.0));
  CHECK(polyline_is_simple(sq));
  const auto bow = std::vector<Vec2>{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(polyline_is_simple(bow));
  CHECK(polylines_disjoint(circle(1.0, 32), circle(2.0, 32)));
  CHECK_FALSE(polylines_disjoint(circle(1.0, 32), sq));
}
