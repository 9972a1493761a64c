#include "doctest.h"

#include <cmath>
#include <random>

#include "shellspec/error.hpp"
#include "shellspec/fem_eig.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {

TriMesh eccentric_mesh(int n_theta = 32, int n_r = 4) {
  return build_transfinite_mesh(domains::eccentric_annulus(1.0, 2.0, 0.3), n_theta, n_r);
}

double sparse_max_diff(const SparseMatrix& a, const SparseMatrix& b) {
  return (Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Neumann stiffness annihilates constants and the mass integrates area") {
  const auto m = eccentric_mesh();
  const auto sys = assemble(m, BoundaryCondition::neumann(), BoundaryCondition::neumann());
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.n_dofs);
  CHECK((sys.K * one).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(one.dot(sys.M * one) == doctest::Approx(m.area()).epsilon(1e-12));
}

TEST_CASE("Robin edge mass integrates the boundary length") {
  const auto m = eccentric_mesh();
  const double h = 2.5;
  const auto sys = assemble(m, BoundaryCondition::robin(h), BoundaryCondition::neumann());
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.n_dofs);
  CHECK(one.dot(sys.K * one) ==
        doctest::Approx(h * m.boundary_length(BoundaryTag::Inner)).epsilon(1e-12));
}

TEST_CASE("parallel and serial assembly agree") {
  const auto m = refine(eccentric_mesh());
  const auto bc = BoundaryCondition::robin(1.0);
  Eigen::VectorXd v(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) v(i) = std::sin(m.vertices[i].x());
  const auto a = assemble(m, bc, BoundaryCondition::dirichlet(), &v);
  const auto b = assemble_serial(m, bc, BoundaryCondition::dirichlet(), &v);
  CHECK(a.n_dofs == b.n_dofs);
  CHECK(a.dof_map == b.dof_map);
  CHECK(sparse_max_diff(a.K, b.K) <= 1e-14);
  CHECK(sparse_max_diff(a.M, b.M) <= 1e-14);
}

TEST_CASE("Dirichlet elimination and degenerate systems") {
  const auto m = eccentric_mesh(32, 4);
  const auto sys = assemble(m, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet());
  CHECK(sys.n_dofs == static_cast<int>(m.vertices.size()) - 64);
  // every vertex on a Dirichlet boundary
  TriMesh tiny;
  tiny.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  tiny.triangles = {{0, 1, 2}};
  tiny.inner_edges = {{0, 1}};
  tiny.outer_edges = {{1, 2}, {2, 0}};
  try {
    assemble(tiny, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet());
    FAIL("expected a degenerate problem");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateProblem);
  }
}

TEST_CASE("eigenpair: positive normalized vector, Rayleigh quotient, residual") {
  const auto m = refine(eccentric_mesh());
  const auto bc = BoundaryCondition::robin(1.0);
  const auto sys = assemble(m, bc, bc);
  const auto sol = smallest_eigenpair(sys);
  CHECK(sol.nodal_values.maxCoeff() == doctest::Approx(1.0));
  CHECK(sol.nodal_values.minCoeff() > 0.0);
  CHECK(sol.residual <= 1e-8);
  CHECK(rayleigh_quotient(sys, sol.nodal_values) == doctest::Approx(sol.lambda).epsilon(1e-10));

  const auto nn = solve_first(m, BoundaryCondition::neumann(), BoundaryCondition::neumann());
  CHECK(std::abs(nn.lambda) <= 1e-9);
}

TEST_CASE("a constant potential shifts the eigenvalue exactly") {
  const auto m = eccentric_mesh();
  const auto bc = BoundaryCondition::robin(1.0);
  const double base = solve_first(m, bc, bc).lambda;
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(m.vertices.size(), 0.75);
  CHECK(solve_first(m, bc, bc, &c).lambda == doctest::Approx(base + 0.75).epsilon(1e-9));

  const auto fn = nodal_potential(m, c);
  CHECK(fn(Vec2(0.0, 1.5)) == doctest::Approx(0.75));
  CHECK(fn(Vec2(40.0, 0.0)) == 0.0);
  CHECK_THROWS_AS(nodal_potential(m, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("Richardson extrapolation matches the radial solver on the concentric annulus") {
  const auto coarse = build_transfinite_mesh(domains::concentric_annulus(1.0, 2.0), 32, 4);
  for (const auto& bc : {BoundaryCondition::dirichlet(), BoundaryCondition::robin(1.0)}) {
    CAPTURE(bc.to_string());
    const auto r = richardson_estimate(coarse, bc, bc, 4);
    const double radial = smallest_eigenvalue(ShellProblem{2, 1.0, 2.0, bc, bc}, 1e-12).lambda;
    CHECK(r.levels.size() == 4);
    CHECK(std::abs(r.lambda - radial) / radial <= 1e-3);
    CHECK(std::abs(r.lambda - radial) <= 3.0 * r.error_bar + 1e-4 * radial);
    CHECK(r.order == doctest::Approx(2.0).epsilon(0.15));
    // conforming P1 approaches from above
    for (const auto& lvl : r.levels) CHECK(lvl.lambda > radial);
  }
}

TEST_CASE("property: Robin eigenvalue increases with either coefficient") {
  const auto m = eccentric_mesh();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.05, 8.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = U(rng), b = U(rng);
    const double l0 = solve_first(m, BoundaryCondition::robin(a), BoundaryCondition::robin(b)).lambda;
    const double l1 = solve_first(m, BoundaryCondition::robin(2 * a), BoundaryCondition::robin(b)).lambda;
    const double l2 = solve_first(m, BoundaryCondition::robin(a), BoundaryCondition::robin(2 * b)).lambda;
    const double ld = solve_first(m, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet()).lambda;
    CHECK(l0 > 0.0);
    CHECK(l1 > l0);
    CHECK(l2 > l0);
    CHECK(ld > std::max(l1, l2));
  }
}
