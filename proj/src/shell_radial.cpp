#include "shellspec/shell_radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shellspec/error.hpp"
#include "shellspec/parallel.hpp"

namespace shellspec {

namespace {

struct State {
  double u;
  double du;
};

State initial_state(const BoundaryCondition& inner) {
  // Outward normal at the inner sphere is -e_r, so du/dnu + h u = 0 reads
  // u'(alpha) = h u(alpha).
  switch (inner.kind()) {
    case BoundaryCondition::Kind::Neumann: return {1.0, 0.0};
    case BoundaryCondition::Kind::Robin: return {1.0, inner.h()};
    case BoundaryCondition::Kind::Dirichlet: return {0.0, 1.0};
  }
  return {1.0, 0.0};
}

double terminal_functional(const BoundaryCondition& outer, const State& s) {
  switch (outer.kind()) {
    case BoundaryCondition::Kind::Neumann: return s.du;
    case BoundaryCondition::Kind::Robin: return s.du + outer.h() * s.u;
    case BoundaryCondition::Kind::Dirichlet: return s.u;
  }
  return s.du;
}

// Integrates the radial ODE with classical RK4. When `profile` is given, it
// receives every sample. Returns the terminal state and counts sign changes
// strictly inside (alpha, beta).
State integrate(const ShellProblem& p, double lambda, int steps, int& zero_count,
                RadialProfile* profile) {
  const double h = (p.beta - p.alpha) / steps;
  const double c = static_cast<double>(p.dim - 1);
  auto rhs = [&](double r, const State& s) {
    return State{s.du, -c / r * s.du - lambda * s.u};
  };

  State s = initial_state(p.inner);
  if (profile) {
    profile->r.assign(steps + 1, 0.0);
    profile->u.assign(steps + 1, 0.0);
    profile->r[0] = p.alpha;
    profile->u[0] = s.u;
  }
  zero_count = 0;
  int last_sign = 0;
  for (int i = 0; i < steps; ++i) {
    const double r = p.alpha + i * h;
    const State k1 = rhs(r, s);
    const State k2 = rhs(r + 0.5 * h, {s.u + 0.5 * h * k1.u, s.du + 0.5 * h * k1.du});
    const State k3 = rhs(r + 0.5 * h, {s.u + 0.5 * h * k2.u, s.du + 0.5 * h * k2.du});
    const State k4 = rhs(r + h, {s.u + h * k3.u, s.du + h * k3.du});
    s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    s.du += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    if (!std::isfinite(s.u) || !std::isfinite(s.du)) {
      throw Error(ErrorKind::Overflow, "radial state left the finite range at lambda = " +
                                           std::to_string(lambda));
    }
    if (profile) {
      profile->r[i + 1] = i + 1 == steps ? p.beta : r + h;
      profile->u[i + 1] = s.u;
    }
    if (i + 1 < steps) {  // the endpoint is excluded
      const int sign = (s.u > 0.0) - (s.u < 0.0);
      if (sign != 0) {
        if (last_sign != 0 && sign != last_sign) ++zero_count;
        last_sign = sign;
      }
    }
  }
  return s;
}

double default_lambda_max(const ShellProblem& p, int modes) {
  const double base = std::pow(std::numbers::pi / (p.beta - p.alpha), 2);
  const double curvature =
      std::max(0.0, (p.dim - 1.0) * (p.dim - 3.0)) / (4.0 * p.alpha * p.alpha);
  return 4.0 * (modes + 1) * (modes + 1) * base + curvature + 1.0;
}

RadialEigenResult finish(const ShellProblem& p, double lambda, const ShootingOptions& options) {
  RadialEigenResult out;
  out.lambda = lambda;
  int zc = 0;
  const State end = integrate(p, lambda, options.steps, zc, &out.profile);
  out.zero_count = zc;
  double umax = 0.0;
  for (double u : out.profile.u) umax = std::max(umax, std::abs(u));
  out.residual = std::abs(terminal_functional(p.outer, end)) / std::max(umax, 1e-300);
  return out;
}

double bisect(const ShellProblem& p, double lo, double hi, double flo, double tol,
              const ShootingOptions& options) {
  for (int it = 0; it < 200 && (hi - lo) > tol * std::max(std::abs(hi), 1e-300); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = shoot(p, mid, options).terminal_residual;
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void ShellProblem::validate() const {
  if (dim < 2) throw Error(ErrorKind::Domain, "shell dimension must be at least 2");
  if (!(alpha > 0.0) || !(beta > alpha) || !std::isfinite(beta)) {
    throw Error(ErrorKind::Domain, "shell radii must satisfy 0 < alpha < beta");
  }
}

ShootResult shoot(const ShellProblem& problem, double lambda, const ShootingOptions& options) {
  problem.validate();
  if (!std::isfinite(lambda)) throw Error(ErrorKind::Domain, "lambda must be finite");
  ShootResult out;
  const State end = integrate(problem, lambda, options.steps, out.zero_count, nullptr);
  out.terminal_residual = terminal_functional(problem.outer, end);
  return out;
}

RadialProfile shoot_profile(const ShellProblem& problem, double lambda,
                            const ShootingOptions& options) {
  problem.validate();
  RadialProfile profile;
  int zc = 0;
  integrate(problem, lambda, options.steps, zc, &profile);
  return profile;
}

std::vector<RadialEigenResult> lowest_eigenvalues(const ShellProblem& problem, int count,
                                                  double tol, const ShootingOptions& options) {
  problem.validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::Domain, "tolerance must be positive");
  std::vector<RadialEigenResult> found;
  if (count <= 0) return found;

  double lo = 0.0;
  if (problem.inner.is_neumann() && problem.outer.is_neumann()) {
    RadialEigenResult zero;
    zero.lambda = 0.0;
    zero.profile = shoot_profile(problem, 0.0, options);
    zero.zero_count = 0;
    zero.residual = 0.0;
    found.push_back(std::move(zero));
    if (count == 1) return found;
    // Step off the trivial root so the scan does not re-detect it.
    lo = 1e-9 * std::pow(std::numbers::pi / (problem.beta - problem.alpha), 2);
  }

  const double lambda_max =
      options.lambda_max > 0.0 ? options.lambda_max : default_lambda_max(problem, count);
  const double base_step = std::pow(std::numbers::pi / (problem.beta - problem.alpha), 2) / 8.0;
  const double min_step = base_step * 1e-9;

  ShootResult left = shoot(problem, lo, options);
  double step = base_step;
  while (static_cast<int>(found.size()) < count) {
    if (lo > lambda_max) {
      throw Error(ErrorKind::SearchExhausted,
                  "no eigenvalue bracket below lambda_max = " + std::to_string(lambda_max));
    }
    const double hi = lo + step;
    const ShootResult right = shoot(problem, hi, options);
    const bool sign_change = (left.terminal_residual > 0.0) != (right.terminal_residual > 0.0) ||
                             right.terminal_residual == 0.0;
    const int jump = right.zero_count - left.zero_count;
    const bool suspicious = jump >= 2 || (jump >= 1 && !sign_change);
    if (suspicious && step > min_step) {
      step *= 0.5;  // possibly two roots inside; refine the scan
      continue;
    }
    if (sign_change) {
      const double root = right.terminal_residual == 0.0
                              ? hi
                              : bisect(problem, lo, hi, left.terminal_residual, tol, options);
      found.push_back(finish(problem, root, options));
    }
    lo = hi;
    left = right;
    step = base_step;
  }
  return found;
}

RadialEigenResult smallest_eigenvalue(const ShellProblem& problem, double tol,
                                      const ShootingOptions& options) {
  auto roots = lowest_eigenvalues(problem, 1, tol, options);
  RadialEigenResult& first = roots.front();
  if (first.zero_count != 0) {
    throw Error(ErrorKind::Consistency,
                "first radial root has " + std::to_string(first.zero_count) + " interior zeros");
  }
  return std::move(first);
}

namespace {

ShellProblem sweep_problem(const MonotonicitySweep& sweep, double radius) {
  ShellProblem p;
  p.dim = sweep.dim;
  if (sweep.kind == RadiusSweep::OuterRadiusRN) {
    p.alpha = sweep.fixed_radius;
    p.beta = radius;
    p.inner = sweep.bc;
    p.outer = BoundaryCondition::neumann();
  } else {
    p.alpha = radius;
    p.beta = sweep.fixed_radius;
    p.inner = BoundaryCondition::neumann();
    p.outer = sweep.bc;
  }
  return p;
}

void validate_sweep(const MonotonicitySweep& sweep, std::span<const double> grid) {
  if (sweep.dim < 2) throw Error(ErrorKind::Domain, "sweep dimension must be at least 2");
  if (!(sweep.fixed_radius > 0.0)) throw Error(ErrorKind::Domain, "fixed radius must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const bool inside = sweep.kind == RadiusSweep::OuterRadiusRN
                            ? r > sweep.fixed_radius && std::isfinite(r)
                            : r > 0.0 && r < sweep.fixed_radius;
    if (!inside) throw Error(ErrorKind::Domain, "sweep radius outside the valid interval");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::Domain, "sweep grid must be strictly increasing");
    }
  }
}

void mark_monotone(const MonotonicitySweep& sweep, MonotonicityTable& table) {
  table.strictly_monotone = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const double prev = table.rows[i - 1].lambda;
    const double cur = table.rows[i].lambda;
    const bool ok = sweep.kind == RadiusSweep::OuterRadiusRN ? cur < prev : cur > prev;
    if (!ok) table.strictly_monotone = false;
  }
}

}  // namespace

MonotonicityTable monotonicity_scan(const MonotonicitySweep& sweep, std::span<const double> grid,
                                    double tol, const ShootingOptions& options) {
  validate_sweep(sweep, grid);
  MonotonicityTable table;
  table.rows.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const ShellProblem p = sweep_problem(sweep, grid[i]);
    table.rows[i] = {grid[i], smallest_eigenvalue(p, tol, options).lambda};
  });
  mark_monotone(sweep, table);
  return table;
}

MonotonicityTable monotonicity_scan_serial(const MonotonicitySweep& sweep,
                                           std::span<const double> grid, double tol,
                                           const ShootingOptions& options) {
  validate_sweep(sweep, grid);
  MonotonicityTable table;
  for (double r : grid) {
    table.rows.push_back({r, smallest_eigenvalue(sweep_problem(sweep, r), tol, options).lambda});
  }
  mark_monotone(sweep, table);
  return table;
}

MaxMinSplit maxmin_split(const ShellProblem& problem, double tol, const ShootingOptions& options) {
  problem.validate();
  if (problem.inner.is_neumann() || problem.outer.is_neumann()) {
    throw Error(ErrorKind::Domain, "max-min split needs Robin or Dirichlet on both spheres");
  }
  const MonotonicitySweep rn{problem.dim, RadiusSweep::OuterRadiusRN, problem.alpha,
                             problem.inner};
  const MonotonicitySweep nr{problem.dim, RadiusSweep::InnerRadiusNR, problem.beta,
                             problem.outer};
  auto inner_piece = [&](double d) {
    return smallest_eigenvalue(sweep_problem(rn, d), tol, options).lambda;
  };
  auto outer_piece = [&](double d) {
    return smallest_eigenvalue(sweep_problem(nr, d), tol, options).lambda;
  };

  const double width = problem.beta - problem.alpha;
  double lo = problem.alpha + 1e-4 * width;
  double hi = problem.beta - 1e-4 * width;
  const double flo = inner_piece(lo) - outer_piece(lo);
  const double fhi = inner_piece(hi) - outer_piece(hi);
  if (!(flo > 0.0) || !(fhi < 0.0)) {
    throw Error(ErrorKind::Consistency, "inner and outer eigenvalue curves do not cross");
  }
  double a = 0.0, b = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * problem.beta; ++it) {
    const double mid = 0.5 * (lo + hi);
    a = inner_piece(mid);
    b = outer_piece(mid);
    if (a == b) {
      lo = hi = mid;
      break;
    }
    if (a > b) lo = mid; else hi = mid;
  }
  MaxMinSplit out;
  out.delta_star = 0.5 * (lo + hi);
  out.lambda_rn = inner_piece(out.delta_star);
  out.lambda_nr = outer_piece(out.delta_star);
  out.value = 0.5 * (out.lambda_rn + out.lambda_nr);
  return out;
}

}  // namespace shellspec
