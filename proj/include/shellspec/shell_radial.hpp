#pragma once

// First eigenvalue of the Laplacian on the concentric shell B_beta \ B_alpha in
// R^N by shooting on the radial reduction u'' + (N-1)/r u' + lambda u = 0.

#include <span>
#include <vector>

#include "shellspec/boundary_condition.hpp"

namespace shellspec {

struct ShellProblem {
  int dim = 2;
  double alpha = 1.0;
  double beta = 2.0;
  BoundaryCondition inner = BoundaryCondition::dirichlet();
  BoundaryCondition outer = BoundaryCondition::dirichlet();

  /// Throws Domain unless dim >= 2 and 0 < alpha < beta.
  void validate() const;
};

struct ShootingOptions {
  int steps = 4096;          ///< fixed RK4 steps across [alpha, beta]
  double lambda_max = 0.0;   ///< search ceiling; 0 picks a bound from the geometry
};

struct ShootResult {
  double terminal_residual = 0.0;  ///< outer boundary functional at r = beta
  int zero_count = 0;              ///< sign changes of u on the open interval
};

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
};

struct RadialEigenResult {
  double lambda = 0.0;
  RadialProfile profile;
  int zero_count = 0;
  double residual = 0.0;  ///< |terminal functional| / max|u|
};

ShootResult shoot(const ShellProblem& problem, double lambda, const ShootingOptions& options = {});

/// Same integration, keeping the sampled profile (steps + 1 points).
RadialProfile shoot_profile(const ShellProblem& problem, double lambda,
                            const ShootingOptions& options = {});

/// Smallest eigenvalue, bisected to relative bracket width `tol`. The
/// Neumann/Neumann shell returns exactly 0 with a constant profile.
RadialEigenResult smallest_eigenvalue(const ShellProblem& problem, double tol,
                                      const ShootingOptions& options = {});

/// The first `count` eigenvalues in increasing order. The k-th entry carries
/// zero_count == k when the Sturm ordering is intact.
std::vector<RadialEigenResult> lowest_eigenvalues(const ShellProblem& problem, int count,
                                                  double tol,
                                                  const ShootingOptions& options = {});

// ---------------------------------------------------------------------------
// Radius sweeps

enum class RadiusSweep {
  OuterRadiusRN,  ///< lambda_1 of B_r \ B_fixed, condition on inner, Neumann at r
  InnerRadiusNR,  ///< lambda_1 of B_fixed \ B_r, Neumann at r, condition on outer
};

struct MonotonicitySweep {
  int dim = 2;
  RadiusSweep kind = RadiusSweep::OuterRadiusRN;
  double fixed_radius = 1.0;
  BoundaryCondition bc = BoundaryCondition::robin(1.0);
};

struct MonotonicityRow {
  double radius = 0.0;
  double lambda = 0.0;
};

struct MonotonicityTable {
  std::vector<MonotonicityRow> rows;
  /// Decreasing for OuterRadiusRN, increasing for InnerRadiusNR. Always true
  /// for tables with fewer than two rows.
  bool strictly_monotone = true;
};

MonotonicityTable monotonicity_scan(const MonotonicitySweep& sweep, std::span<const double> grid,
                                    double tol, const ShootingOptions& options = {});

/// Serial reference for monotonicity_scan.
MonotonicityTable monotonicity_scan_serial(const MonotonicitySweep& sweep,
                                           std::span<const double> grid, double tol,
                                           const ShootingOptions& options = {});

struct MaxMinSplit {
  double delta_star = 0.0;
  double value = 0.0;      ///< common value of the two curves at delta_star
  double lambda_rn = 0.0;  ///< inner piece, Neumann at delta_star
  double lambda_nr = 0.0;  ///< outer piece, Neumann at delta_star
};

/// Splits the shell at the radius where the decreasing inner-piece curve
/// crosses the increasing outer-piece curve. Both conditions must be Robin or
/// Dirichlet.
MaxMinSplit maxmin_split(const ShellProblem& problem, double tol,
                         const ShootingOptions& options = {});

}  // namespace shellspec
