#pragma once

// Rectangle-minus-disk domains whose Dirichlet eigenvalue exceeds that of the
// perimeter-matched shell once the rectangle is long enough.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shellspec/boundary_condition.hpp"
#include "shellspec/fem_eig.hpp"

namespace shellspec {

struct CounterexampleRow {
  double k = 0.0;
  double beta = 0.0;           ///< (4 + 4k) / (2 pi)
  double lambda_domain = 0.0;  ///< Richardson-extrapolated FEM value
  double error_bar = 0.0;
  double order = 0.0;
  double lambda_shell = 0.0;
  double lambda_rect = 0.0;    ///< (pi^2 / 4)(1 + 1 / k^2)
  bool reversed = false;       ///< lambda_domain - error_bar > lambda_shell
  double max_aspect = 0.0;     ///< of the coarse mesh
  std::string flag;            ///< non-empty when the FEM path failed for this row
};

struct CounterexampleOptions {
  int base_theta = 16;  ///< n_theta = base_theta * ceil(k) rounded up to a multiple of 8
  int n_r = 8;          ///< lower bound; raised so radial steps stay within four angular steps
  int levels = 3;
  BoundaryCondition bc = BoundaryCondition::dirichlet();  ///< same on both loops
  EigenOptions eigen;
};

std::vector<CounterexampleRow> counterexample_scan(double alpha, std::span<const double> k_values,
                                                   const CounterexampleOptions& options = {});

/// First k whose row is reversed.
std::optional<double> first_reversed(const std::vector<CounterexampleRow>& rows);

}  // namespace shellspec
