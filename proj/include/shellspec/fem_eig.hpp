#pragma once

// P1 finite elements for the first Robin/Neumann/Dirichlet eigenpair of the
// Laplacian (optionally with a potential) on a triangulated annular domain.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "shellspec/boundary_condition.hpp"
#include "shellspec/mesh.hpp"

namespace shellspec {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Assembly {
  SparseMatrix K;             ///< stiffness + Robin edge mass + weighted potential mass
  SparseMatrix M;             ///< consistent mass
  std::vector<int> dof_map;   ///< vertex -> dof, -1 for eliminated Dirichlet vertices
  int n_dofs = 0;
};

/// `potential` is a nodal vector over all mesh vertices. Throws
/// DegenerateProblem when Dirichlet elimination leaves no unknowns.
Assembly assemble(const TriMesh& mesh, const BoundaryCondition& inner,
                  const BoundaryCondition& outer, const Eigen::VectorXd* potential = nullptr);
/// Serial reference for assemble; produces identical matrices.
Assembly assemble_serial(const TriMesh& mesh, const BoundaryCondition& inner,
                         const BoundaryCondition& outer,
                         const Eigen::VectorXd* potential = nullptr);

struct EigenOptions {
  double tol = 1e-10;
  int max_iterations = 2000;
};

struct EigenSolution {
  double lambda = 0.0;
  Eigen::VectorXd nodal_values;  ///< over all vertices; max = 1, Dirichlet vertices 0
  double residual = 0.0;         ///< ||K x - lambda M x|| / ||M x||
  int iterations = 0;
  double shift = 0.0;            ///< final shift used by the iteration
};

/// Shift-invert inverse iteration from the all-ones vector. The first phase
/// uses shift 0 (a small negative shift when K is singular); once the
/// Rayleigh quotient settles, one refactorization just below it finishes the
/// vector.
EigenSolution smallest_eigenpair(const Assembly& system, const EigenOptions& options = {});

/// Assemble and solve in one call.
EigenSolution solve_first(const TriMesh& mesh, const BoundaryCondition& inner,
                          const BoundaryCondition& outer,
                          const Eigen::VectorXd* potential = nullptr,
                          const EigenOptions& options = {});

/// Rayleigh quotient x^T K x / x^T M x of a full nodal vector.
double rayleigh_quotient(const Assembly& system, const Eigen::VectorXd& nodal);

struct RichardsonLevel {
  int triangles = 0;
  double h = 0.0;
  double lambda = 0.0;
};

struct RichardsonResult {
  std::vector<RichardsonLevel> levels;
  double lambda = 0.0;     ///< extrapolated
  double error_bar = 0.0;  ///< |lambda_finest - lambda|
  double order = 0.0;      ///< fitted p; NaN when the last two levels agree exactly
  bool reliable = true;
  std::string warning;
  TriMesh finest_mesh;
  EigenSolution finest;
};

/// Potential given as a function of position, resampled on every level.
using PotentialFn = std::function<double(const Vec2&)>;

/// P1 interpolant of a nodal field on `mesh`, zero off the mesh. Holds its
/// own copies, so the result outlives the arguments.
PotentialFn nodal_potential(const TriMesh& mesh, const Eigen::VectorXd& values);

/// Solves on `levels` nested red refinements of `coarse` and fits
/// lambda_h = lambda + C h^p through the last three.
RichardsonResult richardson_estimate(const TriMesh& coarse, const BoundaryCondition& inner,
                                     const BoundaryCondition& outer, int levels,
                                     const EigenOptions& options = {},
                                     const PotentialFn& potential = {});

}  // namespace shellspec
