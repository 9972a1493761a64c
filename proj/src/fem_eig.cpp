#include "shellspec/fem_eig.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/SparseCholesky>

#include "shellspec/error.hpp"
#include "shellspec/parallel.hpp"

namespace shellspec {

namespace {

using Triplet = Eigen::Triplet<double>;

struct Slot {
  int row = -1, col = -1;
  double k = 0.0, m = 0.0;
};

template <bool Parallel>
Assembly assemble_impl(const TriMesh& mesh, const BoundaryCondition& inner,
                       const BoundaryCondition& outer, const Eigen::VectorXd* potential) {
  const std::size_t nv = mesh.vertices.size();
  if (potential != nullptr && static_cast<std::size_t>(potential->size()) != nv) {
    throw Error(ErrorKind::Usage, "potential must have one value per vertex");
  }
  Assembly out;
  out.dof_map.assign(nv, 0);
  auto eliminate = [&](BoundaryTag tag, const BoundaryCondition& bc) {
    if (!bc.is_dirichlet()) return;
    for (const auto& e : mesh.edges(tag)) out.dof_map[e[0]] = out.dof_map[e[1]] = -1;
  };
  eliminate(BoundaryTag::Inner, inner);
  eliminate(BoundaryTag::Outer, outer);
  int n = 0;
  for (auto& d : out.dof_map) d = d < 0 ? -1 : n++;
  if (n == 0) throw Error(ErrorKind::DegenerateProblem, "no unknowns left after Dirichlet elimination");
  out.n_dofs = n;

  // Fixed slots per element keep the triplet order, and hence the summation
  // order, independent of the thread count.
  const std::size_t nt = mesh.triangles.size();
  std::vector<Slot> slots(9 * nt);
  auto element = [&](std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri[0]];
    const Vec2& p1 = mesh.vertices[tri[1]];
    const Vec2& p2 = mesh.vertices[tri[2]];
    const double area = 0.5 * ((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
    const Vec2 q[3] = {p0, p1, p2};
    Vec2 g[3];
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = q[(i + 1) % 3];
      const Vec2& b = q[(i + 2) % 3];
      g[i] = Vec2(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
    }
    double v[3] = {0.0, 0.0, 0.0};
    if (potential != nullptr) {
      for (int i = 0; i < 3; ++i) v[i] = (*potential)[tri[i]];
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Slot& s = slots[9 * t + 3 * i + j];
        s.row = out.dof_map[tri[i]];
        s.col = out.dof_map[tri[j]];
        if (s.row < 0 || s.col < 0) continue;
        s.k = area * g[i].dot(g[j]);
        s.m = area / 12.0 * (i == j ? 2.0 : 1.0);
        if (potential != nullptr) {
          // Exact integral of (sum_k V_k phi_k) phi_i phi_j.
          const int k = 3 - i - j;
          s.k += i == j ? area * (v[i] / 10.0 + (v[(i + 1) % 3] + v[(i + 2) % 3]) / 30.0)
                        : area * ((v[i] + v[j]) / 30.0 + v[k] / 60.0);
        }
      }
    }
  };
  if constexpr (Parallel) {
    parallel_for_static(nt, element);
  } else {
    for (std::size_t t = 0; t < nt; ++t) element(t);
  }

  std::vector<Triplet> kt, mt;
  kt.reserve(slots.size() + 4 * (mesh.inner_edges.size() + mesh.outer_edges.size()));
  mt.reserve(slots.size());
  for (const auto& s : slots) {
    if (s.row < 0 || s.col < 0) continue;
    kt.emplace_back(s.row, s.col, s.k);
    mt.emplace_back(s.row, s.col, s.m);
  }
  auto robin = [&](BoundaryTag tag, const BoundaryCondition& bc) {
    if (!bc.is_robin()) return;
    for (const auto& e : mesh.edges(tag)) {
      const double w = bc.h() * (mesh.vertices[e[1]] - mesh.vertices[e[0]]).norm() / 6.0;
      const int a = out.dof_map[e[0]], b = out.dof_map[e[1]];
      kt.emplace_back(a, a, 2.0 * w);
      kt.emplace_back(b, b, 2.0 * w);
      kt.emplace_back(a, b, w);
      kt.emplace_back(b, a, w);
    }
  };
  robin(BoundaryTag::Inner, inner);
  robin(BoundaryTag::Outer, outer);

  out.K.resize(n, n);
  out.M.resize(n, n);
  out.K.setFromTriplets(kt.begin(), kt.end());
  out.M.setFromTriplets(mt.begin(), mt.end());
  return out;
}

using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

// True when K - shift M factors with a strictly positive diagonal.
bool factor_positive(Factor& f, const Assembly& s, double shift) {
  const SparseMatrix a = s.K - shift * s.M;
  f.compute(a);
  if (f.info() != Eigen::Success) return false;
  const Eigen::VectorXd d = f.vectorD();
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  return d.minCoeff() > 1e-13 * scale;
}

Eigen::VectorXd expand(const Assembly& s, const Eigen::VectorXd& x) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.dof_map.size()));
  for (std::size_t v = 0; v < s.dof_map.size(); ++v) {
    if (s.dof_map[v] >= 0) full[static_cast<Eigen::Index>(v)] = x[s.dof_map[v]];
  }
  return full;
}

}  // namespace

Assembly assemble(const TriMesh& mesh, const BoundaryCondition& inner,
                  const BoundaryCondition& outer, const Eigen::VectorXd* potential) {
  return assemble_impl<true>(mesh, inner, outer, potential);
}

Assembly assemble_serial(const TriMesh& mesh, const BoundaryCondition& inner,
                         const BoundaryCondition& outer, const Eigen::VectorXd* potential) {
  return assemble_impl<false>(mesh, inner, outer, potential);
}

double rayleigh_quotient(const Assembly& system, const Eigen::VectorXd& nodal) {
  Eigen::VectorXd x(system.n_dofs);
  for (std::size_t v = 0; v < system.dof_map.size(); ++v) {
    if (system.dof_map[v] >= 0) x[system.dof_map[v]] = nodal[static_cast<Eigen::Index>(v)];
  }
  return x.dot(system.K * x) / x.dot(system.M * x);
}

EigenSolution smallest_eigenpair(const Assembly& system, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::Usage, "tolerance must be positive");
  const SparseMatrix& K = system.K;
  const SparseMatrix& M = system.M;
  const double scale = K.diagonal().cwiseAbs().mean() / M.diagonal().mean();

  Factor factor;
  double shift = 0.0;
  if (!factor_positive(factor, system, shift)) {
    bool ok = false;
    for (double c = 1e-6; c <= 1e-1 && !ok; c *= 100.0) {
      shift = -c * scale;
      ok = factor_positive(factor, system, shift);
    }
    if (!ok) throw Error(ErrorKind::Singularity, "K - shift M could not be factored");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Ones(system.n_dofs);
  x /= std::sqrt(x.dot(M * x));
  double lambda = x.dot(K * x);
  double residual = std::numeric_limits<double>::infinity();
  bool refined_shift = false;
  EigenSolution sol;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Eigen::VectorXd y = factor.solve(M * x);
    if (factor.info() != Eigen::Success || !y.allFinite()) {
      throw Error(ErrorKind::Singularity, "solve failed during inverse iteration");
    }
    x = y / std::sqrt(y.dot(M * y));
    const double prev = lambda;
    const Eigen::VectorXd kx = K * x;
    const Eigen::VectorXd mx = M * x;
    lambda = x.dot(kx);
    residual = (kx - lambda * mx).norm() / mx.norm();
    const double change = std::abs(lambda - prev);
    const double ref = std::max(std::abs(lambda), 1e-6 * scale);
    if (change <= options.tol * ref && residual < 10.0 * options.tol) break;
    // Once the Rayleigh quotient has settled, move the shift just below it.
    if (!refined_shift && change <= 1e-6 * ref && std::abs(lambda) > 1e-8 * scale) {
      refined_shift = true;
      const double candidate = lambda - 1e-3 * std::abs(lambda);
      if (factor_positive(factor, system, candidate)) {
        shift = candidate;
      } else {
        factor_positive(factor, system, shift);
      }
    }
  }
  if (it == options.max_iterations) {
    throw Error(ErrorKind::Consistency, "inverse iteration did not converge (residual " +
                                            std::to_string(residual) + ")");
  }

  Eigen::VectorXd full = expand(system, x);
  if (full.sum() < 0.0) full = -full;
  full /= full.maxCoeff();
  sol.nodal_values = std::move(full);
  sol.lambda = lambda;
  sol.residual = residual;
  sol.iterations = it + 1;
  sol.shift = shift;
  return sol;
}

EigenSolution solve_first(const TriMesh& mesh, const BoundaryCondition& inner,
                          const BoundaryCondition& outer, const Eigen::VectorXd* potential,
                          const EigenOptions& options) {
  return smallest_eigenpair(assemble(mesh, inner, outer, potential), options);
}

PotentialFn nodal_potential(const TriMesh& mesh, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != mesh.vertices.size()) {
    throw Error(ErrorKind::Usage, "potential does not match the mesh");
  }
  auto owned = std::make_shared<const TriMesh>(mesh);
  auto locator = std::make_shared<const PointLocator>(*owned);
  return [owned, locator, values](const Vec2& p) {
    return locator->interpolate(values, p).value_or(0.0);
  };
}

RichardsonResult richardson_estimate(const TriMesh& coarse, const BoundaryCondition& inner,
                                     const BoundaryCondition& outer, int levels,
                                     const EigenOptions& options, const PotentialFn& potential) {
  if (levels < 3) throw Error(ErrorKind::Usage, "Richardson extrapolation needs three levels");
  std::vector<TriMesh> meshes{coarse};
  for (int l = 1; l < levels; ++l) meshes.push_back(refine(meshes.back()));

  std::vector<EigenSolution> sols(levels);
  parallel_for(static_cast<std::size_t>(levels), [&](std::size_t l) {
    const TriMesh& m = meshes[l];
    if (potential) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(m.vertices.size()));
      for (std::size_t i = 0; i < m.vertices.size(); ++i) v[static_cast<Eigen::Index>(i)] = potential(m.vertices[i]);
      sols[l] = solve_first(m, inner, outer, &v, options);
    } else {
      sols[l] = solve_first(m, inner, outer, nullptr, options);
    }
  });

  RichardsonResult r;
  for (int l = 0; l < levels; ++l) {
    r.levels.push_back({static_cast<int>(meshes[l].triangles.size()), meshes[l].max_edge_length(),
                        sols[l].lambda});
  }
  const auto& a = r.levels[levels - 3];
  const auto& b = r.levels[levels - 2];
  const auto& c = r.levels[levels - 1];
  const double d1 = a.lambda - b.lambda;
  const double d2 = b.lambda - c.lambda;
  const double ratio = b.h / c.h;
  r.lambda = c.lambda;
  if (d2 == 0.0) {
    r.order = std::numeric_limits<double>::quiet_NaN();
    r.error_bar = std::abs(d1);
    if (d1 != 0.0) {
      r.reliable = false;
      r.warning = "finest levels agree exactly but coarser levels differ";
    }
  } else if (d1 / d2 <= 1.0) {
    // Non-monotone or non-contracting differences: no reliable order.
    r.order = std::numeric_limits<double>::quiet_NaN();
    r.error_bar = std::abs(d2);
    r.reliable = false;
    r.warning = "eigenvalue sequence is not monotonically converging; extrapolation unreliable";
  } else {
    r.order = std::log(d1 / d2) / std::log(ratio);
    r.lambda = c.lambda - d2 / (std::pow(ratio, r.order) - 1.0);
    r.error_bar = std::abs(c.lambda - r.lambda);
  }
  for (int l = 1; l + 1 < levels; ++l) {
    const double s0 = r.levels[l - 1].lambda - r.levels[l].lambda;
    const double s1 = r.levels[l].lambda - r.levels[l + 1].lambda;
    if (s0 * s1 < 0.0) {
      r.reliable = false;
      r.warning = "eigenvalue sequence is not monotone; extrapolation unreliable";
    }
  }
  r.finest_mesh = std::move(meshes.back());
  r.finest = std::move(sols.back());
  return r;
}

}  // namespace shellspec
