#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shellspec/error.hpp"
#include "shellspec/flow.hpp"
#include "shellspec/parallel.hpp"

namespace shellspec {

namespace {

double g(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return g(x) / (g(x) + g(1.0 - x));
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

}  // namespace

MorsePerturbation morse_perturb(const TriMesh& mesh, const BoundaryCondition& inner,
                                const BoundaryCondition& outer, const EigenSolution& solution,
                                const MorseOptions& options) {
  if (!(options.collar > 0.0)) throw Error(ErrorKind::Usage, "collar width must be positive");
  const std::size_t nv = mesh.vertices.size();
  if (static_cast<std::size_t>(solution.nodal_values.size()) != nv) {
    throw Error(ErrorKind::Usage, "solution does not match the mesh");
  }
  const Eigen::VectorXd& u = solution.nodal_values;
  const Vec2 center = mesh.domain ? mesh.domain->center() : Vec2::Zero();
  const double w = options.collar;

  std::vector<std::array<int, 2>> boundary = mesh.inner_edges;
  boundary.insert(boundary.end(), mesh.outer_edges.begin(), mesh.outer_edges.end());

  MorsePerturbation out;
  out.tilt = options.tilt;
  out.collar = w;
  out.cutoff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  parallel_for_static(nv, [&](std::size_t v) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& e : boundary) {
      d = std::min(d, segment_distance(mesh.vertices[v], mesh.vertices[e[0]], mesh.vertices[e[1]]));
    }
    out.cutoff[static_cast<Eigen::Index>(v)] = smooth_step((d - w) / w);
  });

  Eigen::VectorXd wvec(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) {
    wvec[static_cast<Eigen::Index>(v)] =
        out.cutoff[static_cast<Eigen::Index>(v)] * options.tilt.dot(mesh.vertices[v] - center);
  }
  out.perturbed = u + wvec;

  // The cutoff must vary only where grad u stays clear of zero.
  const std::vector<Vec2> gu = gradient_field(mesh, u);
  const std::vector<Vec2> gw = gradient_field(mesh, wvec);
  out.min_gradient_on_support = std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (const Vec2& g : gu) gmax = std::max(gmax, g.norm());
  for (std::size_t v = 0; v < nv; ++v) {
    const double phi = out.cutoff[static_cast<Eigen::Index>(v)];
    if (phi > 0.0 && phi < 1.0) {
      out.min_gradient_on_support = std::min(out.min_gradient_on_support, gu[v].norm());
      out.max_tilt_gradient = std::max(out.max_tilt_gradient, gw[v].norm());
    }
  }
  if (!(out.min_gradient_on_support > 1e-3 * gmax)) {
    throw Error(ErrorKind::Precondition,
                "collar meets the critical set: min |grad u| = " +
                    std::to_string(out.min_gradient_on_support) + " against max " +
                    std::to_string(gmax));
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (out.cutoff[static_cast<Eigen::Index>(v)] > 0.0 && !(out.perturbed[static_cast<Eigen::Index>(v)] > 0.0)) {
      throw Error(ErrorKind::Precondition, "perturbed function is not positive on the support");
    }
  }

  const Assembly sys = assemble(mesh, inner, outer);
  Eigen::VectorXd wd = Eigen::VectorXd::Zero(sys.n_dofs);
  for (std::size_t v = 0; v < nv; ++v) {
    if (sys.dof_map[v] >= 0) wd[sys.dof_map[v]] = wvec[static_cast<Eigen::Index>(v)];
  }
  const Eigen::VectorXd kw = sys.K * wd;
  const Eigen::VectorXd lumped = sys.M * Eigen::VectorXd::Ones(sys.n_dofs);
  out.potential = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) {
    const int d = sys.dof_map[v];
    if (d < 0 || (kw[d] == 0.0 && wd[d] == 0.0)) continue;
    const double un = out.perturbed[static_cast<Eigen::Index>(v)];
    out.potential[static_cast<Eigen::Index>(v)] = (solution.lambda * wd[d] - kw[d] / lumped[d]) / un;
  }
  out.sup_norm = out.potential.cwiseAbs().maxCoeff();
  return out;
}

std::vector<CriticalPoint2D> critical_points(const TriMesh& mesh, const Eigen::VectorXd& f) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<char> on_boundary(nv, 0);
  for (const auto& e : mesh.inner_edges) on_boundary[e[0]] = on_boundary[e[1]] = 1;
  for (const auto& e : mesh.outer_edges) on_boundary[e[0]] = on_boundary[e[1]] = 1;
  std::vector<std::vector<std::pair<int, int>>> wedges(nv);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) wedges[t[k]].emplace_back(t[(k + 1) % 3], t[(k + 2) % 3]);
  }

  auto lower = [&](int n, int v) { return f[n] < f[v] || (f[n] == f[v] && n < v); };

  std::vector<CriticalPoint2D> out;
  for (std::size_t vi = 0; vi < nv; ++vi) {
    if (on_boundary[vi] || wedges[vi].empty()) continue;
    const int v = static_cast<int>(vi);
    std::map<int, int> next;
    for (const auto& [a, b] : wedges[vi]) next[a] = b;
    std::vector<int> ring{wedges[vi].front().first};
    int cur = next[ring.front()];
    while (cur != ring.front() && ring.size() <= wedges[vi].size()) {
      ring.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
    }
    if (ring.size() != wedges[vi].size()) continue;
    int changes = 0, lowers = 0;
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const bool a = lower(ring[k], v), b = lower(ring[(k + 1) % ring.size()], v);
      changes += a != b;
      lowers += a;
    }
    CriticalPoint2D cp;
    cp.vertex = v;
    cp.point = mesh.vertices[vi];
    if (changes == 0) {
      cp.type = lowers == 0 ? CriticalType::Minimum : CriticalType::Maximum;
    } else if (changes >= 4) {
      cp.type = CriticalType::Saddle;
      cp.multiplicity = changes / 2 - 1;
    } else {
      continue;
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace shellspec
