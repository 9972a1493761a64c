#pragma once

// P1 triangulations of star-annular domains: structured transfinite meshes,
// red refinement with boundary projection, quality metrics and point location.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "shellspec/star_domain.hpp"

namespace shellspec {

enum class BoundaryTag { Inner, Outer };

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
  /// Boundary edges in increasing-angle order along each loop.
  std::vector<std::array<int, 2>> inner_edges;
  std::vector<std::array<int, 2>> outer_edges;
  /// Polar angle about the domain center for boundary vertices, NaN elsewhere.
  /// Drives projection onto the exact curves during refinement.
  std::vector<double> boundary_theta;
  /// Attached exact geometry; absent for meshes read from plain JSON.
  std::shared_ptr<const StarAnnularDomain> domain;

  const std::vector<std::array<int, 2>>& edges(BoundaryTag tag) const {
    return tag == BoundaryTag::Inner ? inner_edges : outer_edges;
  }
  double area() const;
  double boundary_length(BoundaryTag tag) const;
  double max_edge_length() const;
  double triangle_area(std::size_t t) const;
  /// Vertex indices of the boundary loop in edge order; throws Meshing if the
  /// tagged edges do not close into exactly one loop.
  std::vector<int> boundary_loop(BoundaryTag tag) const;
  std::vector<Vec2> boundary_polygon(BoundaryTag tag) const;

  nlohmann::json to_json() const;
  static TriMesh from_json(const nlohmann::json& j);
  static TriMesh load(const std::string& path);
  void save(const std::string& path) const;
};

struct MeshOptions {
  /// Ratio between the middle and the boundary radial cell widths; values
  /// above 1 cluster layers toward both loops.
  double grading = 1.0;
  /// Layers in geometric progression along each ray, so cells stay close to
  /// square when the outer loop is far from the inner one. Overrides grading.
  bool geometric = false;
};

/// 2 * n_theta * n_r triangles, each quad split along its shorter diagonal.
TriMesh build_transfinite_mesh(const StarAnnularDomain& domain, int n_theta, int n_r,
                               const MeshOptions& options = {});

/// Red refinement; boundary midpoints are projected when a domain is attached.
TriMesh refine(const TriMesh& mesh);

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;  ///< longest edge / (2 sqrt 3 inradius); 1 for equilateral
  bool orientation_ok = true;
};

MeshQuality mesh_quality(const TriMesh& mesh);

/// Uniform bucket grid over the triangles.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);

  struct Hit {
    int triangle = -1;
    Eigen::Vector3d bary;  ///< barycentric coordinates, clamped to the triangle
    bool inside = false;
  };

  /// Containing triangle, or the nearest triangle among nearby buckets with
  /// clamped coordinates. Empty when p is far from the mesh.
  std::optional<Hit> locate(const Vec2& p) const;
  /// P1 interpolation of a nodal field; nullopt when p cannot be located.
  std::optional<double> interpolate(const Eigen::VectorXd& values, const Vec2& p) const;

 private:
  const TriMesh* mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;

  Eigen::Vector3d barycentric(int t, const Vec2& p) const;
};

}  // namespace shellspec
