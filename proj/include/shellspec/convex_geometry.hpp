#pragma once

// Quermassintegrals of convex bodies in the plane and in space, matched shells,
// membership in the admissible class, and the Steiner / Alexandrov-Fenchel
// property oracles.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace shellspec {

class StarAnnularDomain;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

double unit_ball_volume(int dim);
double unit_sphere_area(int dim);
double shell_volume(int dim, double alpha, double beta);

// ---------------------------------------------------------------------------
// Planar bodies

class ConvexBody2D {
 public:
  /// Counterclockwise vertices. Throws Geometry on fewer than three vertices,
  /// a non-convex turn or a degenerate area.
  explicit ConvexBody2D(std::vector<Vec2> vertices);

  static ConvexBody2D regular_polygon(int sides, double circumradius, Vec2 center = Vec2::Zero());
  static ConvexBody2D rectangle(double width, double height, Vec2 center = Vec2::Zero());
  /// Convex hull of arbitrary points (Andrew's monotone chain).
  static ConvexBody2D hull(std::span<const Vec2> points);

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  double area() const;
  double perimeter() const;
  /// Euclidean distance from p to the body (0 inside).
  double distance(const Vec2& p) const;
  bool contains(const Vec2& p) const;
  ConvexBody2D scaled(double c) const;

 private:
  std::vector<Vec2> vertices_;
};

struct Quermass2D {
  double w0 = 0.0;  ///< area
  double w1 = 0.0;  ///< perimeter / 2
  double w2 = 0.0;  ///< pi
};

Quermass2D quermassintegrals_2d(const ConvexBody2D& body);

// ---------------------------------------------------------------------------
// Polytopes

struct PolytopeEdge {
  int a = 0, b = 0;          ///< vertex indices, a -> b as traversed by face_left
  int face_left = 0, face_right = 0;
  double length = 0.0;
  double exterior_angle = 0.0;  ///< angle between the two outward face normals
};

class ConvexBody3D {
 public:
  /// Faces list vertex indices counterclockwise seen from outside. Throws
  /// Geometry for open or non-manifold surfaces or a broken Euler count, and
  /// Convexity for a reflex edge.
  ConvexBody3D(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces);

  static ConvexBody3D cube(double side, Vec3 center = Vec3::Zero());
  static ConvexBody3D box(Vec3 lo, Vec3 hi);
  static ConvexBody3D regular_tetrahedron(double edge);
  /// Subdivided icosahedron projected on the sphere; level 4 has 2562 vertices.
  static ConvexBody3D icosphere(int level, double radius);
  /// Incremental hull; points are assumed in general position.
  static ConvexBody3D hull(std::span<const Vec3> points);

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<std::vector<int>>& faces() const noexcept { return faces_; }
  /// Derived from the face list on every call.
  std::vector<PolytopeEdge> edges() const;

  double volume() const;
  double surface_area() const;
  double distance(const Vec3& p) const;
  bool contains_strictly(const Vec3& p, double margin = 0.0) const;
  ConvexBody3D scaled(double c) const;
  Vec3 face_normal(std::size_t face) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::vector<int>> faces_;
};

/// W2 = sum over edges of length * exterior angle / 6.
double quermassintegral_top_3d(const ConvexBody3D& body);

/// (W0, W1, W2, W3) = (volume, area / 3, W2, 4 pi / 3).
std::array<double, 4> quermassintegrals_3d(const ConvexBody3D& body);

struct Sphere3D {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

using OuterBody3D = std::variant<Sphere3D, ConvexBody3D>;

// ---------------------------------------------------------------------------
// Matched shells and class membership

struct ShellSpec {
  int dim = 2;
  double alpha = 0.0;
  double beta = 0.0;  ///< may be <= alpha; such a domain is outside every class
};

/// Planar matching by perimeters: |dB_alpha| = inner, |dB_beta| = outer.
ShellSpec matched_shell_2d(double inner_perimeter, double outer_perimeter);
ShellSpec matched_shell(const ConvexBody2D& inner, double outer_perimeter);
/// Spatial matching: W2(B_alpha) = W2(inner), |dB_beta| = outer_area.
ShellSpec matched_shell(const ConvexBody3D& inner, double outer_area);

struct MembershipOptions {
  bool require_convex_2d = false;  ///< the planar class needs no convexity
  double volume_rel_tol = 1e-6;    ///< |Omega| >= |shell| (1 - tol) counts as equality
  int gap_samples = 4096;
};

struct MembershipReport {
  bool in_class = false;
  int dim = 2;
  double alpha = 0.0;
  double beta = 0.0;
  double volume_domain = 0.0;
  double volume_shell = 0.0;
  double min_gap = 0.0;
  bool convexity_ok = false;
  bool containment_ok = false;
  bool ordering_ok = false;
  bool volume_ok = false;
  std::string matched_constraint;  ///< "perimeter" (N = 2) or "W_{N-1}" (N = 3)
};

MembershipReport class_membership(const StarAnnularDomain& domain,
                                  const MembershipOptions& options = {});
MembershipReport class_membership(const ConvexBody3D& inner, const OuterBody3D& outer,
                                  const MembershipOptions& options = {});

// ---------------------------------------------------------------------------
// Property oracles

struct AlexandrovFenchelPair {
  int i = 0, j = 0;
  double ratio_j = 0.0;  ///< (W_j / |B_1|)^(1/(N-j))
  double ratio_i = 0.0;  ///< (W_i / |B_1|)^(1/(N-i))
  bool holds = false;    ///< ratio_j >= ratio_i (up to the equality tolerance)
  bool equality = false; ///< |ratio_j - ratio_i| <= 1e-9 relative
};

struct AlexandrovFenchelReport {
  int dim = 2;
  std::vector<AlexandrovFenchelPair> pairs;
  bool all_hold = true;
};

AlexandrovFenchelReport alexandrov_fenchel_check(const ConvexBody2D& body,
                                                 double equality_tol = 1e-9);
AlexandrovFenchelReport alexandrov_fenchel_check(const ConvexBody3D& body,
                                                 double equality_tol = 1e-9);

/// |dE| >= N |B_1|^(1/N) |E|^((N-1)/N).
bool isoperimetric_holds(const ConvexBody2D& body);
bool isoperimetric_holds(const ConvexBody3D& body);

struct SteinerSample {
  double delta = 0.0;
  double volume = 0.0;    ///< Monte-Carlo estimate of |E_delta|
  double std_error = 0.0;
};

struct SteinerFit {
  int dim = 2;
  std::vector<SteinerSample> samples;
  /// Estimates of W_1..W_{N-1}; W_0 and W_N are pinned to the exact volume
  /// and |B_1|.
  std::vector<double> inner_coefficients;
  std::vector<double> inner_sigma;
  /// Largest |sample - fitted polynomial| in units of its standard error.
  double max_residual_sigma = 0.0;
};

struct SteinerOptions {
  std::vector<double> deltas{0.1, 0.2, 0.3, 0.4, 0.5};
  std::int64_t samples = 1'000'000;  ///< per body, shared across all deltas
  std::uint64_t seed = 20240917;
  std::int64_t chunk = 65'536;      ///< fixed chunking keeps results thread-count independent
};

/// Rejection-sampling estimate of the parallel-body volumes and a generalized
/// least-squares fit of the Steiner polynomial.
SteinerFit steiner_monte_carlo(const ConvexBody2D& body, const SteinerOptions& options = {});
SteinerFit steiner_monte_carlo(const ConvexBody3D& body, const SteinerOptions& options = {});
SteinerFit steiner_monte_carlo_serial(const ConvexBody3D& body,
                                      const SteinerOptions& options = {});

}  // namespace shellspec
