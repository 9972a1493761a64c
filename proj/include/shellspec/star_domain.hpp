#pragma once

// Doubly-connected planar domains bounded by two loops that are star-shaped
// about a common center. Each loop is a single-valued radius function r(theta)
// measured from the center.

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

namespace shellspec {

using Vec2 = Eigen::Vector2d;

class StarLoop {
 public:
  struct Circle {
    Vec2 offset;  ///< circle center relative to the domain center
    double radius;
  };
  struct Polygon {
    std::vector<Vec2> vertices;  ///< relative to the domain center, counterclockwise
    std::vector<double> angles;  ///< unwrapped polar angles, strictly increasing
  };
  struct Sampled {
    std::vector<double> radii;  ///< at theta_k = 2 pi k / M
    Polygon polygon;
  };
  struct OffsetPolygon {
    std::vector<Vec2> vertices;  ///< convex, counterclockwise, contains the center
    double delta;
  };

  /// Piecewise-linear loop through r_k e(theta_k) on a uniform angle grid.
  static StarLoop sampled(std::vector<double> radii);
  static StarLoop circle(Vec2 offset, double radius);
  /// Any polygon star-shaped about the center (vertex angles strictly increasing).
  static StarLoop polygon(std::vector<Vec2> vertices);
  /// delta-neighborhood of a convex polygon.
  static StarLoop offset_polygon(std::vector<Vec2> convex_vertices, double delta);

  double radius(double theta) const;
  Vec2 point(double theta) const;  ///< relative to the domain center
  double perimeter() const;
  double area() const;  ///< enclosed area
  /// n points at uniform angles starting from theta = 0.
  std::vector<Vec2> polyline(int n) const;
  std::string kind_name() const;
  /// Polar angles in [0, 2 pi) of the corners of a polygon loop; empty for
  /// smooth and sampled loops.
  std::vector<double> corner_angles() const;

  const std::variant<Circle, Polygon, Sampled, OffsetPolygon>& shape() const { return shape_; }

  nlohmann::json to_json() const;
  static StarLoop from_json(const nlohmann::json& j);

 private:
  explicit StarLoop(std::variant<Circle, Polygon, Sampled, OffsetPolygon> s) : shape_(std::move(s)) {}
  std::variant<Circle, Polygon, Sampled, OffsetPolygon> shape_;
};

class StarAnnularDomain {
 public:
  /// Throws Meshing unless 0 < r_in(theta) < r_out(theta) on a dense angle grid.
  StarAnnularDomain(Vec2 center, StarLoop inner, StarLoop outer);

  const Vec2& center() const noexcept { return center_; }
  const StarLoop& inner() const noexcept { return inner_; }
  const StarLoop& outer() const noexcept { return outer_; }

  double area() const { return outer_.area() - inner_.area(); }
  /// Absolute position of the loop point at angle theta.
  Vec2 inner_point(double theta) const { return center_ + inner_.point(theta); }
  Vec2 outer_point(double theta) const { return center_ + outer_.point(theta); }
  /// Smallest radial gap r_out - r_in over `samples` angles.
  double min_radial_gap(int samples = 4096) const;
  /// Smallest Euclidean distance between the two loops, each sampled at
  /// `samples` angles.
  double min_distance(int samples = 1024) const;

  nlohmann::json to_json() const;
  static StarAnnularDomain from_json(const nlohmann::json& j);
  static StarAnnularDomain load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Vec2 center_;
  StarLoop inner_;
  StarLoop outer_;
};

/// Fixtures used across the suites.
namespace domains {

/// Outer circle radius `outer_radius` at the origin, inner circle radius
/// `inner_radius` whose center sits at (offset, 0).
StarAnnularDomain eccentric_annulus(double inner_radius, double outer_radius, double offset);
StarAnnularDomain concentric_annulus(double inner_radius, double outer_radius);
/// Disk of radius R minus the axis-aligned square of side `side` at the origin.
StarAnnularDomain disk_minus_square(double radius, double side);
/// delta-neighborhood of a convex polygon minus the polygon.
StarAnnularDomain polygon_collar(std::vector<Vec2> convex_vertices, double delta);
/// (-1,1) x (-k,k) minus the disk of radius alpha.
StarAnnularDomain rectangle_minus_disk(double k, double alpha);

}  // namespace domains

}  // namespace shellspec
