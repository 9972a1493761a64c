#include "shellspec/convex_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "shellspec/error.hpp"
#include "shellspec/parallel.hpp"
#include "shellspec/star_domain.hpp"

namespace shellspec {

namespace {

constexpr double kPi = std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Newell normal scaled by twice the face area.
Vec3 newell(const std::vector<Vec3>& v, const std::vector<int>& face) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < face.size(); ++i) {
    const Vec3& a = v[face[i]];
    const Vec3& b = v[face[(i + 1) % face.size()]];
    n += a.cross(b);
  }
  return n;
}

// Orients every face so its normal points away from the vertex centroid.
std::vector<std::vector<int>> orient_outward(const std::vector<Vec3>& v,
                                             std::vector<std::vector<int>> faces) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : v) c += p;
  c /= static_cast<double>(v.size());
  for (auto& f : faces) {
    if (newell(v, f).dot(v[f[0]] - c) < 0.0) std::reverse(f.begin(), f.end());
  }
  return faces;
}

}  // namespace

double unit_ball_volume(int dim) {
  return std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

double shell_volume(int dim, double alpha, double beta) {
  return unit_ball_volume(dim) * (std::pow(beta, dim) - std::pow(alpha, dim));
}

// ---------------------------------------------------------------------------

ConvexBody2D::ConvexBody2D(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw Error(ErrorKind::Geometry, "polygon needs at least three vertices");
  Vec2 lo = vertices_[0], hi = vertices_[0];
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw Error(ErrorKind::Geometry, "non-finite vertex");
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double scale2 = (hi - lo).squaredNorm();
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    const double c = cross2(e0, e1);
    if (c < -1e-12 * scale2) throw Error(ErrorKind::Geometry, "polygon is not convex");
    turning += std::atan2(c, e0.dot(e1));
  }
  if (std::abs(turning - 2.0 * kPi) > 1e-6) {
    throw Error(ErrorKind::Geometry, "polygon is not simple");
  }
  if (!(area() > 1e-15 * scale2)) throw Error(ErrorKind::Geometry, "polygon has no area");
}

ConvexBody2D ConvexBody2D::regular_polygon(int sides, double circumradius, Vec2 center) {
  if (sides < 3 || !(circumradius > 0.0)) throw Error(ErrorKind::Geometry, "bad regular polygon");
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * kPi * k / sides;
    v.push_back(center + circumradius * Vec2(std::cos(t), std::sin(t)));
  }
  return ConvexBody2D(std::move(v));
}

ConvexBody2D ConvexBody2D::rectangle(double width, double height, Vec2 center) {
  const double w = 0.5 * width, h = 0.5 * height;
  return ConvexBody2D({center + Vec2(-w, -h), center + Vec2(w, -h), center + Vec2(w, h),
                       center + Vec2(-w, h)});
}

ConvexBody2D ConvexBody2D::hull(std::span<const Vec2> points) {
  std::vector<Vec2> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (p.size() < 3) throw Error(ErrorKind::Geometry, "hull needs at least three points");
  std::vector<Vec2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross2(h[k - 1] - h[k - 2], p[i - 1] - h[k - 2]) <= 0.0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return ConvexBody2D(std::move(h));
}

double ConvexBody2D::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    a += cross2(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * a;
}

double ConvexBody2D::perimeter() const {
  double p = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    p += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
  }
  return p;
}

bool ConvexBody2D::contains(const Vec2& p) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross2(vertices_[(i + 1) % n] - vertices_[i], p - vertices_[i]) < 0.0) return false;
  }
  return true;
}

double ConvexBody2D::distance(const Vec2& p) const {
  if (contains(p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

ConvexBody2D ConvexBody2D::scaled(double c) const {
  std::vector<Vec2> v = vertices_;
  for (auto& p : v) p *= c;
  return ConvexBody2D(std::move(v));
}

Quermass2D quermassintegrals_2d(const ConvexBody2D& body) {
  return {body.area(), 0.5 * body.perimeter(), kPi};
}

// ---------------------------------------------------------------------------

ConvexBody3D::ConvexBody3D(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = static_cast<int>(vertices_.size());
  if (nv < 4 || faces_.size() < 4) throw Error(ErrorKind::Geometry, "polytope is too small");
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    if (face.size() < 3) throw Error(ErrorKind::Geometry, "face with fewer than three vertices");
    for (std::size_t i = 0; i < face.size(); ++i) {
      const int a = face[i], b = face[(i + 1) % face.size()];
      if (a < 0 || a >= nv || a == b) throw Error(ErrorKind::Geometry, "bad face index");
      if (!directed.emplace(std::make_pair(a, b), static_cast<int>(f)).second) {
        throw Error(ErrorKind::Geometry, "edge traversed twice in one direction");
      }
    }
  }
  for (const auto& [e, f] : directed) {
    if (!directed.contains({e.second, e.first})) {
      throw Error(ErrorKind::Geometry, "surface is open or non-manifold");
    }
  }
  const long edges = static_cast<long>(directed.size() / 2);
  if (nv - edges + static_cast<long>(faces_.size()) != 2) {
    throw Error(ErrorKind::Geometry, "Euler characteristic is not 2");
  }
  Vec3 lo = vertices_[0], hi = vertices_[0];
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double scale = (hi - lo).norm();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Vec3 n = newell(vertices_, faces_[f]);
    if (!(n.norm() > 1e-14 * scale * scale)) throw Error(ErrorKind::Geometry, "degenerate face");
    const Vec3 u = n.normalized();
    const Vec3& p0 = vertices_[faces_[f][0]];
    for (const auto& v : vertices_) {
      if (u.dot(v - p0) > 1e-9 * scale) {
        throw Error(ErrorKind::Convexity, "vertex lies outside a face plane");
      }
    }
  }
  if (!(volume() > 0.0)) throw Error(ErrorKind::Geometry, "faces are oriented inward");
}

ConvexBody3D ConvexBody3D::box(Vec3 lo, Vec3 hi) {
  std::vector<Vec3> v;
  for (int k = 0; k < 8; ++k) {
    v.emplace_back(k & 1 ? hi.x() : lo.x(), k & 2 ? hi.y() : lo.y(), k & 4 ? hi.z() : lo.z());
  }
  std::vector<std::vector<int>> f{{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                  {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  return ConvexBody3D(v, orient_outward(v, std::move(f)));
}

ConvexBody3D ConvexBody3D::cube(double side, Vec3 center) {
  const Vec3 h = Vec3::Constant(0.5 * side);
  return box(center - h, center + h);
}

ConvexBody3D ConvexBody3D::regular_tetrahedron(double edge) {
  const double s = edge / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> v{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<std::vector<int>> f{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return ConvexBody3D(v, orient_outward(v, std::move(f)));
}

ConvexBody3D ConvexBody3D::icosphere(int level, double radius) {
  const double t = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::vector<int>> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::vector<int>> next;
    next.reserve(4 * f.size());
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]),
                c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return ConvexBody3D(v, orient_outward(v, std::move(f)));
}

ConvexBody3D ConvexBody3D::hull(std::span<const Vec3> points) {
  const std::vector<Vec3> p(points.begin(), points.end());
  const int n = static_cast<int>(p.size());
  if (n < 4) throw Error(ErrorKind::Geometry, "hull needs at least four points");
  Vec3 lo = p[0], hi = p[0];
  for (const auto& q : p) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const double eps = 1e-12 * (hi - lo).norm();

  // Initial tetrahedron from extreme, non-degenerate points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n; ++i) {
    if ((p[i] - p[i0]).norm() > eps) { i1 = i; break; }
  }
  for (int i = 0; i1 >= 0 && i < n; ++i) {
    if ((p[i1] - p[i0]).cross(p[i] - p[i0]).norm() > eps) { i2 = i; break; }
  }
  for (int i = 0; i2 >= 0 && i < n; ++i) {
    const Vec3 nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]);
    if (std::abs(nrm.normalized().dot(p[i] - p[i0])) > eps) { i3 = i; break; }
  }
  if (i3 < 0) throw Error(ErrorKind::Geometry, "points are coplanar");

  struct Tri {
    std::array<int, 3> v;
    Vec3 n;
    double d;
    bool alive;
  };
  std::vector<Tri> tris;
  const Vec3 inside = 0.25 * (p[i0] + p[i1] + p[i2] + p[i3]);
  auto add = [&](int a, int b, int c) {
    Vec3 nrm = (p[b] - p[a]).cross(p[c] - p[a]).normalized();
    if (nrm.dot(p[a] - inside) < 0.0) {
      std::swap(b, c);
      nrm = -nrm;
    }
    tris.push_back({{a, b, c}, nrm, nrm.dot(p[a]), true});
  };
  add(i0, i1, i2);
  add(i0, i1, i3);
  add(i0, i2, i3);
  add(i1, i2, i3);

  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::map<std::pair<int, int>, int> horizon;
    bool visible_any = false;
    for (auto& t : tris) {
      if (!t.alive || t.n.dot(p[i]) - t.d <= eps) continue;
      visible_any = true;
      t.alive = false;
      for (int k = 0; k < 3; ++k) {
        const int a = t.v[k], b = t.v[(k + 1) % 3];
        if (horizon.erase({b, a}) == 0) horizon[{a, b}] = 1;
      }
    }
    if (!visible_any) continue;
    for (const auto& [e, unused] : horizon) {
      const Vec3 nrm = (p[e.second] - p[e.first]).cross(p[i] - p[e.first]).normalized();
      tris.push_back({{e.first, e.second, i}, nrm, nrm.dot(p[i]), true});
    }
  }

  std::vector<int> remap(n, -1);
  std::vector<Vec3> verts;
  std::vector<std::vector<int>> faces;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    std::vector<int> f;
    for (int k : t.v) {
      if (remap[k] < 0) {
        remap[k] = static_cast<int>(verts.size());
        verts.push_back(p[k]);
      }
      f.push_back(remap[k]);
    }
    faces.push_back(std::move(f));
  }
  return ConvexBody3D(std::move(verts), std::move(faces));
}

std::vector<PolytopeEdge> ConvexBody3D::edges() const {
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (std::size_t i = 0; i < face.size(); ++i) {
      directed[{face[i], face[(i + 1) % face.size()]}] = static_cast<int>(f);
    }
  }
  std::vector<PolytopeEdge> out;
  out.reserve(directed.size() / 2);
  for (const auto& [e, f] : directed) {
    if (e.first > e.second) continue;
    PolytopeEdge edge;
    edge.a = e.first;
    edge.b = e.second;
    edge.face_left = f;
    edge.face_right = directed.at({e.second, e.first});
    const Vec3 d = vertices_[edge.b] - vertices_[edge.a];
    edge.length = d.norm();
    const Vec3 n1 = face_normal(edge.face_left), n2 = face_normal(edge.face_right);
    const Vec3 c = n1.cross(n2);
    const double angle = std::atan2(c.norm(), n1.dot(n2));
    edge.exterior_angle = d.dot(c) >= -1e-12 * edge.length ? angle : -angle;
    out.push_back(edge);
  }
  return out;
}

double ConvexBody3D::volume() const {
  double v = 0.0;
  for (const auto& f : faces_) {
    const Vec3& a = vertices_[f[0]];
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
      v += a.dot(vertices_[f[i]].cross(vertices_[f[i + 1]]));
    }
  }
  return v / 6.0;
}

double ConvexBody3D::surface_area() const {
  double s = 0.0;
  for (const auto& f : faces_) s += 0.5 * newell(vertices_, f).norm();
  return s;
}

Vec3 ConvexBody3D::face_normal(std::size_t face) const {
  return newell(vertices_, faces_.at(face)).normalized();
}

bool ConvexBody3D::contains_strictly(const Vec3& p, double margin) const {
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (face_normal(f).dot(p - vertices_[faces_[f][0]]) >= -margin) return false;
  }
  return true;
}

double ConvexBody3D::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  bool outside = false;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    const Vec3 n = face_normal(f);
    const double s = n.dot(p - vertices_[face[0]]);
    if (s <= 0.0) continue;
    outside = true;
    // Nearest point lies on a face whose plane separates p from the body.
    const Vec3 q = p - s * n;
    bool inside_face = true;
    for (std::size_t i = 0; i < face.size(); ++i) {
      const Vec3& a = vertices_[face[i]];
      const Vec3& b = vertices_[face[(i + 1) % face.size()]];
      if ((b - a).cross(q - a).dot(n) < 0.0) {
        inside_face = false;
        break;
      }
    }
    if (inside_face) {
      best = std::min(best, s);
    } else {
      for (std::size_t i = 0; i < face.size(); ++i) {
        best = std::min(best, segment_distance(p, vertices_[face[i]],
                                               vertices_[face[(i + 1) % face.size()]]));
      }
    }
  }
  return outside ? best : 0.0;
}

ConvexBody3D ConvexBody3D::scaled(double c) const {
  std::vector<Vec3> v = vertices_;
  for (auto& p : v) p *= c;
  return ConvexBody3D(std::move(v), faces_);
}

double quermassintegral_top_3d(const ConvexBody3D& body) {
  double w2 = 0.0;
  for (const auto& e : body.edges()) {
    if (e.exterior_angle < -1e-12) throw Error(ErrorKind::Convexity, "reflex edge");
    w2 += e.length * std::max(e.exterior_angle, 0.0);
  }
  return w2 / 6.0;
}

std::array<double, 4> quermassintegrals_3d(const ConvexBody3D& body) {
  return {body.volume(), body.surface_area() / 3.0, quermassintegral_top_3d(body),
          4.0 * kPi / 3.0};
}

// ---------------------------------------------------------------------------

ShellSpec matched_shell_2d(double inner_perimeter, double outer_perimeter) {
  if (!(inner_perimeter > 0.0) || !(outer_perimeter > 0.0)) {
    throw Error(ErrorKind::Domain, "perimeters must be positive");
  }
  return {2, inner_perimeter / (2.0 * kPi), outer_perimeter / (2.0 * kPi)};
}

ShellSpec matched_shell(const ConvexBody2D& inner, double outer_perimeter) {
  return matched_shell_2d(inner.perimeter(), outer_perimeter);
}

ShellSpec matched_shell(const ConvexBody3D& inner, double outer_area) {
  if (!(outer_area > 0.0)) throw Error(ErrorKind::Domain, "outer area must be positive");
  return {3, quermassintegral_top_3d(inner) / unit_ball_volume(3),
          std::sqrt(outer_area / unit_sphere_area(3))};
}

namespace {

bool loop_is_convex(const StarLoop& loop) {
  const std::vector<Vec2>* v = nullptr;
  if (const auto* p = std::get_if<StarLoop::Polygon>(&loop.shape())) v = &p->vertices;
  if (const auto* s = std::get_if<StarLoop::Sampled>(&loop.shape())) v = &s->polygon.vertices;
  if (v == nullptr) return true;  // circles and offset convex polygons
  try {
    ConvexBody2D body(*v);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

MembershipReport class_membership(const StarAnnularDomain& domain,
                                  const MembershipOptions& options) {
  MembershipReport r;
  r.dim = 2;
  r.matched_constraint = "perimeter";
  const ShellSpec s = matched_shell_2d(domain.inner().perimeter(), domain.outer().perimeter());
  r.alpha = s.alpha;
  r.beta = s.beta;
  r.volume_domain = domain.area();
  r.min_gap = domain.min_radial_gap(options.gap_samples);
  r.convexity_ok = !options.require_convex_2d || loop_is_convex(domain.inner());
  r.containment_ok = r.min_gap > 0.0;
  r.ordering_ok = r.alpha < r.beta;
  r.volume_shell = r.ordering_ok ? shell_volume(2, r.alpha, r.beta) : 0.0;
  r.volume_ok = r.ordering_ok && r.volume_domain >= r.volume_shell * (1.0 - options.volume_rel_tol);
  r.in_class = r.convexity_ok && r.containment_ok && r.ordering_ok && r.volume_ok;
  return r;
}

MembershipReport class_membership(const ConvexBody3D& inner, const OuterBody3D& outer,
                                  const MembershipOptions& options) {
  MembershipReport r;
  r.dim = 3;
  r.matched_constraint = "W_{N-1}";
  double outer_area = 0.0, outer_volume = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Sphere3D>) {
          outer_area = unit_sphere_area(3) * o.radius * o.radius;
          outer_volume = unit_ball_volume(3) * std::pow(o.radius, 3);
          for (const auto& v : inner.vertices()) gap = std::min(gap, o.radius - (v - o.center).norm());
        } else {
          outer_area = o.surface_area();
          outer_volume = o.volume();
          for (const auto& v : inner.vertices()) {
            for (std::size_t f = 0; f < o.faces().size(); ++f) {
              gap = std::min(gap, -o.face_normal(f).dot(v - o.vertices()[o.faces()[f][0]]));
            }
          }
        }
      },
      outer);
  const ShellSpec s = matched_shell(inner, outer_area);
  r.alpha = s.alpha;
  r.beta = s.beta;
  // Both bodies are validated as convex on construction.
  r.convexity_ok = true;
  r.min_gap = gap;
  r.containment_ok = gap > 0.0;
  r.ordering_ok = r.alpha < r.beta;
  r.volume_domain = outer_volume - inner.volume();
  r.volume_shell = r.ordering_ok ? shell_volume(3, r.alpha, r.beta) : 0.0;
  r.volume_ok = r.ordering_ok && r.volume_domain >= r.volume_shell * (1.0 - options.volume_rel_tol);
  r.in_class = r.convexity_ok && r.containment_ok && r.ordering_ok && r.volume_ok;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

AlexandrovFenchelReport af_chain(int dim, const std::vector<double>& w, double tol) {
  AlexandrovFenchelReport rep;
  rep.dim = dim;
  const double b1 = unit_ball_volume(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      AlexandrovFenchelPair p;
      p.i = i;
      p.j = j;
      p.ratio_j = std::pow(w[j] / b1, 1.0 / (dim - j));
      p.ratio_i = std::pow(w[i] / b1, 1.0 / (dim - i));
      const double gap = p.ratio_j - p.ratio_i;
      p.equality = std::abs(gap) <= tol * std::max(p.ratio_j, p.ratio_i);
      p.holds = gap >= 0.0 || p.equality;
      rep.all_hold = rep.all_hold && p.holds;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

}  // namespace

AlexandrovFenchelReport alexandrov_fenchel_check(const ConvexBody2D& body, double equality_tol) {
  const Quermass2D q = quermassintegrals_2d(body);
  return af_chain(2, {q.w0, q.w1, q.w2}, equality_tol);
}

AlexandrovFenchelReport alexandrov_fenchel_check(const ConvexBody3D& body, double equality_tol) {
  const auto q = quermassintegrals_3d(body);
  return af_chain(3, {q[0], q[1], q[2], q[3]}, equality_tol);
}

bool isoperimetric_holds(const ConvexBody2D& body) {
  return body.perimeter() >= 2.0 * std::sqrt(kPi) * std::sqrt(body.area());
}

bool isoperimetric_holds(const ConvexBody3D& body) {
  return body.surface_area() >=
         3.0 * std::cbrt(unit_ball_volume(3)) * std::pow(body.volume(), 2.0 / 3.0);
}

// ---------------------------------------------------------------------------
// Steiner Monte Carlo

namespace {

template <int N, typename Dist>
SteinerFit steiner_fit(const Eigen::Matrix<double, N, 1>& lo, const Eigen::Matrix<double, N, 1>& hi,
                       double exact_volume, Dist&& dist, const SteinerOptions& opt, bool parallel) {
  const std::size_t nd = opt.deltas.size();
  if (nd < static_cast<std::size_t>(N) || opt.samples <= 0 || opt.chunk <= 0) {
    throw Error(ErrorKind::Usage, "Steiner fit needs at least N deltas and positive samples");
  }
  const double dmax = *std::max_element(opt.deltas.begin(), opt.deltas.end());
  const Eigen::Matrix<double, N, 1> blo = lo.array() - dmax, bhi = hi.array() + dmax;
  const double box = (bhi - blo).prod();

  const std::int64_t chunks = (opt.samples + opt.chunk - 1) / opt.chunk;
  std::vector<std::vector<std::int64_t>> counts(chunks, std::vector<std::int64_t>(nd, 0));
  auto run_chunk = [&](std::size_t c) {
    std::mt19937_64 rng(opt.seed + c);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::int64_t begin = static_cast<std::int64_t>(c) * opt.chunk;
    const std::int64_t end = std::min(opt.samples, begin + opt.chunk);
    Eigen::Matrix<double, N, 1> x;
    for (std::int64_t s = begin; s < end; ++s) {
      for (int k = 0; k < N; ++k) x[k] = blo[k] + (bhi[k] - blo[k]) * u(rng);
      const double d = dist(x);
      for (std::size_t i = 0; i < nd; ++i) {
        if (d <= opt.deltas[i]) ++counts[c][i];
      }
    }
  };
  if (parallel) {
    parallel_for(static_cast<std::size_t>(chunks), run_chunk);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(static_cast<std::size_t>(c));
  }

  SteinerFit fit;
  fit.dim = N;
  const double n = static_cast<double>(opt.samples);
  std::vector<double> prob(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    std::int64_t total = 0;
    for (const auto& c : counts) total += c[i];
    prob[i] = static_cast<double>(total) / n;
    fit.samples.push_back(
        {opt.deltas[i], box * prob[i], box * std::sqrt(prob[i] * (1.0 - prob[i]) / n)});
  }

  // Nested indicators: cov(I_i, I_j) = p_min - p_i p_j.
  Eigen::MatrixXd cov(nd, nd);
  for (std::size_t i = 0; i < nd; ++i) {
    for (std::size_t j = 0; j < nd; ++j) {
      cov(i, j) = box * box * (std::min(prob[i], prob[j]) - prob[i] * prob[j]) / n;
    }
  }
  const double wn = unit_ball_volume(N);
  Eigen::MatrixXd X(nd, N - 1);
  Eigen::VectorXd y(nd);
  for (std::size_t i = 0; i < nd; ++i) {
    const double d = opt.deltas[i];
    y[i] = fit.samples[i].volume - exact_volume - wn * std::pow(d, N);
    for (int k = 1; k < N; ++k) X(i, k - 1) = binomial(N, k) * std::pow(d, k);
  }
  Eigen::LDLT<Eigen::MatrixXd> c_ldlt(cov);
  const Eigen::MatrixXd cinv_x = c_ldlt.solve(X);
  const Eigen::MatrixXd normal = X.transpose() * cinv_x;
  const Eigen::MatrixXd normal_inv = normal.ldlt().solve(Eigen::MatrixXd::Identity(N - 1, N - 1));
  const Eigen::VectorXd beta = normal_inv * (cinv_x.transpose() * y);
  for (int k = 0; k < N - 1; ++k) {
    fit.inner_coefficients.push_back(beta[k]);
    fit.inner_sigma.push_back(std::sqrt(normal_inv(k, k)));
  }
  const Eigen::VectorXd resid = y - X * beta;
  for (std::size_t i = 0; i < nd; ++i) {
    if (fit.samples[i].std_error > 0.0) {
      fit.max_residual_sigma =
          std::max(fit.max_residual_sigma, std::abs(resid[i]) / fit.samples[i].std_error);
    }
  }
  return fit;
}

SteinerFit steiner_3d(const ConvexBody3D& body, const SteinerOptions& options, bool parallel) {
  Vec3 lo = body.vertices()[0], hi = lo;
  for (const auto& v : body.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return steiner_fit<3>(
      lo, hi, body.volume(), [&](const Vec3& x) { return body.distance(x); }, options, parallel);
}

}  // namespace

SteinerFit steiner_monte_carlo(const ConvexBody2D& body, const SteinerOptions& options) {
  Vec2 lo = body.vertices()[0], hi = lo;
  for (const auto& v : body.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return steiner_fit<2>(
      lo, hi, body.area(), [&](const Vec2& x) { return body.distance(x); }, options, true);
}

SteinerFit steiner_monte_carlo(const ConvexBody3D& body, const SteinerOptions& options) {
  return steiner_3d(body, options, true);
}

SteinerFit steiner_monte_carlo_serial(const ConvexBody3D& body, const SteinerOptions& options) {
  return steiner_3d(body, options, false);
}

}  // namespace shellspec
