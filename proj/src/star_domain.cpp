#include "shellspec/star_domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "shellspec/error.hpp"

namespace shellspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

StarLoop::Polygon make_polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw Error(ErrorKind::Meshing, "loop polygon needs three vertices");
  StarLoop::Polygon poly;
  poly.angles.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2& v = vertices[i];
    if (v.norm() <= 0.0) throw Error(ErrorKind::Meshing, "loop passes through the center");
    double a = std::atan2(v.y(), v.x());
    if (i > 0) {
      while (a <= poly.angles.back()) a += kTwoPi;
      if (a - poly.angles.back() >= std::numbers::pi) {
        throw Error(ErrorKind::Meshing, "loop is not star-shaped about the center");
      }
    }
    poly.angles.push_back(a);
  }
  if (poly.angles.back() - poly.angles.front() >= kTwoPi) {
    throw Error(ErrorKind::Meshing, "loop winds more than once about the center");
  }
  poly.vertices = std::move(vertices);
  return poly;
}

double polygon_radius(const StarLoop::Polygon& poly, double theta) {
  const double a0 = poly.angles.front();
  double t = std::fmod(theta - a0, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  t += a0;
  const std::size_t n = poly.vertices.size();
  // First vertex with angle > t; the sector starts one before it.
  const auto it = std::upper_bound(poly.angles.begin(), poly.angles.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - poly.angles.begin()) - 1;
  const Vec2& a = poly.vertices[i];
  const Vec2& b = poly.vertices[(i + 1) % n];
  const Vec2 d = b - a;
  const Vec2 e = unit(theta);
  const double denom = cross(e, d);
  if (denom == 0.0) return a.norm();
  return cross(a, d) / denom;
}

double polygon_perimeter(const std::vector<Vec2>& v) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += (v[(i + 1) % v.size()] - v[i]).norm();
  return p;
}

double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

double offset_polygon_radius(const StarLoop::OffsetPolygon& op, double theta) {
  const Vec2 e = unit(theta);
  const double d2 = op.delta * op.delta;
  double best = 0.0;
  const std::size_t n = op.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& c = op.vertices[i];
    const double ec = e.dot(c);
    const double disc = ec * ec - c.squaredNorm() + d2;
    if (disc >= 0.0) best = std::max(best, ec + std::sqrt(disc));
    const Vec2& b = op.vertices[(i + 1) % n];
    const Vec2 d = b - c;
    const Vec2 normal = Vec2(d.y(), -d.x()).normalized();
    const Vec2 a = c + op.delta * normal;
    const double denom = cross(e, d);
    if (denom != 0.0) {
      const double t = cross(a, d) / denom;
      const Vec2 hit = t * e;
      const double s = (hit - a).dot(d) / d.squaredNorm();
      if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::max(best, t);
    }
  }
  return best;
}

std::vector<double> to_radii(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

std::vector<Vec2> to_points(const nlohmann::json& j) {
  std::vector<Vec2> out;
  for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

nlohmann::json from_points(const std::vector<Vec2>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.x(), p.y()});
  return arr;
}

}  // namespace

StarLoop StarLoop::sampled(std::vector<double> radii) {
  if (radii.size() < 3) throw Error(ErrorKind::Meshing, "sampled loop needs three radii");
  std::vector<Vec2> pts;
  pts.reserve(radii.size());
  const double m = static_cast<double>(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) {
      throw Error(ErrorKind::Meshing, "sampled radii must be finite and positive");
    }
    pts.push_back(radii[k] * unit(kTwoPi * static_cast<double>(k) / m));
  }
  Sampled s{std::move(radii), make_polygon(std::move(pts))};
  return StarLoop(std::move(s));
}

StarLoop StarLoop::circle(Vec2 offset, double radius) {
  if (!(radius > 0.0) || !(offset.norm() < radius)) {
    throw Error(ErrorKind::Meshing, "circle must contain the domain center");
  }
  return StarLoop(Circle{offset, radius});
}

StarLoop StarLoop::polygon(std::vector<Vec2> vertices) {
  return StarLoop(make_polygon(std::move(vertices)));
}

StarLoop StarLoop::offset_polygon(std::vector<Vec2> convex_vertices, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Meshing, "offset must be positive");
  const std::size_t n = convex_vertices.size();
  if (n < 3) throw Error(ErrorKind::Meshing, "offset polygon needs three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = convex_vertices[i];
    const Vec2& b = convex_vertices[(i + 1) % n];
    const Vec2& c = convex_vertices[(i + 2) % n];
    if (cross(b - a, c - b) < 0.0) throw Error(ErrorKind::Meshing, "offset polygon must be convex");
    if (cross(a, b - a) <= 0.0) {
      throw Error(ErrorKind::Meshing, "offset polygon must contain the center strictly");
    }
  }
  return StarLoop(OffsetPolygon{std::move(convex_vertices), delta});
}

double StarLoop::radius(double theta) const {
  return std::visit(
      [theta](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          const Vec2 e = unit(theta);
          const double ce = s.offset.dot(e);
          const double cx = cross(s.offset, e);
          return ce + std::sqrt(s.radius * s.radius - cx * cx);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return polygon_radius(s, theta);
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return polygon_radius(s.polygon, theta);
        } else {
          return offset_polygon_radius(s, theta);
        }
      },
      shape_);
}

Vec2 StarLoop::point(double theta) const { return radius(theta) * unit(theta); }

double StarLoop::perimeter() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return kTwoPi * s.radius;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return polygon_perimeter(s.vertices);
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return polygon_perimeter(s.polygon.vertices);
        } else {
          return polygon_perimeter(s.vertices) + kTwoPi * s.delta;
        }
      },
      shape_);
}

double StarLoop::area() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return std::numbers::pi * s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return polygon_area(s.vertices);
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return polygon_area(s.polygon.vertices);
        } else {
          return polygon_area(s.vertices) + polygon_perimeter(s.vertices) * s.delta +
                 std::numbers::pi * s.delta * s.delta;
        }
      },
      shape_);
}

std::vector<Vec2> StarLoop::polyline(int n) const {
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (int k = 0; k < n; ++k) pts.push_back(point(kTwoPi * k / n));
  return pts;
}

std::string StarLoop::kind_name() const {
  switch (shape_.index()) {
    case 0: return "circle";
    case 1: return "polygon";
    case 2: return "sampled";
    default: return "offset_polygon";
  }
}

std::vector<double> StarLoop::corner_angles() const {
  std::vector<double> out;
  if (const auto* poly = std::get_if<Polygon>(&shape_)) {
    for (double a : poly->angles) {
      double t = std::fmod(a, kTwoPi);
      if (t < 0.0) t += kTwoPi;
      out.push_back(t);
    }
  }
  return out;
}

nlohmann::json StarLoop::to_json() const {
  return std::visit(
      [](const auto& s) -> nlohmann::json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return {{"kind", "circle"},
                  {"offset", {s.offset.x(), s.offset.y()}},
                  {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return {{"kind", "polygon"}, {"vertices", from_points(s.vertices)}};
        } else if constexpr (std::is_same_v<T, Sampled>) {
          return {{"kind", "sampled"}, {"radii", s.radii}};
        } else {
          return {{"kind", "offset_polygon"},
                  {"vertices", from_points(s.vertices)},
                  {"delta", s.delta}};
        }
      },
      shape_);
}

StarLoop StarLoop::from_json(const nlohmann::json& j) {
  if (j.is_array()) return sampled(to_radii(j));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "circle") {
    const auto& o = j.at("offset");
    return circle({o.at(0).get<double>(), o.at(1).get<double>()}, j.at("radius").get<double>());
  }
  if (kind == "polygon") return polygon(to_points(j.at("vertices")));
  if (kind == "sampled") return sampled(to_radii(j.at("radii")));
  if (kind == "offset_polygon") {
    return offset_polygon(to_points(j.at("vertices")), j.at("delta").get<double>());
  }
  throw Error(ErrorKind::Usage, "unknown loop kind '" + kind + "'");
}

StarAnnularDomain::StarAnnularDomain(Vec2 center, StarLoop inner, StarLoop outer)
    : center_(std::move(center)), inner_(std::move(inner)), outer_(std::move(outer)) {
  if (!(min_radial_gap() > 0.0)) {
    throw Error(ErrorKind::Meshing, "inner loop must lie strictly inside the outer loop");
  }
}

double StarAnnularDomain::min_radial_gap(int samples) const {
  double gap = std::numeric_limits<double>::infinity();
  auto probe = [&](double theta) {
    const double ri = inner_.radius(theta);
    if (!(ri > 0.0)) gap = std::min(gap, -1.0);
    gap = std::min(gap, outer_.radius(theta) - ri);
  };
  for (int k = 0; k < samples; ++k) probe(kTwoPi * k / samples);
  // Polygon corners are where piecewise-linear gaps attain their extremes.
  for (const StarLoop* loop : {&inner_, &outer_}) {
    if (const auto* p = std::get_if<StarLoop::Polygon>(&loop->shape())) {
      for (double a : p->angles) probe(a);
    } else if (const auto* s = std::get_if<StarLoop::Sampled>(&loop->shape())) {
      for (double a : s->polygon.angles) probe(a);
    }
  }
  return gap;
}

double StarAnnularDomain::min_distance(int samples) const {
  const auto a = inner_.polyline(samples);
  const auto b = outer_.polyline(samples);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Vec2& s0 = b[i];
      const Vec2 d = b[(i + 1) % b.size()] - s0;
      const double t = std::clamp((p - s0).dot(d) / d.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (s0 + t * d - p).norm());
    }
  }
  return best;
}

nlohmann::json StarAnnularDomain::to_json() const {
  nlohmann::json j;
  j["center"] = {center_.x(), center_.y()};
  auto put = [&](const char* name, const char* radii_name, const StarLoop& loop) {
    if (const auto* s = std::get_if<StarLoop::Sampled>(&loop.shape())) {
      j[radii_name] = s->radii;
    } else {
      j[name] = loop.to_json();
    }
  };
  put("inner", "inner_radii", inner_);
  put("outer", "outer_radii", outer_);
  return j;
}

StarAnnularDomain StarAnnularDomain::from_json(const nlohmann::json& j) {
  Vec2 center = Vec2::Zero();
  if (j.contains("center")) {
    center = {j["center"].at(0).get<double>(), j["center"].at(1).get<double>()};
  }
  auto get = [&](const char* name, const char* radii_name) {
    if (j.contains(radii_name)) return StarLoop::sampled(to_radii(j.at(radii_name)));
    if (j.contains(name)) return StarLoop::from_json(j.at(name));
    throw Error(ErrorKind::Usage, std::string("domain JSON lacks '") + radii_name + "'");
  };
  return StarAnnularDomain(center, get("inner", "inner_radii"), get("outer", "outer_radii"));
}

StarAnnularDomain StarAnnularDomain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open domain file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, "malformed domain JSON: " + std::string(e.what()));
  }
}

void StarAnnularDomain::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << to_json().dump(2) << '\n';
}

namespace domains {

StarAnnularDomain eccentric_annulus(double inner_radius, double outer_radius, double offset) {
  return StarAnnularDomain(Vec2::Zero(), StarLoop::circle(Vec2(offset, 0.0), inner_radius),
                           StarLoop::circle(Vec2::Zero(), outer_radius));
}

StarAnnularDomain concentric_annulus(double inner_radius, double outer_radius) {
  return eccentric_annulus(inner_radius, outer_radius, 0.0);
}

StarAnnularDomain disk_minus_square(double radius, double side) {
  const double h = 0.5 * side;
  return StarAnnularDomain(Vec2::Zero(),
                           StarLoop::polygon({{h, -h}, {h, h}, {-h, h}, {-h, -h}}),
                           StarLoop::circle(Vec2::Zero(), radius));
}

StarAnnularDomain polygon_collar(std::vector<Vec2> convex_vertices, double delta) {
  Vec2 c = Vec2::Zero();
  for (const auto& v : convex_vertices) c += v;
  c /= static_cast<double>(convex_vertices.size());
  for (auto& v : convex_vertices) v -= c;
  auto inner = StarLoop::polygon(convex_vertices);
  return StarAnnularDomain(c, std::move(inner),
                           StarLoop::offset_polygon(std::move(convex_vertices), delta));
}

StarAnnularDomain rectangle_minus_disk(double k, double alpha) {
  return StarAnnularDomain(Vec2::Zero(), StarLoop::circle(Vec2::Zero(), alpha),
                           StarLoop::polygon({{1.0, -k}, {1.0, k}, {-1.0, k}, {-1.0, -k}}));
}

}  // namespace domains

}  // namespace shellspec
