#include "shellspec/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "shellspec/error.hpp"
#include "shellspec/parallel.hpp"

namespace shellspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + t * d - p).norm();
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  // Orientation signs are rounding noise for nearly collinear segments; the
  // box test keeps disjoint pieces of one chord from reporting a crossing.
  if ((p1.cwiseMax(p2).array() < q1.cwiseMin(q2).array()).any() ||
      (q1.cwiseMax(q2).array() < p1.cwiseMin(p2).array()).any()) {
    return false;
  }
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

// Uniform hash of the segments of a closed polyline.
class SegmentHash {
 public:
  SegmentHash(const std::vector<Vec2>& poly, double cell) : poly_(&poly), cell_(cell) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % n];
      const auto [x0, y0] = key(a.cwiseMin(b));
      const auto [x1, y1] = key(a.cwiseMax(b));
      for (long x = x0; x <= x1; ++x) {
        for (long y = y0; y <= y1; ++y) cells_[pack(x, y)].push_back(static_cast<int>(i));
      }
    }
  }

  /// Segments whose cells overlap the box around p with the given radius.
  template <typename Fn>
  void near(const Vec2& lo, const Vec2& hi, Fn&& fn) const {
    const auto [x0, y0] = key(lo);
    const auto [x1, y1] = key(hi);
    for (long x = x0; x <= x1; ++x) {
      for (long y = y0; y <= y1; ++y) {
        auto it = cells_.find(pack(x, y));
        if (it == cells_.end()) continue;
        for (int s : it->second) fn(s);
      }
    }
  }

  double distance(const Vec2& p, double radius) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly_->size();
    near(p.array() - radius, p.array() + radius, [&](int s) {
      best = std::min(best, point_segment_distance(p, (*poly_)[s], (*poly_)[(s + 1) % n]));
    });
    return best;
  }

  bool crosses(const Vec2& a, const Vec2& b) const {
    bool hit = false;
    const std::size_t n = poly_->size();
    near(a.cwiseMin(b), a.cwiseMax(b), [&](int s) {
      if (!hit) hit = segments_intersect(a, b, (*poly_)[s], (*poly_)[(s + 1) % n]);
    });
    return hit;
  }

 private:
  std::pair<long, long> key(const Vec2& p) const {
    return {static_cast<long>(std::floor(p.x() / cell_)), static_cast<long>(std::floor(p.y() / cell_))};
  }
  static long long pack(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }

  const std::vector<Vec2>* poly_;
  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

double cell_size(const std::vector<Vec2>& poly) {
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) total += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  return std::max(2.0 * total / std::max<std::size_t>(poly.size(), 1), 1e-12);
}

Vec2 mesh_center(const TriMesh& mesh) {
  if (mesh.domain) return mesh.domain->center();
  Vec2 c = Vec2::Zero();
  for (const auto& v : mesh.vertices) c += v;
  return c / static_cast<double>(mesh.vertices.size());
}

FlowFront seed_front(const TriMesh& mesh, BoundaryTag tag, const Vec2& center) {
  FlowFront f;
  f.origin = tag;
  for (int v : mesh.boundary_loop(tag)) {
    f.points.push_back(mesh.vertices[v]);
    const double th = mesh.boundary_theta.size() > static_cast<std::size_t>(v)
                          ? mesh.boundary_theta[v]
                          : std::numeric_limits<double>::quiet_NaN();
    const Vec2 d = mesh.vertices[v] - center;
    f.labels.push_back(std::isnan(th) ? std::atan2(d.y(), d.x()) : th);
  }
  if (polygon_area(f.points) < 0.0) {
    std::reverse(f.points.begin(), f.points.end());
    std::reverse(f.labels.begin(), f.labels.end());
  }
  f.frozen.assign(f.points.size(), 0);
  return f;
}

double label_mid(double a, double b) {
  double m = a + 0.5 * std::remainder(b - a, kTwoPi);
  if (m < 0.0) m += kTwoPi;
  if (m >= kTwoPi) m -= kTwoPi;
  return m;
}

// Inserts midpoints on long chords and drops points on short ones when the
// removal does not shrink the swept region.
void resample(FlowFront& f, double h) {
  const double sweep_sign = f.origin == BoundaryTag::Inner ? 1.0 : -1.0;
  FlowFront out;
  out.t = f.t;
  out.origin = f.origin;
  const std::size_t n = f.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    out.points.push_back(f.points[i]);
    out.labels.push_back(f.labels[i]);
    out.frozen.push_back(f.frozen[i]);
    const double len = (f.points[j] - f.points[i]).norm();
    if (len > 2.0 * h) {
      const int pieces = static_cast<int>(std::ceil(len / h));
      for (int k = 1; k < pieces; ++k) {
        const double s = static_cast<double>(k) / pieces;
        out.points.push_back((1.0 - s) * f.points[i] + s * f.points[j]);
        const double d = std::remainder(f.labels[j] - f.labels[i], kTwoPi);
        out.labels.push_back(label_mid(f.labels[i], f.labels[i] + 2.0 * s * d));
        out.frozen.push_back(0);
      }
    }
  }
  f = std::move(out);

  bool changed = true;
  while (changed && f.points.size() > 8) {
    changed = false;
    for (std::size_t i = 0; i < f.points.size() && f.points.size() > 8; ++i) {
      const std::size_t m = f.points.size();
      const std::size_t prev = (i + m - 1) % m, next = (i + 1) % m;
      if ((f.points[next] - f.points[i]).norm() >= 0.5 * h) continue;
      if ((f.points[next] - f.points[prev]).norm() > 2.0 * h) continue;
      // Removing i changes the enclosed area by -signed_area(prev, i, next).
      const double tri = 0.5 * cross(f.points[i] - f.points[prev], f.points[next] - f.points[prev]);
      if (sweep_sign * tri > 0.0) continue;
      f.points.erase(f.points.begin() + static_cast<long>(i));
      f.labels.erase(f.labels.begin() + static_cast<long>(i));
      f.frozen.erase(f.frozen.begin() + static_cast<long>(i));
      changed = true;
    }
  }
}

double polylines_gap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const SegmentHash hash(b, cell_size(b));
  double best = std::numeric_limits<double>::infinity();
  double radius = cell_size(b);
  for (const auto& p : a) best = std::min(best, hash.distance(p, radius));
  if (!std::isfinite(best)) {
    for (const auto& p : a) {
      for (std::size_t i = 0; i < b.size(); ++i) {
        best = std::min(best, point_segment_distance(p, b[i], b[(i + 1) % b.size()]));
      }
    }
  }
  return best;
}

}  // namespace

std::vector<Vec2> gradient_field(const TriMesh& mesh, const Eigen::VectorXd& u) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<Vec2> grad(nv, Vec2::Zero());
  std::vector<double> weight(nv, 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri[0]];
    const Vec2& p1 = mesh.vertices[tri[1]];
    const Vec2& p2 = mesh.vertices[tri[2]];
    const double area = 0.5 * cross(p1 - p0, p2 - p0);
    const Vec2 q[3] = {p0, p1, p2};
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = q[(i + 1) % 3];
      const Vec2& b = q[(i + 2) % 3];
      g += u[tri[i]] * Vec2(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      grad[tri[i]] += area * g;
      weight[tri[i]] += area;
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (weight[v] > 0.0) grad[v] /= weight[v];
  }
  return grad;
}

VectorFieldSampler::VectorFieldSampler(const TriMesh& mesh, std::vector<Vec2> field)
    : mesh_(&mesh), locator_(mesh), field_(std::move(field)) {}

Vec2 VectorFieldSampler::operator()(const Vec2& p) const {
  const auto hit = locator_.locate(p);
  if (!hit) return Vec2::Zero();
  const auto& tri = mesh_->triangles[hit->triangle];
  return hit->bary[0] * field_[tri[0]] + hit->bary[1] * field_[tri[1]] +
         hit->bary[2] * field_[tri[2]];
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * a;
}

bool polyline_is_simple(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  const SegmentHash hash(polygon, cell_size(polygon));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    bool bad = false;
    hash.near(a.cwiseMin(b), a.cwiseMax(b), [&](int s) {
      const std::size_t j = static_cast<std::size_t>(s);
      if (bad || j == i || j == (i + 1) % n || (j + 1) % n == i) return;
      bad = segments_intersect(a, b, polygon[j], polygon[(j + 1) % n]);
    });
    if (bad) return false;
  }
  return true;
}

bool polylines_disjoint(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const SegmentHash hash(b, cell_size(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (hash.crosses(a[i], a[(i + 1) % a.size()])) return false;
  }
  return true;
}

SweepRecord advance_fronts(const TriMesh& mesh, const Eigen::VectorXd& u,
                           const FlowOptions& options) {
  if (!(options.t_end < 0.0) || !(options.dt > 0.0)) {
    throw Error(ErrorKind::Usage, "need t_end < 0 and dt > 0");
  }
  const VectorFieldSampler field(mesh, gradient_field(mesh, u));
  double gmax = 0.0;
  for (const auto& g : field.field()) gmax = std::max(gmax, g.norm());
  const double eps_stop = options.stop_fraction * gmax;

  const Vec2 center = mesh_center(mesh);
  const std::vector<Vec2> inner_poly = mesh.boundary_polygon(BoundaryTag::Inner);
  const std::vector<Vec2> outer_poly = mesh.boundary_polygon(BoundaryTag::Outer);
  const double inner_area = std::abs(polygon_area(inner_poly));
  const double outer_area = std::abs(polygon_area(outer_poly));
  double h = options.spacing;
  if (!(h > 0.0)) {
    h = 0.4 * (mesh.boundary_length(BoundaryTag::Inner) + mesh.boundary_length(BoundaryTag::Outer)) /
        static_cast<double>(mesh.inner_edges.size() + mesh.outer_edges.size());
  }
  const double gap_stop = options.gap_stop * h;

  SweepRecord record;
  record.domain_area = outer_area - inner_area;
  FlowFront fronts[2] = {seed_front(mesh, BoundaryTag::Inner, center),
                         seed_front(mesh, BoundaryTag::Outer, center)};
  for (auto& f : fronts) resample(f, h);

  const int steps = static_cast<int>(std::ceil(-options.t_end / options.dt - 1e-9));
  const double dt = options.dt;
  auto rk4 = [&](const Vec2& p) {
    const Vec2 k1 = field(p);
    const Vec2 k2 = field(p + 0.5 * dt * k1);
    const Vec2 k3 = field(p + 0.5 * dt * k2);
    const Vec2 k4 = field(p + dt * k3);
    return Vec2(p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  for (int step = 1; step <= steps; ++step) {
    const double t = -std::min(step * dt, -options.t_end);
    FlowFront next[2] = {fronts[0], fronts[1]};
    for (int side = 0; side < 2; ++side) {
      const FlowFront& other = fronts[1 - side];
      const SegmentHash other_hash(other.points, cell_size(other.points));
      FlowFront& f = next[side];
      f.t = t;
      const std::size_t n = f.points.size();
      std::vector<Vec2> moved(f.points);
      std::vector<char> frozen(f.frozen);
      parallel_for_static(n, [&](std::size_t i) {
        if (frozen[i]) return;
        const Vec2& p = f.points[i];
        if (field(p).norm() < eps_stop) {
          frozen[i] = 1;
          return;
        }
        const Vec2 q = rk4(p);
        const double reach = (q - p).norm() + gap_stop;
        if (other_hash.crosses(p, q) || other_hash.distance(q, reach) < gap_stop) {
          frozen[i] = 1;
          return;
        }
        moved[i] = q;
      });
      f.points = std::move(moved);
      f.frozen = std::move(frozen);
      resample(f, h);
    }

    for (int side = 0; side < 2; ++side) {
      if (!polyline_is_simple(next[side].points)) {
        throw Error(ErrorKind::FlowDegenerate,
                    std::string(side == 0 ? "inner" : "outer") + " front self-intersects at t = " +
                        std::to_string(t) + " after " + std::to_string(record.steps.size()) +
                        " recorded steps");
      }
    }
    if (!polylines_disjoint(next[0].points, next[1].points)) {
      throw Error(ErrorKind::FlowDegenerate, "fronts cross at t = " + std::to_string(t) +
                                                 " after " + std::to_string(record.steps.size()) +
                                                 " recorded steps");
    }
    fronts[0] = std::move(next[0]);
    fronts[1] = std::move(next[1]);

    const bool done = std::all_of(fronts[0].frozen.begin(), fronts[0].frozen.end(), [](char c) { return c != 0; }) &&
                      std::all_of(fronts[1].frozen.begin(), fronts[1].frozen.end(), [](char c) { return c != 0; });
    if (step % std::max(options.record_every, 1) == 0 || step == steps || done) {
      SweepStep s;
      s.t = t;
      s.front_in = fronts[0];
      s.front_out = fronts[1];
      s.area_in = polygon_area(fronts[0].points) - inner_area;
      s.area_out = outer_area - polygon_area(fronts[1].points);
      s.gap = polylines_gap(fronts[0].points, fronts[1].points);
      record.steps.push_back(std::move(s));
    }
    record.t_stop = t;
    if (done) {
      record.all_frozen = true;
      break;
    }
  }
  if (!record.all_frozen) record.warning = "fronts still moving at t_end";
  return record;
}

// ---------------------------------------------------------------------------

SubdomainEigen subdomain_eigen(const StarAnnularDomain& domain, const FlowFront& front,
                               const BoundaryCondition& original, const SubdomainOptions& options,
                               const PotentialFn& potential) {
  std::vector<Vec2> rel;
  rel.reserve(front.points.size());
  for (const auto& p : front.points) rel.push_back(p - domain.center());
  try {
    const StarLoop loop = StarLoop::polygon(std::move(rel));
    const bool inner_side = front.origin == BoundaryTag::Inner;
    const StarAnnularDomain piece =
        inner_side ? StarAnnularDomain(domain.center(), domain.inner(), loop)
                   : StarAnnularDomain(domain.center(), loop, domain.outer());
    const TriMesh mesh = build_transfinite_mesh(piece, options.n_theta, options.n_r);
    const BoundaryCondition neumann = BoundaryCondition::neumann();
    const RichardsonResult r =
        inner_side ? richardson_estimate(mesh, original, neumann, options.levels, options.eigen, potential)
                   : richardson_estimate(mesh, neumann, original, options.levels, options.eigen, potential);
    return {r.lambda, r.error_bar};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Meshing) throw;
    throw Error(ErrorKind::Remesh, "front at t = " + std::to_string(front.t) +
                                       " cannot be remeshed: " + e.what());
  }
}

void annotate_subdomain_eigenvalues(SweepRecord& record, const StarAnnularDomain& domain,
                                    const BoundaryCondition& inner,
                                    const BoundaryCondition& outer,
                                    const SubdomainOptions& options,
                                    const PotentialFn& potential, int every) {
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    if (static_cast<int>(i + 1) % std::max(every, 1) == 0) picked.push_back(i);
  }
  parallel_for(2 * picked.size(), [&](std::size_t k) {
    SweepStep& s = record.steps[picked[k / 2]];
    if (k % 2 == 0) {
      const SubdomainEigen e = subdomain_eigen(domain, s.front_in, inner, options, potential);
      s.lambda_in = e.lambda;
      s.error_in = e.error_bar;
    } else {
      const SubdomainEigen e = subdomain_eigen(domain, s.front_out, outer, options, potential);
      s.lambda_out = e.lambda;
      s.error_out = e.error_bar;
    }
  });
}

EffectlessCut effectless_cut_estimate(const SweepRecord& record, const StarAnnularDomain& domain,
                                      int samples, double gap_warning) {
  if (record.steps.empty()) throw Error(ErrorKind::Usage, "empty sweep record");
  const SweepStep& last = record.steps.back();
  const Vec2 c = domain.center();
  // Distances along the ray c + s e at which it crosses the closed polyline.
  auto hits = [&c](const std::vector<Vec2>& loop, const Vec2& e) {
    std::vector<double> out;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec2 a = loop[i] - c, b = loop[(i + 1) % loop.size()] - c;
      const Vec2 d = b - a;
      const double den = cross(e, d);
      if (den == 0.0) continue;
      const double u = cross(e, a) / -den;
      if (u < 0.0 || u >= 1.0) continue;
      const double s = cross(a, d) / den;
      if (s > 0.0) out.push_back(s);
    }
    return out;
  };
  EffectlessCut cut;
  for (int k = 0; k < samples; ++k) {
    const double theta = kTwoPi * k / samples;
    const Vec2 e(std::cos(theta), std::sin(theta));
    const std::vector<double> hi = hits(last.front_in.points, e);
    const std::vector<double> ho = hits(last.front_out.points, e);
    if (hi.empty() || ho.empty()) throw Error(ErrorKind::Remesh, "a ray misses a terminal front");
    // Outermost crossing of the inner front, innermost of the outer front.
    const double ri = *std::max_element(hi.begin(), hi.end());
    const double ro = *std::min_element(ho.begin(), ho.end());
    cut.max_gap = std::max(cut.max_gap, ro - ri);
    if (ro < ri) cut.warning = "fronts overlap along some ray";
    cut.curve.push_back(c + 0.5 * (ri + ro) * e);
  }
  if (gap_warning > 0.0 && cut.max_gap > gap_warning && cut.warning.empty()) {
    cut.warning = "gap too wide: fronts stopped far apart along some ray";
  }
  cut.simple = polyline_is_simple(cut.curve);
  return cut;
}

}  // namespace shellspec
