#include "shellspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

#include "shellspec/error.hpp"

namespace shellspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross(b - a, c - a);
}

std::vector<double> radial_grid(int n_r, double grading) {
  std::vector<double> w(n_r);
  for (int k = 0; k < n_r; ++k) {
    const int from_edge = std::min(k, n_r - 1 - k);
    const int half = (n_r - 1) / 2;
    w[k] = half > 0 ? std::pow(grading, static_cast<double>(from_edge) / half) : 1.0;
  }
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> s(n_r + 1, 0.0);
  for (int k = 0; k < n_r; ++k) s[k + 1] = s[k] + w[k] / total;
  s[n_r] = 1.0;
  return s;
}

}  // namespace

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double TriMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

double TriMesh::boundary_length(BoundaryTag tag) const {
  double l = 0.0;
  for (const auto& e : edges(tag)) l += (vertices[e[1]] - vertices[e[0]]).norm();
  return l;
}

double TriMesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      h = std::max(h, (vertices[t[(k + 1) % 3]] - vertices[t[k]]).norm());
    }
  }
  return h;
}

std::vector<int> TriMesh::boundary_loop(BoundaryTag tag) const {
  const auto& es = edges(tag);
  if (es.empty()) throw Error(ErrorKind::Meshing, "boundary loop is empty");
  std::map<int, int> next;
  for (const auto& e : es) {
    if (!next.emplace(e[0], e[1]).second) {
      throw Error(ErrorKind::Meshing, "boundary vertex starts two edges");
    }
  }
  std::vector<int> loop{es.front()[0]};
  int v = es.front()[1];
  while (v != loop.front()) {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end() || loop.size() > es.size()) {
      throw Error(ErrorKind::Meshing, "boundary edges do not close a loop");
    }
    v = it->second;
  }
  if (loop.size() != es.size()) {
    throw Error(ErrorKind::Meshing, "boundary edges form more than one loop");
  }
  return loop;
}

std::vector<Vec2> TriMesh::boundary_polygon(BoundaryTag tag) const {
  std::vector<Vec2> out;
  for (int v : boundary_loop(tag)) out.push_back(vertices[v]);
  return out;
}

nlohmann::json TriMesh::to_json() const {
  nlohmann::json j;
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices) vs.push_back({v.x(), v.y()});
  j["triangles"] = triangles;
  j["boundary"] = {{"inner", inner_edges}, {"outer", outer_edges}};
  auto& th = j["boundary_theta"] = nlohmann::json::array();
  for (double t : boundary_theta) {
    if (std::isnan(t)) th.push_back(nullptr);
    else th.push_back(t);
  }
  if (domain) j["domain"] = domain->to_json();
  return j;
}

TriMesh TriMesh::from_json(const nlohmann::json& j) {
  TriMesh m;
  for (const auto& p : j.at("vertices")) m.vertices.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  m.triangles = j.at("triangles").get<std::vector<std::array<int, 3>>>();
  m.inner_edges = j.at("boundary").at("inner").get<std::vector<std::array<int, 2>>>();
  m.outer_edges = j.at("boundary").at("outer").get<std::vector<std::array<int, 2>>>();
  const int nv = static_cast<int>(m.vertices.size());
  auto check = [nv](int i) {
    if (i < 0 || i >= nv) throw Error(ErrorKind::Meshing, "mesh index out of range");
  };
  for (const auto& t : m.triangles) for (int i : t) check(i);
  for (const auto& e : m.inner_edges) for (int i : e) check(i);
  for (const auto& e : m.outer_edges) for (int i : e) check(i);
  m.boundary_theta.assign(m.vertices.size(), std::numeric_limits<double>::quiet_NaN());
  if (j.contains("boundary_theta")) {
    const auto& th = j["boundary_theta"];
    for (std::size_t i = 0; i < th.size() && i < m.boundary_theta.size(); ++i) {
      if (!th[i].is_null()) m.boundary_theta[i] = th[i].get<double>();
    }
  }
  if (j.contains("domain")) {
    m.domain = std::make_shared<const StarAnnularDomain>(StarAnnularDomain::from_json(j["domain"]));
  }
  return m;
}

TriMesh TriMesh::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open mesh file " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, "malformed mesh JSON: " + std::string(e.what()));
  }
}

void TriMesh::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << to_json().dump() << '\n';
}

TriMesh build_transfinite_mesh(const StarAnnularDomain& domain, int n_theta, int n_r,
                               const MeshOptions& options) {
  if (n_theta < 8 || n_r < 2) throw Error(ErrorKind::Meshing, "need n_theta >= 8 and n_r >= 2");
  if (!(options.grading > 0.0)) throw Error(ErrorKind::Meshing, "grading must be positive");
  const std::vector<double> s = radial_grid(n_r, options.grading);

  TriMesh m;
  m.domain = std::make_shared<const StarAnnularDomain>(domain);
  const int nv = n_theta * (n_r + 1);
  m.vertices.resize(nv);
  m.boundary_theta.assign(nv, std::numeric_limits<double>::quiet_NaN());
  auto id = [n_theta](int i, int j) { return j * n_theta + ((i % n_theta) + n_theta) % n_theta; };
  // Rays through polygon corners, so that refinement never projects a
  // midpoint onto a corner next to an interior vertex.
  std::vector<double> thetas(n_theta);
  std::vector<char> snapped(n_theta, 0);
  const double step = kTwoPi / n_theta;
  for (int i = 0; i < n_theta; ++i) thetas[i] = step * i;
  for (const StarLoop* loop : {&domain.inner(), &domain.outer()}) {
    const std::vector<double> corners = loop->corner_angles();
    if (corners.empty() || 2 * corners.size() > static_cast<std::size_t>(n_theta)) continue;
    for (double c : corners) {
      const int i = static_cast<int>(std::lround(c / step)) % n_theta;
      if (snapped[i] || snapped[(i + 1) % n_theta] || snapped[(i + n_theta - 1) % n_theta]) continue;
      thetas[i] = i == 0 && c > kTwoPi - step ? c - kTwoPi : c;
      snapped[i] = 1;
    }
  }
  for (int i = 0; i < n_theta; ++i) {
    double theta = thetas[i];
    if (theta < 0.0) theta += kTwoPi;
    const double ri = domain.inner().radius(theta);
    const double ro = domain.outer().radius(theta);
    if (!(ri > 0.0) || !(ro > ri)) {
      throw Error(ErrorKind::Meshing, "radius functions are not ordered at theta = " +
                                          std::to_string(theta));
    }
    const Vec2 e(std::cos(theta), std::sin(theta));
    for (int j = 0; j <= n_r; ++j) {
      const double r = options.geometric ? ri * std::pow(ro / ri, static_cast<double>(j) / n_r)
                                         : (1.0 - s[j]) * ri + s[j] * ro;
      m.vertices[id(i, j)] = domain.center() + r * e;
    }
    m.boundary_theta[id(i, 0)] = theta;
    m.boundary_theta[id(i, n_r)] = theta;
  }
  m.triangles.reserve(2 * n_theta * n_r);
  for (int j = 0; j < n_r; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      const int a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
      const double ac = (m.vertices[a] - m.vertices[c]).squaredNorm();
      const double bd = (m.vertices[b] - m.vertices[d]).squaredNorm();
      // Equal diagonals (every cell of a concentric ring) take the a-c split,
      // so rounding cannot vary the split from cell to cell.
      if (ac <= bd * (1.0 + 1e-9)) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  }
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!(m.triangle_area(t) > 0.0)) {
      throw Error(ErrorKind::Meshing, "transfinite map folds; domain is not star-shaped enough");
    }
  }
  for (int i = 0; i < n_theta; ++i) {
    m.inner_edges.push_back({id(i, 0), id(i + 1, 0)});
    m.outer_edges.push_back({id(i, n_r), id(i + 1, n_r)});
  }
  return m;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.domain = mesh.domain;
  out.vertices = mesh.vertices;
  out.boundary_theta = mesh.boundary_theta;
  out.boundary_theta.resize(out.vertices.size(), std::numeric_limits<double>::quiet_NaN());

  std::map<std::pair<int, int>, BoundaryTag> boundary;
  for (const auto& e : mesh.inner_edges) boundary[std::minmax(e[0], e[1])] = BoundaryTag::Inner;
  for (const auto& e : mesh.outer_edges) boundary[std::minmax(e[0], e[1])] = BoundaryTag::Outer;

  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (auto it = mid.find(key); it != mid.end()) return it->second;
    Vec2 p = 0.5 * (out.vertices[a] + out.vertices[b]);
    double theta = std::numeric_limits<double>::quiet_NaN();
    if (auto bt = boundary.find(key); bt != boundary.end()) {
      const double ta = out.boundary_theta[a], tb = out.boundary_theta[b];
      if (!std::isnan(ta) && !std::isnan(tb)) {
        double d = std::remainder(tb - ta, kTwoPi);
        theta = ta + 0.5 * d;
        if (theta < 0.0) theta += kTwoPi;
        if (theta >= kTwoPi) theta -= kTwoPi;
        if (mesh.domain) {
          p = bt->second == BoundaryTag::Inner ? mesh.domain->inner_point(theta)
                                               : mesh.domain->outer_point(theta);
        }
      }
    }
    out.vertices.push_back(p);
    out.boundary_theta.push_back(theta);
    const int id = static_cast<int>(out.vertices.size()) - 1;
    mid.emplace(key, id);
    return id;
  };

  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({ab, t[1], bc});
    out.triangles.push_back({ca, bc, t[2]});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const auto& e : mesh.inner_edges) {
    const int m = mid.at(std::minmax(e[0], e[1]));
    out.inner_edges.push_back({e[0], m});
    out.inner_edges.push_back({m, e[1]});
  }
  for (const auto& e : mesh.outer_edges) {
    const int m = mid.at(std::minmax(e[0], e[1]));
    out.outer_edges.push_back({e[0], m});
    out.outer_edges.push_back({m, e[1]});
  }
  return out;
}

MeshQuality mesh_quality(const TriMesh& mesh) {
  MeshQuality q;
  q.min_angle_deg = 180.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0)) q.orientation_ok = false;
    double lmax = 0.0, perim = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = mesh.vertices[tri[k]];
      const Vec2 u = mesh.vertices[tri[(k + 1) % 3]] - p;
      const Vec2 v = mesh.vertices[tri[(k + 2) % 3]] - p;
      const double angle = std::atan2(std::abs(cross(u, v)), u.dot(v)) * 180.0 / std::numbers::pi;
      q.min_angle_deg = std::min(q.min_angle_deg, angle);
      lmax = std::max(lmax, u.norm());
      perim += u.norm();
    }
    const double inradius = 2.0 * std::abs(area) / perim;
    const double aspect = inradius > 0.0 ? lmax / (2.0 * std::sqrt(3.0) * inradius)
                                         : std::numeric_limits<double>::infinity();
    q.max_aspect = std::max(q.max_aspect, aspect);
  }
  return q;
}

// ---------------------------------------------------------------------------

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  if (mesh.triangles.empty()) throw Error(ErrorKind::Meshing, "empty mesh");
  Vec2 lo = mesh.vertices[0], hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec2 ext = hi - lo;
  const double cells = std::max(1.0, std::sqrt(static_cast<double>(mesh.triangles.size()) / 2.0));
  cell_ = std::max(ext.maxCoeff() / cells, 1e-300);
  lo_ = lo;
  nx_ = static_cast<int>(ext.x() / cell_) + 1;
  ny_ = static_cast<int>(ext.y() / cell_) + 1;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Vec2 tlo = mesh.vertices[mesh.triangles[t][0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      thi = thi.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    const int i0 = static_cast<int>((tlo.x() - lo_.x()) / cell_);
    const int i1 = std::min(nx_ - 1, static_cast<int>((thi.x() - lo_.x()) / cell_));
    const int j0 = static_cast<int>((tlo.y() - lo_.y()) / cell_);
    const int j1 = std::min(ny_ - 1, static_cast<int>((thi.y() - lo_.y()) / cell_));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
    }
  }
}

Eigen::Vector3d PointLocator::barycentric(int t, const Vec2& p) const {
  const auto& tri = mesh_->triangles[t];
  const Vec2& a = mesh_->vertices[tri[0]];
  const Vec2& b = mesh_->vertices[tri[1]];
  const Vec2& c = mesh_->vertices[tri[2]];
  const double det = cross(b - a, c - a);
  const double l1 = cross(p - a, c - a) / det;
  const double l2 = cross(b - a, p - a) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::optional<PointLocator::Hit> PointLocator::locate(const Vec2& p) const {
  const int ci = static_cast<int>(std::floor((p.x() - lo_.x()) / cell_));
  const int cj = static_cast<int>(std::floor((p.y() - lo_.y()) / cell_));
  std::optional<Hit> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int ring = 0; ring <= 1; ++ring) {
    for (int j = cj - ring; j <= cj + ring; ++j) {
      for (int i = ci - ring; i <= ci + ring; ++i) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        if (ring == 1 && std::abs(i - ci) < 1 && std::abs(j - cj) < 1) continue;
        for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
          const Eigen::Vector3d l = barycentric(t, p);
          const double score = l.minCoeff();
          if (score >= -1e-12) {
            Hit h{t, l.cwiseMax(0.0) / l.cwiseMax(0.0).sum(), true};
            return h;
          }
          if (score > best_score) {
            best_score = score;
            const Eigen::Vector3d c = l.cwiseMax(0.0);
            best = Hit{t, c / c.sum(), false};
          }
        }
      }
    }
    if (best && ring == 0 && best_score > -0.5) break;
  }
  return best;
}

std::optional<double> PointLocator::interpolate(const Eigen::VectorXd& values, const Vec2& p) const {
  const auto hit = locate(p);
  if (!hit) return std::nullopt;
  const auto& tri = mesh_->triangles[hit->triangle];
  return hit->bary[0] * values[tri[0]] + hit->bary[1] * values[tri[1]] + hit->bary[2] * values[tri[2]];
}

}  // namespace shellspec
