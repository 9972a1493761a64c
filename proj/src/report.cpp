#include "shellspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "shellspec/error.hpp"

namespace shellspec::report {

namespace {

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

nlohmann::json points_json(const std::vector<Vec2>& pts) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

// Maps data coordinates into a fixed viewport with the y axis pointing up.
struct Frame {
  double x0, x1, y0, y1;
  double width = 640.0, height = 480.0, pad = 50.0;
  double sx(double x) const { return pad + (x - x0) / (x1 - x0) * (width - 2.0 * pad); }
  double sy(double y) const { return height - pad - (y - y0) / (y1 - y0) * (height - 2.0 * pad); }
};

Frame frame_of(double x0, double x1, double y0, double y1, bool equal_aspect) {
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  if (equal_aspect) {
    const double span = std::max(x1 - x0, y1 - y0);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    x0 = cx - 0.5 * span; x1 = cx + 0.5 * span;
    y0 = cy - 0.5 * span; y1 = cy + 0.5 * span;
  }
  Frame f{x0, x1, y0, y1};
  if (equal_aspect) f.width = f.height = 560.0;
  return f;
}

std::string header(const Frame& f) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(f.width) << "\" height=\""
    << fixed(f.height) << "\" viewBox=\"0 0 " << fixed(f.width) << ' ' << fixed(f.height) << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return o.str();
}

std::string axes(const Frame& f, const std::string& xl, const std::string& yl) {
  std::ostringstream o;
  const double bx = f.sx(f.x0), ex = f.sx(f.x1), by = f.sy(f.y0), ey = f.sy(f.y1);
  o << "<line x1=\"" << fixed(bx) << "\" y1=\"" << fixed(by) << "\" x2=\"" << fixed(ex) << "\" y2=\""
    << fixed(by) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << fixed(bx) << "\" y1=\"" << fixed(by) << "\" x2=\"" << fixed(bx) << "\" y2=\""
    << fixed(ey) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0, yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    o << "<text x=\"" << fixed(f.sx(xv)) << "\" y=\"" << fixed(by + 16.0)
      << "\" font-size=\"10\" text-anchor=\"middle\">" << csv_number(xv) << "</text>\n";
    o << "<text x=\"" << fixed(bx - 4.0) << "\" y=\"" << fixed(f.sy(yv) + 3.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << csv_number(yv) << "</text>\n";
  }
  o << "<text x=\"" << fixed(0.5 * (bx + ex)) << "\" y=\"" << fixed(f.height - 10.0)
    << "\" font-size=\"12\" text-anchor=\"middle\">" << xl << "</text>\n";
  o << "<text x=\"12\" y=\"" << fixed(0.5 * (by + ey)) << "\" font-size=\"12\">" << yl << "</text>\n";
  return o.str();
}

std::string polyline(const Frame& f, const std::vector<std::pair<double, double>>& pts,
                     const std::string& color, bool closed) {
  std::ostringstream o;
  o << '<' << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color
    << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) o << ' ';
    o << fixed(f.sx(pts[i].first)) << ',' << fixed(f.sy(pts[i].second));
  }
  o << "\"/>\n";
  return o.str();
}

std::vector<std::pair<double, double>> pairs(const std::vector<Vec2>& pts, bool close) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pts) out.emplace_back(p.x(), p.y());
  if (close && !pts.empty()) out.emplace_back(pts.front().x(), pts.front().y());
  return out;
}

std::string path(const Frame& f, const std::vector<Vec2>& loop, const std::string& color) {
  std::ostringstream o;
  o << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" d=\"";
  for (std::size_t i = 0; i < loop.size(); ++i) {
    o << (i ? " L" : "M") << fixed(f.sx(loop[i].x())) << ',' << fixed(f.sy(loop[i].y()));
  }
  o << " Z\"/>\n";
  return o.str();
}

double num_or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_profile(const RadialProfile& profile) {
  std::string s = "r,u\n";
  for (std::size_t i = 0; i < profile.r.size(); ++i) {
    s += csv_number(profile.r[i]) + ',' + csv_number(profile.u[i]) + '\n';
  }
  return s;
}

std::string csv_monotonicity(const MonotonicityTable& table) {
  std::string s = "radius,lambda\n";
  for (const auto& r : table.rows) s += csv_number(r.radius) + ',' + csv_number(r.lambda) + '\n';
  return s;
}

std::string csv_sweep(const SweepRecord& record) {
  std::string s = "t,area_in,area_out,area_fraction,gap,lambda_in,error_in,lambda_out,error_out\n";
  for (const auto& st : record.steps) {
    s += csv_number(st.t) + ',' + csv_number(st.area_in) + ',' + csv_number(st.area_out) + ',' +
         csv_number((st.area_in + st.area_out) / record.domain_area) + ',' + csv_number(st.gap) + ',' +
         csv_number(num_or_nan(st.lambda_in)) + ',' + csv_number(st.error_in) + ',' +
         csv_number(num_or_nan(st.lambda_out)) + ',' + csv_number(st.error_out) + '\n';
  }
  return s;
}

std::string csv_counterexample(const std::vector<CounterexampleRow>& rows) {
  std::string s = "k,beta,lambda_domain,error_bar,lambda_shell,lambda_rect,reversed,max_aspect\n";
  for (const auto& r : rows) {
    s += csv_number(r.k) + ',' + csv_number(r.beta) + ',' + csv_number(r.lambda_domain) + ',' +
         csv_number(r.error_bar) + ',' + csv_number(r.lambda_shell) + ',' +
         csv_number(r.lambda_rect) + ',' + (r.reversed ? "true" : "false") + ',' +
         csv_number(r.max_aspect) + '\n';
  }
  return s;
}

std::string csv_points(const std::vector<Vec3>& points) {
  std::string s = "x,y,z\n";
  for (const auto& p : points) {
    s += csv_number(p.x()) + ',' + csv_number(p.y()) + ',' + csv_number(p.z()) + '\n';
  }
  return s;
}

std::string csv_nodal(const TriMesh& mesh, const Eigen::VectorXd& values) {
  std::string s = "x,y,u\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    s += csv_number(mesh.vertices[i].x()) + ',' + csv_number(mesh.vertices[i].y()) + ',' +
         csv_number(values[static_cast<Eigen::Index>(i)]) + '\n';
  }
  return s;
}

nlohmann::json to_json(const RadialEigenResult& r, bool with_profile) {
  nlohmann::json j{{"lambda", r.lambda}, {"zero_count", r.zero_count}, {"residual", r.residual}};
  if (with_profile) j["profile"] = {{"r", r.profile.r}, {"u", r.profile.u}};
  return j;
}

nlohmann::json to_json(const MonotonicityTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) rows.push_back({{"radius", r.radius}, {"lambda", r.lambda}});
  return {{"rows", rows}, {"strictly_monotone", t.strictly_monotone}};
}

nlohmann::json to_json(const MaxMinSplit& s) {
  return {{"delta_star", s.delta_star}, {"value", s.value}, {"lambda_rn", s.lambda_rn},
          {"lambda_nr", s.lambda_nr}};
}

nlohmann::json to_json(const MembershipReport& m) {
  return {{"in_class", m.in_class},
          {"dim", m.dim},
          {"alpha", m.alpha},
          {"beta", m.beta},
          {"volume_domain", m.volume_domain},
          {"volume_shell", m.volume_shell},
          {"min_gap", m.min_gap},
          {"convexity_ok", m.convexity_ok},
          {"containment_ok", m.containment_ok},
          {"ordering_ok", m.ordering_ok},
          {"volume_ok", m.volume_ok},
          {"matched_constraint", m.matched_constraint}};
}

nlohmann::json to_json(const SteinerFit& f) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : f.samples) {
    samples.push_back({{"delta", s.delta}, {"volume", s.volume}, {"std_error", s.std_error}});
  }
  return {{"dim", f.dim},
          {"samples", samples},
          {"inner_coefficients", f.inner_coefficients},
          {"inner_sigma", f.inner_sigma},
          {"max_residual_sigma", f.max_residual_sigma}};
}

nlohmann::json to_json(const AlexandrovFenchelReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"ratio_i", p.ratio_i}, {"ratio_j", p.ratio_j},
                     {"holds", p.holds}, {"equality", p.equality}});
  }
  return {{"dim", r.dim}, {"pairs", pairs}, {"all_hold", r.all_hold}};
}

nlohmann::json to_json(const RichardsonResult& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"triangles", l.triangles}, {"h", l.h}, {"lambda", l.lambda}});
  }
  nlohmann::json j{{"lambda", r.lambda},
                   {"error_bar", r.error_bar},
                   {"order", r.order},
                   {"reliable", r.reliable},
                   {"residual", r.finest.residual},
                   {"levels", levels}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

nlohmann::json to_json(const HwReport& r) {
  nlohmann::json j{{"membership", to_json(r.membership)},
                   {"inner", r.inner.to_string()},
                   {"outer", r.outer.to_string()},
                   {"lambda_domain", r.lambda_domain},
                   {"error_bar", r.error_bar},
                   {"order", r.order},
                   {"lambda_shell", r.lambda_shell},
                   {"margin", r.margin},
                   {"status", to_string(r.status)},
                   {"pass", r.pass}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

nlohmann::json to_json(const CounterexampleRow& r) {
  nlohmann::json j{{"k", r.k},
                   {"beta", r.beta},
                   {"lambda_domain", r.lambda_domain},
                   {"error_bar", r.error_bar},
                   {"order", r.order},
                   {"lambda_shell", r.lambda_shell},
                   {"lambda_rect", r.lambda_rect},
                   {"reversed", r.reversed},
                   {"max_aspect", r.max_aspect}};
  if (!r.flag.empty()) j["flag"] = r.flag;
  return j;
}

nlohmann::json to_json(const CriticalPoint3D& c) {
  return {{"location", {c.location.x(), c.location.y(), c.location.z()}},
          {"hessian_eigenvalues",
           {c.hessian_eigenvalues.x(), c.hessian_eigenvalues.y(), c.hessian_eigenvalues.z()}},
          {"index", c.index}};
}

nlohmann::json to_json(const MeshQuality& q) {
  return {{"min_angle_deg", q.min_angle_deg}, {"max_aspect", q.max_aspect},
          {"orientation_ok", q.orientation_ok}};
}

nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    nlohmann::json j{{"t", s.t}, {"area_in", s.area_in}, {"area_out", s.area_out}, {"gap", s.gap},
                     {"points_in", s.front_in.points.size()}, {"points_out", s.front_out.points.size()}};
    if (s.lambda_in) j["lambda_in"] = *s.lambda_in, j["error_in"] = s.error_in;
    if (s.lambda_out) j["lambda_out"] = *s.lambda_out, j["error_out"] = s.error_out;
    steps.push_back(j);
  }
  nlohmann::json j{{"domain_area", r.domain_area}, {"t_stop", r.t_stop},
                   {"all_frozen", r.all_frozen}, {"steps", steps}};
  if (!r.steps.empty()) {
    const auto& last = r.steps.back();
    j["front_in"] = points_json(last.front_in.points);
    j["front_out"] = points_json(last.front_out.points);
  }
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

std::string svg_fronts(const SweepRecord& record, const TriMesh& mesh) {
  if (record.steps.empty()) throw Error(ErrorKind::Usage, "no fronts to draw");
  const auto inner = mesh.boundary_polygon(BoundaryTag::Inner);
  const auto outer = mesh.boundary_polygon(BoundaryTag::Outer);
  Vec2 lo = outer.front(), hi = lo;
  for (const auto& p : outer) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Frame f = frame_of(lo.x(), hi.x(), lo.y(), hi.y(), true);
  std::string s = header(f);
  s += path(f, inner, "black");
  s += path(f, outer, "black");
  for (const auto& st : record.steps) {
    s += polyline(f, pairs(st.front_in.points, true), kPalette[0], false);
    s += polyline(f, pairs(st.front_out.points, true), kPalette[1], false);
  }
  s += "<text x=\"10\" y=\"20\" font-size=\"12\" fill=\"" + std::string(kPalette[0]) +
       "\">inner fronts</text>\n";
  s += "<text x=\"10\" y=\"36\" font-size=\"12\" fill=\"" + std::string(kPalette[1]) +
       "\">outer fronts</text>\n";
  s += "</svg>\n";
  return s;
}

std::string svg_plot(const std::vector<Series>& series, const std::string& x_label,
                     const std::string& y_label, const double* marker) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& se : series) {
    for (const auto& [x, y] : se.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) throw Error(ErrorKind::Usage, "nothing to plot");
  const Frame f = frame_of(x0, x1, y0, y1, false);
  std::string s = header(f) + axes(f, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % 6];
    s += polyline(f, series[i].points, color, false);
    s += "<text x=\"" + fixed(f.width - 160.0) + "\" y=\"" + fixed(20.0 + 16.0 * i) +
         "\" font-size=\"12\" fill=\"" + color + "\">" + series[i].label + "</text>\n";
  }
  if (marker != nullptr) {
    s += "<line x1=\"" + fixed(f.sx(*marker)) + "\" y1=\"" + fixed(f.sy(f.y0)) + "\" x2=\"" +
         fixed(f.sx(*marker)) + "\" y2=\"" + fixed(f.sy(f.y1)) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << content;
}

}  // namespace shellspec::report
