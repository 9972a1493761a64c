#include "shellspec/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "shellspec/convex_geometry.hpp"
#include "shellspec/counterexample.hpp"
#include "shellspec/error.hpp"
#include "shellspec/morse3d.hpp"
#include "shellspec/parallel.hpp"
#include "shellspec/report.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"

namespace shellspec {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class Outputs {
 public:
  Outputs(const ExperimentConfig& c, SuiteResult& r) : config_(c), result_(r) {}

  void add(const std::string& name, std::string content) {
    pending_.emplace_back(name, std::move(content));
  }

  /// Single writer at the end of the suite.
  void flush() {
    std::filesystem::create_directories(config_.out_dir);
    pending_.emplace_back(config_.suite + ".json", result_json().dump(2) + "\n");
    for (const auto& [name, content] : pending_) {
      const std::string path = (std::filesystem::path(config_.out_dir) / name).string();
      report::write_file(path, content);
      result_.files.push_back(path);
    }
  }

 private:
  json result_json() const {
    json checks = json::array();
    for (const auto& c : result_.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    return {{"suite", result_.suite}, {"ok", result_.ok()}, {"checks", checks},
            {"results", result_.results}};
  }

  const ExperimentConfig& config_;
  SuiteResult& result_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

void check(SuiteResult& r, std::string name, bool pass, std::string detail) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

// ---------------------------------------------------------------------------

void shell_tables(const ExperimentConfig& cfg, SuiteResult& res, Outputs& out) {
  {
    ShellProblem p;
    p.dim = 3;
    p.alpha = 1.0;
    p.beta = 2.0;
    const double lambda = smallest_eigenvalue(p, 1e-13).lambda;
    const double rel = std::abs(lambda - kPi * kPi) / (kPi * kPi);
    res.results["dirichlet_3d_shell"] = {{"lambda", lambda}, {"relative_error", rel}};
    check(res, "dirichlet 3d shell equals pi^2", rel <= 1e-8, "relative error " + num(rel));
  }

  const double a = cfg.alpha, b = cfg.beta;
  const std::vector<double> rn_grid = cfg.grid.empty() ? linspace(a + 0.1 * (b - a), b, 10) : cfg.grid;
  const std::vector<double> nr_grid = cfg.grid.empty() ? linspace(a, b - 0.1 * (b - a), 10) : cfg.grid;

  struct Job {
    int dim;
    double h;
    RadiusSweep kind;
  };
  std::vector<Job> jobs;
  for (int dim : {2, 3}) {
    for (double h : {0.5, 5.0}) {
      jobs.push_back({dim, h, RadiusSweep::OuterRadiusRN});
      jobs.push_back({dim, h, RadiusSweep::InnerRadiusNR});
    }
  }
  std::vector<MonotonicityTable> tables(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    MonotonicitySweep sw;
    sw.dim = jobs[i].dim;
    sw.kind = jobs[i].kind;
    sw.bc = BoundaryCondition::robin(jobs[i].h);
    const bool rn = jobs[i].kind == RadiusSweep::OuterRadiusRN;
    sw.fixed_radius = rn ? a : b;
    tables[i] = monotonicity_scan(sw, rn ? rn_grid : nr_grid, cfg.tol);
  }

  json jt = json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const bool rn = jobs[i].kind == RadiusSweep::OuterRadiusRN;
    const std::string tag = std::string(rn ? "rn" : "nr") + "_N" + std::to_string(jobs[i].dim) +
                            "_h" + num(jobs[i].h);
    json j = report::to_json(tables[i]);
    j["dim"] = jobs[i].dim;
    j["h"] = jobs[i].h;
    j["kind"] = rn ? "outer_radius_rn" : "inner_radius_nr";
    jt.push_back(j);
    out.add("shell-tables_" + tag + ".csv", report::csv_monotonicity(tables[i]));
    check(res, std::string(rn ? "RN decreasing in outer radius" : "NR increasing in inner radius") +
                   " (N=" + std::to_string(jobs[i].dim) + ", h=" + num(jobs[i].h) + ")",
          tables[i].strictly_monotone, std::to_string(tables[i].rows.size()) + " radii");
  }
  res.results["tables"] = jt;

  json jm = json::array();
  for (int dim : {2, 3}) {
    for (double h : {0.5, 5.0}) {
      ShellProblem p;
      p.dim = dim;
      p.alpha = a;
      p.beta = b;
      p.inner = p.outer = BoundaryCondition::robin(h);
      const MaxMinSplit split = maxmin_split(p, cfg.tol);
      const double direct = smallest_eigenvalue(p, cfg.tol).lambda;
      const double rel = std::abs(split.value - direct) / direct;
      json j = report::to_json(split);
      j["dim"] = dim;
      j["h"] = h;
      j["direct"] = direct;
      j["relative_difference"] = rel;
      jm.push_back(j);
      check(res, "max-min split equals RR (N=" + std::to_string(dim) + ", h=" + num(h) + ")",
            rel <= 1e-6, "relative difference " + num(rel));
      if (dim == 2 && h == 0.5) {
        const std::vector<double> deltas = linspace(a + 0.05 * (b - a), b - 0.05 * (b - a), 19);
        report::Series rn{"inner piece, Neumann at delta", {}}, nr{"outer piece, Neumann at delta", {}};
        for (double d : deltas) {
          ShellProblem in = p, outer_piece = p;
          in.beta = d;
          in.outer = BoundaryCondition::neumann();
          outer_piece.alpha = d;
          outer_piece.inner = BoundaryCondition::neumann();
          rn.points.emplace_back(d, smallest_eigenvalue(in, cfg.tol).lambda);
          nr.points.emplace_back(d, smallest_eigenvalue(outer_piece, cfg.tol).lambda);
        }
        out.add("shell-tables_maxmin.svg",
                report::svg_plot({rn, nr}, "delta", "lambda_1", &split.delta_star));
      }
    }
  }
  res.results["maxmin"] = jm;
}

// ---------------------------------------------------------------------------

struct NamedDomain {
  std::string name;
  StarAnnularDomain domain;
};

std::vector<NamedDomain> hw_fixtures() {
  return {{"eccentric_annulus", domains::eccentric_annulus(1.0, 2.0, 0.3)},
          {"disk_minus_square", domains::disk_minus_square(2.0, 1.0)},
          {"polygon_collar",
           domains::polygon_collar({{0.0, 0.0}, {1.5, 0.0}, {1.8, 1.0}, {0.5, 1.4}, {-0.3, 0.8}}, 0.5)}};
}

void hw_verify(const ExperimentConfig& cfg, SuiteResult& res, Outputs& out) {
  std::vector<NamedDomain> doms;
  std::vector<std::pair<BoundaryCondition, BoundaryCondition>> bcs;
  if (cfg.domain_file.empty()) {
    doms = hw_fixtures();
    bcs = {{BoundaryCondition::robin(1.0), BoundaryCondition::robin(1.0)},
           {BoundaryCondition::robin(10.0), BoundaryCondition::robin(0.1)},
           {BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet()}};
  } else {
    doms.push_back({std::filesystem::path(cfg.domain_file).stem().string(),
                    StarAnnularDomain::load(cfg.domain_file)});
    bcs.emplace_back(cfg.inner, cfg.outer);
  }
  HwOptions opt;
  opt.n_theta = cfg.n_theta;
  opt.n_r = cfg.n_r;
  opt.levels = cfg.levels;
  opt.eigen.tol = cfg.tol;

  std::vector<HwReport> reports(doms.size() * bcs.size());
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& [in, outer] = bcs[k % bcs.size()];
    reports[k] = hersch_weinberger_check(doms[k / bcs.size()].domain, in, outer, opt);
  }

  json rows = json::array();
  std::string csv = "domain,inner,outer,lambda_domain,error_bar,order,lambda_shell,margin,status\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const HwReport& r = reports[k];
    const std::string& name = doms[k / bcs.size()].name;
    json j = report::to_json(r);
    j["domain"] = name;
    rows.push_back(j);
    csv += name + "," + r.inner.to_string() + "," + r.outer.to_string() + "," +
           report::csv_number(r.lambda_domain) + "," + report::csv_number(r.error_bar) + "," +
           report::csv_number(r.order) + "," + report::csv_number(r.lambda_shell) + "," +
           report::csv_number(r.margin) + "," + to_string(r.status) + "\n";
    check(res, "lambda_1 below matched shell: " + name + " " + r.inner.to_string() + "/" + r.outer.to_string(),
          r.pass, "margin " + num(r.margin) + ", error bar " + num(r.error_bar) + ", " + to_string(r.status));
  }
  res.results["reports"] = rows;
  out.add("hw-verify.csv", csv);
}

// ---------------------------------------------------------------------------

void flow_sweep(const ExperimentConfig& cfg, SuiteResult& res, Outputs& out) {
  const StarAnnularDomain domain = cfg.domain_file.empty()
                                       ? domains::eccentric_annulus(1.0, 2.0, 0.3)
                                       : StarAnnularDomain::load(cfg.domain_file);
  FlowExperimentOptions opt;
  opt.n_theta = cfg.n_theta;
  opt.n_r = cfg.n_r;
  opt.levels = cfg.levels;
  opt.tilt = cfg.tilt * Vec2(1.0, 0.5);
  opt.collar = cfg.collar;
  opt.flow.t_end = cfg.t_end;
  opt.flow.dt = cfg.dt;
  opt.subdomain_every = cfg.subdomain_every;
  opt.subdomain.eigen.tol = cfg.tol;
  const FlowExperiment ex = run_flow_experiment(domain, cfg.inner, cfg.outer, opt);

  // Lemma 3.3 on the annotated steps.
  const double lam = ex.perturbed.lambda, lam_err = ex.perturbed.error_bar;
  int annotated = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : ex.sweep.steps) {
    if (!s.lambda_in || !s.lambda_out) continue;
    ++annotated;
    worst = std::min(worst, std::min(*s.lambda_in - s.error_in, *s.lambda_out - s.error_out) - (lam + lam_err));
  }
  check(res, "swept pieces above lambda_1 beyond error bars", annotated >= 10 && worst > 0.0,
        std::to_string(annotated) + " annotated steps, smallest margin " + num(worst));

  const SweepStep& last = ex.sweep.steps.back();
  const double covered = (last.area_in + last.area_out) / ex.sweep.domain_area;
  check(res, "swept pieces exhaust the domain", covered >= 0.99,
        "fraction " + num(covered) + " at t = " + num(last.t));
  bool monotone = true;
  const double slack = 1e-9 * ex.sweep.domain_area;
  for (std::size_t i = 1; i < ex.sweep.steps.size(); ++i) {
    const auto& p = ex.sweep.steps[i - 1];
    const auto& q = ex.sweep.steps[i];
    monotone = monotone && q.area_in >= p.area_in - slack && q.area_out >= p.area_out - slack;
  }
  check(res, "swept areas nondecreasing", monotone, std::to_string(ex.sweep.steps.size()) + " steps");

  const double diff = std::abs(lam - ex.base.lambda);
  const double bar = 10.0 * std::max(ex.base.error_bar, lam_err);
  check(res, "potential keeps lambda_1", diff <= bar, "difference " + num(diff) + " against " + num(bar));

  std::vector<double> tilts, sups;
  for (double f : {1.0, 1e-1, 1e-2, 1e-3}) {
    MorseOptions mo{opt.tilt * f, opt.collar};
    tilts.push_back(mo.tilt.norm());
    sups.push_back(morse_perturb(ex.base.finest_mesh, cfg.inner, cfg.outer, ex.base.finest, mo).sup_norm);
  }
  const double slope = loglog_slope(tilts, sups);
  check(res, "sup norm of the potential linear in the tilt", std::abs(slope - 1.0) <= 0.2,
        "log-log slope " + num(slope));

  int minima = 0, maxima = 0, saddles = 0, degenerate = 0;
  for (const auto& c : ex.critical) {
    minima += c.type == CriticalType::Minimum;
    maxima += c.type == CriticalType::Maximum;
    saddles += c.type == CriticalType::Saddle;
    degenerate += c.multiplicity != 1;
  }
  check(res, "perturbed eigenfunction is Morse without interior minima",
        minima == 0 && degenerate == 0 && maxima >= 1,
        std::to_string(maxima) + " maxima, " + std::to_string(saddles) + " saddles, " +
            std::to_string(minima) + " minima, " + std::to_string(degenerate) + " degenerate");

  const EffectlessCut cut = effectless_cut_estimate(ex.sweep, domain, 256, 0.05);
  check(res, "effectless cut estimate is a simple closed curve", cut.simple,
        "max front gap " + num(cut.max_gap) + (cut.warning.empty() ? "" : ", " + cut.warning));

  json crit = json::array();
  for (const auto& c : ex.critical) {
    crit.push_back({{"vertex", c.vertex},
                    {"point", {c.point.x(), c.point.y()}},
                    {"type", c.type == CriticalType::Minimum ? "minimum"
                             : c.type == CriticalType::Saddle ? "saddle" : "maximum"},
                    {"multiplicity", c.multiplicity}});
  }
  json sup = json::array();
  for (std::size_t i = 0; i < tilts.size(); ++i) sup.push_back({{"tilt", tilts[i]}, {"sup_norm", sups[i]}});
  json cut_pts = json::array();
  for (const auto& p : cut.curve) cut_pts.push_back({p.x(), p.y()});
  res.results = {{"lambda", report::to_json(ex.base)},
                 {"lambda_with_potential", report::to_json(ex.perturbed)},
                 {"tilt", {opt.tilt.x(), opt.tilt.y()}},
                 {"collar", opt.collar},
                 {"potential_sup_norm", ex.morse.sup_norm},
                 {"collar_clear", ex.morse.collar_clear()},
                 {"sup_norm_scaling", sup},
                 {"critical_points", crit},
                 {"sweep", report::to_json(ex.sweep)},
                 {"effectless_cut", {{"points", cut_pts}, {"max_gap", cut.max_gap}, {"simple", cut.simple}}}};

  out.add("flow-sweep_sweep.csv", report::csv_sweep(ex.sweep));
  SweepRecord thin;
  thin.domain_area = ex.sweep.domain_area;
  const std::size_t n = ex.sweep.steps.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 20);
  for (std::size_t i = stride - 1; i < n; i += stride) thin.steps.push_back(ex.sweep.steps[i]);
  if (thin.steps.empty() || thin.steps.back().t != last.t) thin.steps.push_back(last);
  out.add("flow-sweep_fronts.svg", report::svg_fronts(thin, ex.base.finest_mesh));
  report::Series in{"RN inner piece", {}}, outer{"NR outer piece", {}}, base{"lambda_1 with potential", {}};
  for (const auto& s : ex.sweep.steps) {
    if (!s.lambda_in) continue;
    in.points.emplace_back(s.t, *s.lambda_in);
    outer.points.emplace_back(s.t, *s.lambda_out);
    base.points.emplace_back(s.t, lam);
  }
  if (!in.points.empty()) out.add("flow-sweep_lambda.svg", report::svg_plot({in, outer, base}, "t", "lambda_1"));
}

// ---------------------------------------------------------------------------

void counterexample_suite(const ExperimentConfig& cfg, SuiteResult& res, Outputs& out) {
  CounterexampleOptions opt;
  opt.levels = cfg.levels;
  opt.eigen.tol = cfg.tol;
  const std::vector<CounterexampleRow> rows = counterexample_scan(cfg.counter_alpha, cfg.k_values, opt);
  json jr = json::array();
  for (const auto& r : rows) {
    jr.push_back(report::to_json(r));
    check(res, "domain above the rectangle at k = " + num(r.k),
          r.flag.empty() && r.lambda_domain - r.error_bar > r.lambda_rect,
          "lambda " + num(r.lambda_domain) + " +- " + num(r.error_bar) + " against " + num(r.lambda_rect) +
              (r.flag.empty() ? "" : ", " + r.flag));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].k > rows[i - 1].k) decreasing = decreasing && rows[i].lambda_shell < rows[i - 1].lambda_shell;
  }
  check(res, "shell eigenvalue decreasing in k", decreasing, std::to_string(rows.size()) + " rows");
  const auto largest = std::max_element(rows.begin(), rows.end(),
                                        [](const auto& x, const auto& y) { return x.k < y.k; });
  check(res, "reversed at the largest k", largest != rows.end() && largest->reversed,
        largest == rows.end() ? "no rows"
                              : "k = " + num(largest->k) + ", margin " +
                                    num(largest->lambda_domain - largest->error_bar - largest->lambda_shell));
  const auto first = first_reversed(rows);
  res.results = {{"alpha", cfg.counter_alpha}, {"rows", jr}};
  res.results["first_reversed_k"] = first ? json(*first) : json(nullptr);

  out.add("counterexample.csv", report::csv_counterexample(rows));
  report::Series dom{"domain", {}}, shell{"matched shell", {}}, rect{"rectangle", {}};
  for (const auto& r : rows) {
    dom.points.emplace_back(r.k, r.lambda_domain);
    shell.points.emplace_back(r.k, r.lambda_shell);
    rect.points.emplace_back(r.k, r.lambda_rect);
  }
  out.add("counterexample.svg", report::svg_plot({dom, shell, rect}, "k", "lambda_1"));
}

// ---------------------------------------------------------------------------

void morse3d_suite(const ExperimentConfig& cfg, SuiteResult& res, Outputs& out) {
  const std::vector<CriticalPoint3D> found = classify_critical_points();
  const std::vector<std::pair<Vec3, Vec3>> expected{{{0, 0, -1}, {2, 2, 8}},
                                                    {{0, 0, 0}, {-4, 2, 2}},
                                                    {{0, 0, 1}, {2, 2, 8}}};
  bool match = found.size() == expected.size();
  double loc_err = 0.0, eig_err = 0.0;
  for (std::size_t i = 0; match && i < found.size(); ++i) {
    loc_err = std::max(loc_err, (found[i].location - expected[i].first).cwiseAbs().maxCoeff());
    eig_err = std::max(eig_err, (found[i].hessian_eigenvalues - expected[i].second).cwiseAbs().maxCoeff());
  }
  match = match && loc_err <= 1e-10 && eig_err <= 1e-8;
  check(res, "three critical points with the stated Hessians", match,
        std::to_string(found.size()) + " found, location error " + num(loc_err) + ", eigenvalue error " +
            num(eig_err));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  double fd_err = 0.0;
  const double step = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x(box(rng), box(rng), box(rng));
    const Vec3 g = v_eval(x).gradient;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = step;
      const double fd = (v_eval(x + e).value - v_eval(x - e).value) / (2.0 * step);
      fd_err = std::max(fd_err, std::abs(fd - g[k]));
    }
  }
  check(res, "finite-difference gradient", fd_err <= 1e-6, "max error " + num(fd_err));

  double shell_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2000; ++i) {
    Vec3 d(box(rng), box(rng), box(rng));
    if (d.norm() == 0.0) continue;
    d.normalize();
    const double q = 2.0 + (i + 0.5) / 2000.0;
    shell_min = std::min(shell_min, v_eval(std::sqrt(q) * d).gradient.norm());
  }
  check(res, "no critical point in the transition shell", shell_min > 0.0, "min |grad v| " + num(shell_min));

  bool section_ok = true;
  std::string section_detail = "64 equator samples descend to the saddle";
  SectionReport section;
  try {
    section = saddle_sphere_section(4.0, 64);
  } catch (const Error& e) {
    section_ok = false;
    section_detail = e.what();
  }
  check(res, "equator of the radius-4 sphere lies on the stable manifold of the saddle", section_ok,
        section_detail);

  const Trajectory pole = trace_flow(Vec3(0, 0, 4), FlowDirection::Descent);
  const Trajectory off = trace_flow(Vec3(4, 0, 1e-3), FlowDirection::Descent);
  const Vec3 top(0, 0, 1);
  check(res, "pole and off-equator points descend to (0,0,1)",
        pole.converged && off.converged && pole.limit == top && off.limit == top && pole.monotone && off.monotone,
        "pole t = " + num(pole.t) + ", off-equator t = " + num(off.t));

  json jf = json::array();
  for (const auto& c : found) jf.push_back(report::to_json(c));
  res.results = {{"critical_points", jf}, {"fd_gradient_error", fd_err}, {"transition_min_gradient", shell_min}};
  if (section_ok) out.add("morse3d_section.csv", report::csv_points(section.points));
}

// ---------------------------------------------------------------------------

void geometry_checks(const ExperimentConfig& cfg, SuiteResult& res, Outputs&) {
  const ConvexBody3D cube = ConvexBody3D::cube(1.0);
  const double w2 = quermassintegral_top_3d(cube);
  check(res, "W2 of the unit cube from edges", std::abs(w2 - kPi) <= 1e-12, "W2 = " + num(w2));
  SteinerOptions so;
  so.seed = cfg.seed;
  const SteinerFit fit = steiner_monte_carlo(cube, so);
  const double w2_mc = fit.inner_coefficients[1], sigma = fit.inner_sigma[1];
  check(res, "W2 of the unit cube from the Steiner fit", std::abs(w2_mc - kPi) <= 3.0 * sigma,
        "W2 = " + num(w2_mc) + " +- " + num(sigma));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int af_fail = 0, iso_fail = 0;
  double homog = 0.0;
  for (int b = 0; b < 100; ++b) {
    std::vector<Vec3> pts(12 + b % 20);
    for (auto& p : pts) p = Vec3(u(rng), 0.5 * u(rng), 2.0 * u(rng));
    const ConvexBody3D body = ConvexBody3D::hull(pts);
    af_fail += !alexandrov_fenchel_check(body).all_hold;
    iso_fail += !isoperimetric_holds(body);
    const double c = 0.5 + 0.05 * b;
    const auto w = quermassintegrals_3d(body);
    const auto wc = quermassintegrals_3d(body.scaled(c));
    for (int i = 0; i < 4; ++i) {
      const double expect = std::pow(c, 3 - i) * w[i];
      homog = std::max(homog, std::abs(wc[i] - expect) / std::abs(expect));
    }
    std::vector<Vec2> pts2(5 + b % 15);
    for (auto& p : pts2) p = Vec2(u(rng), u(rng));
    const ConvexBody2D body2 = ConvexBody2D::hull(pts2);
    af_fail += !alexandrov_fenchel_check(body2).all_hold;
    iso_fail += !isoperimetric_holds(body2);
    const Quermass2D q = quermassintegrals_2d(body2), qc = quermassintegrals_2d(body2.scaled(c));
    homog = std::max({homog, std::abs(qc.w0 - c * c * q.w0) / (c * c * q.w0),
                      std::abs(qc.w1 - c * q.w1) / (c * q.w1), std::abs(qc.w2 - q.w2) / q.w2});
  }
  check(res, "Alexandrov-Fenchel chain on random hulls", af_fail == 0,
        std::to_string(af_fail) + " failures over 100 bodies in each dimension");
  check(res, "isoperimetric inequality on random hulls", iso_fail == 0, std::to_string(iso_fail) + " failures");
  check(res, "quermassintegral homogeneity", homog <= 1e-9, "max relative deviation " + num(homog));

  json members = json::array();
  for (const auto& [name, d] : hw_fixtures()) {
    const MembershipReport m = class_membership(d);
    json j = report::to_json(m);
    j["domain"] = name;
    members.push_back(j);
    check(res, "fixture in the admissible class: " + name, m.in_class,
          "alpha " + num(m.alpha) + ", beta " + num(m.beta));
  }
  res.results = {{"cube_w2", w2}, {"steiner", report::to_json(fit)}, {"homogeneity", homog},
                 {"membership", members}};
}

using SuiteFn = std::function<void(const ExperimentConfig&, SuiteResult&, Outputs&)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r{{"shell-tables", shell_tables},
                                                {"hw-verify", hw_verify},
                                                {"flow-sweep", flow_sweep},
                                                {"counterexample", counterexample_suite},
                                                {"morse3d", morse3d_suite},
                                                {"geometry-checks", geometry_checks}};
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Usage, "config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "suite") c.suite = v.get<std::string>();
      else if (key == "domain_file") c.domain_file = v.get<std::string>();
      else if (key == "inner") c.inner = BoundaryCondition::parse(v.get<std::string>());
      else if (key == "outer") c.outer = BoundaryCondition::parse(v.get<std::string>());
      else if (key == "tol") c.tol = v.get<double>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "grid") c.grid = v.get<std::vector<double>>();
      else if (key == "k_values") c.k_values = v.get<std::vector<double>>();
      else if (key == "counter_alpha") c.counter_alpha = v.get<double>();
      else if (key == "t_end") c.t_end = v.get<double>();
      else if (key == "dt") c.dt = v.get<double>();
      else if (key == "subdomain_every") c.subdomain_every = v.get<int>();
      else if (key == "tilt") c.tilt = v.get<double>();
      else if (key == "collar") c.collar = v.get<double>();
      else if (key == "n_theta") c.n_theta = v.get<int>();
      else if (key == "n_r") c.n_r = v.get<int>();
      else if (key == "levels") c.levels = v.get<int>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else throw Error(ErrorKind::Usage, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("bad config value: ") + e.what());
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::Usage, what);
  };
  require(tol > 0.0, "tol must be positive");
  require(dt > 0.0, "dt must be positive");
  require(t_end < 0.0, "t_end must be negative");
  require(alpha > 0.0 && beta > alpha, "need 0 < alpha < beta");
  require(counter_alpha > 0.0 && counter_alpha < 1.0, "counter_alpha must lie in (0, 1)");
  require(collar > 0.0, "collar must be positive");
  require(tilt >= 0.0, "tilt must be nonnegative");
  require(n_theta >= 8 && n_r >= 2, "need n_theta >= 8 and n_r >= 2");
  require(levels >= 3, "Richardson extrapolation needs levels >= 3");
  require(subdomain_every >= 0, "subdomain_every must be nonnegative");
  for (double k : k_values) require(k > 1.0, "k values must exceed 1");
  if (!domain_file.empty() && !std::filesystem::exists(domain_file)) {
    throw Error(ErrorKind::Io, "domain file not found: " + domain_file);
  }
}

bool SuiteResult::ok() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::string SuiteResult::summary() const {
  std::ostringstream o;
  int passed = 0;
  for (const auto& c : checks) {
    o << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << "\n";
    passed += c.pass;
  }
  o << suite << ": " << passed << "/" << checks.size() << " checks passed\n";
  for (const auto& f : files) o << "wrote " << f << "\n";
  return o.str();
}

FlowExperiment run_flow_experiment(const StarAnnularDomain& domain, const BoundaryCondition& inner,
                                   const BoundaryCondition& outer,
                                   const FlowExperimentOptions& options) {
  FlowExperiment ex;
  const TriMesh coarse = build_transfinite_mesh(domain, options.n_theta, options.n_r);
  ex.base = richardson_estimate(coarse, inner, outer, options.levels, options.subdomain.eigen);
  const TriMesh& mesh = ex.base.finest_mesh;
  ex.morse = morse_perturb(mesh, inner, outer, ex.base.finest, MorseOptions{options.tilt, options.collar});
  const PotentialFn potential = nodal_potential(mesh, ex.morse.potential);
  ex.perturbed =
      richardson_estimate(coarse, inner, outer, options.levels, options.subdomain.eigen, potential);
  ex.critical = critical_points(mesh, ex.morse.perturbed);
  ex.sweep = advance_fronts(mesh, ex.morse.perturbed, options.flow);

  std::vector<std::size_t> picked;
  const std::size_t n = ex.sweep.steps.size();
  if (options.subdomain_every > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      if ((i + 1) % options.subdomain_every == 0) picked.push_back(i);
    }
  } else {
    std::size_t window = n;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = ex.sweep.steps[i];
      if (s.area_in + s.area_out >= 0.9 * ex.sweep.domain_area) {
        window = i + 1;
        break;
      }
    }
    for (std::size_t j = 1; j <= 10; ++j) {
      const std::size_t i = (j * window + 5) / 10;
      if (i >= 1 && (picked.empty() || picked.back() != i - 1)) picked.push_back(i - 1);
    }
  }
  SweepRecord sub;
  for (std::size_t i : picked) sub.steps.push_back(ex.sweep.steps[i]);
  annotate_subdomain_eigenvalues(sub, domain, inner, outer, options.subdomain, potential, 1);
  for (std::size_t k = 0; k < picked.size(); ++k) {
    SweepStep& s = ex.sweep.steps[picked[k]];
    s.lambda_in = sub.steps[k].lambda_in;
    s.lambda_out = sub.steps[k].lambda_out;
    s.error_in = sub.steps[k].error_in;
    s.error_out = sub.steps[k].error_out;
  }
  return ex;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

SuiteResult run_suite(const ExperimentConfig& config) {
  const auto it = registry().find(config.suite);
  if (it == registry().end()) throw Error(ErrorKind::Usage, "unknown suite '" + config.suite + "'");
  config.validate();
  SuiteResult result;
  result.suite = config.suite;
  result.results = json::object();
  Outputs out(config, result);
  it->second(config, result, out);
  out.flush();
  return result;
}

}  // namespace shellspec
