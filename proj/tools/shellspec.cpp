// shellspec command-line front end.
//
// Exit codes: 0 success, 1 a checked inequality failed, 2 usage error,
// 3 runtime failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shellspec/convex_geometry.hpp"
#include "shellspec/counterexample.hpp"
#include "shellspec/error.hpp"
#include "shellspec/fem_eig.hpp"
#include "shellspec/flow.hpp"
#include "shellspec/mesh.hpp"
#include "shellspec/morse3d.hpp"
#include "shellspec/parallel.hpp"
#include "shellspec/report.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"
#include "shellspec/suites.hpp"

using namespace shellspec;
using nlohmann::json;

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Usage, path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Usage, "not a number: '" + item + "'");
    }
  }
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// Moves every `--config FILE` out of argv and appends the file's flat keys as
// trailing `--key value` flags, so that with the take-last policy the file
// wins over the command line.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::vector<std::string> tail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::string file;
    if (a == "--config") {
      if (i + 1 >= argc) throw Error(ErrorKind::Usage, "--config needs a file");
      file = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      file = a.substr(9);
    } else {
      args.push_back(a);
      continue;
    }
    const json j = read_json(file);
    if (!j.is_object()) throw Error(ErrorKind::Usage, file + ": config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      std::string flag = "--" + key;
      for (char& c : flag) c = c == '_' ? '-' : c;
      if (v.is_boolean()) {
        if (v.get<bool>()) tail.push_back(flag);
        continue;
      }
      tail.push_back(flag);
      if (v.is_array()) {
        std::string joined;
        for (const auto& x : v) {
          if (!joined.empty()) joined += ",";
          joined += x.is_string() ? x.get<std::string>() : x.dump();
        }
        tail.push_back(joined);
      } else {
        tail.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
  }
  args.insert(args.end(), tail.begin(), tail.end());
  return args;
}

struct BcFlags {
  std::string inner = "robin:1";
  std::string outer = "robin:1";
  void add(CLI::App* app) {
    app->add_option("--inner", inner, "neumann | dirichlet | robin:H")->capture_default_str();
    app->add_option("--outer", outer, "neumann | dirichlet | robin:H")->capture_default_str();
  }
  BoundaryCondition in() const { return BoundaryCondition::parse(inner); }
  BoundaryCondition out() const { return BoundaryCondition::parse(outer); }
};

// ---------------------------------------------------------------------------

struct ShellCmd {
  int dim = 2;
  double alpha = 1.0, beta = 2.0, tol = 1e-12;
  BcFlags bc;
  bool as_json = false;
  std::string profile_csv;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("shell", "first eigenvalue of a concentric shell");
    c->add_option("--dim", dim)->capture_default_str();
    c->add_option("--alpha", alpha)->capture_default_str();
    c->add_option("--beta", beta)->capture_default_str();
    bc.inner = bc.outer = "dirichlet";
    bc.add(c);
    c->add_option("--tol", tol)->capture_default_str();
    c->add_flag("--json", as_json);
    c->add_option("--csv", profile_csv, "write the radial profile (r,u)");
    return c;
  }

  int run() const {
    ShellProblem p;
    p.dim = dim;
    p.alpha = alpha;
    p.beta = beta;
    p.inner = bc.in();
    p.outer = bc.out();
    const RadialEigenResult r = smallest_eigenvalue(p, tol);
    if (!profile_csv.empty()) report::write_file(profile_csv, report::csv_profile(r.profile));
    if (as_json) {
      emit(report::to_json(r));
    } else {
      std::printf("lambda_1 = %.15g (zero count %d, residual %.3g)\n", r.lambda, r.zero_count, r.residual);
    }
    return 0;
  }
};

struct MatchCmd {
  std::string domain;
  bool steiner = false;
  std::uint64_t seed = 20240917;
  std::int64_t samples = 1'000'000;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("match", "matched shell and class membership of a domain");
    c->add_option("--domain,domain", domain, "domain JSON")->required();
    c->add_flag("--steiner-check", steiner, "Monte-Carlo check of the inner loop's quermassintegrals");
    c->add_option("--seed", seed)->capture_default_str();
    c->add_option("--samples", samples)->capture_default_str();
    return c;
  }

  int run() const {
    const StarAnnularDomain d = StarAnnularDomain::load(domain);
    const MembershipReport m = class_membership(d);
    json j = report::to_json(m);
    int rc = 0;
    if (steiner) {
      std::vector<Vec2> pts;
      for (const Vec2& p : d.inner().polyline(512)) pts.push_back(d.center() + p);
      const ConvexBody2D body = ConvexBody2D::hull(pts);
      SteinerOptions so;
      so.seed = seed;
      so.samples = samples;
      const SteinerFit fit = steiner_monte_carlo(body, so);
      const double exact = quermassintegrals_2d(body).w1;
      const bool ok = std::abs(fit.inner_coefficients[0] - exact) <= 3.0 * fit.inner_sigma[0];
      j["steiner"] = report::to_json(fit);
      j["steiner"]["w1_exact"] = exact;
      j["steiner"]["within_3_sigma"] = ok;
      if (!ok) rc = kExitAssertion;
    }
    emit(j);
    return rc;
  }
};

struct MeshCmd {
  std::string domain, out;
  int n_theta = 64, n_r = 8;
  double grading = 1.0;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("mesh", "transfinite triangulation of a domain");
    c->add_option("--domain", domain, "domain JSON")->required();
    c->add_option("--ntheta", n_theta)->capture_default_str();
    c->add_option("--nr", n_r)->capture_default_str();
    c->add_option("--grading", grading)->capture_default_str();
    c->add_option("--out", out, "mesh JSON")->required();
    return c;
  }

  int run() const {
    MeshOptions o;
    o.grading = grading;
    const TriMesh m = build_transfinite_mesh(StarAnnularDomain::load(domain), n_theta, n_r, o);
    m.save(out);
    json j = report::to_json(mesh_quality(m));
    j["vertices"] = m.vertices.size();
    j["triangles"] = m.triangles.size();
    j["area"] = m.area();
    emit(j);
    return 0;
  }
};

Eigen::VectorXd load_potential(const std::string& path, const TriMesh& mesh) {
  const json j = read_json(path);
  const json& a = j.is_object() && j.contains("potential") ? j["potential"] : j;
  if (!a.is_array() || a.size() != mesh.vertices.size()) {
    throw Error(ErrorKind::Usage, "potential must list one value per mesh vertex");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

struct FemCmd {
  std::string mesh, potential, eigvec;
  BcFlags bc;
  int levels = 1;
  double tol = 1e-10;
  bool as_json = false;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("fem", "P1 first eigenpair on a mesh");
    c->add_option("--mesh", mesh, "mesh JSON")->required();
    bc.add(c);
    c->add_option("--potential", potential, "JSON array of nodal potential values");
    c->add_option("--levels", levels, "refinement levels; 3 or more adds a Richardson estimate")
        ->capture_default_str();
    c->add_option("--tol", tol)->capture_default_str();
    c->add_option("--eigvec", eigvec, "CSV of nodal values (x,y,u)");
    c->add_flag("--json", as_json);
    return c;
  }

  int run() const {
    if (levels < 1) throw Error(ErrorKind::Usage, "--levels must be at least 1");
    const TriMesh m = TriMesh::load(mesh);
    std::optional<Eigen::VectorXd> pot;
    if (!potential.empty()) pot = load_potential(potential, m);
    EigenOptions eo;
    eo.tol = tol;
    json j;
    if (levels >= 3) {
      const PotentialFn fn = pot ? nodal_potential(m, *pot) : PotentialFn{};
      const RichardsonResult r = richardson_estimate(m, bc.in(), bc.out(), levels, eo, fn);
      j = report::to_json(r);
      j["residual"] = r.finest.residual;
      if (!eigvec.empty()) report::write_file(eigvec, report::csv_nodal(r.finest_mesh, r.finest.nodal_values));
    } else {
      TriMesh fine = m;
      for (int l = 1; l < levels; ++l) fine = refine(fine);
      std::optional<Eigen::VectorXd> fine_pot;
      if (pot) {
        const PotentialFn fn = nodal_potential(m, *pot);
        fine_pot = Eigen::VectorXd(static_cast<Eigen::Index>(fine.vertices.size()));
        for (std::size_t v = 0; v < fine.vertices.size(); ++v) (*fine_pot)[static_cast<Eigen::Index>(v)] = fn(fine.vertices[v]);
      }
      const EigenSolution s = solve_first(fine, bc.in(), bc.out(), fine_pot ? &*fine_pot : nullptr, eo);
      j = {{"lambda", s.lambda}, {"residual", s.residual}, {"iterations", s.iterations}};
      if (!eigvec.empty()) report::write_file(eigvec, report::csv_nodal(fine, s.nodal_values));
    }
    if (as_json) {
      emit(j);
    } else {
      std::printf("lambda_1 = %.15g\n", j["lambda"].get<double>());
    }
    return 0;
  }
};

struct FlowCmd {
  std::string mesh, csv, svg, subdomain;
  BcFlags bc;
  double tmax = 30.0, dt = 0.02, tilt = 0.0, collar = 0.08;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("flow", "sweep the boundary loops along the gradient flow");
    c->add_option("--mesh", mesh, "mesh JSON")->required();
    bc.add(c);
    c->add_option("--tmax", tmax, "sweep until t = -|tmax|")->capture_default_str();
    c->add_option("--dt", dt)->capture_default_str();
    c->add_option("--tilt", tilt, "Morse tilt magnitude; 0 sweeps the plain eigenfunction")->capture_default_str();
    c->add_option("--collar", collar)->capture_default_str();
    c->add_option("--subdomain-eig", subdomain, "every:k annotates every k-th recorded step");
    c->add_option("--csv", csv, "per-step table");
    c->add_option("--svg", svg, "fronts drawing");
    return c;
  }

  int run() const {
    const TriMesh m = TriMesh::load(mesh);
    int every = 0;
    if (!subdomain.empty()) {
      if (subdomain.rfind("every:", 0) != 0) throw Error(ErrorKind::Usage, "--subdomain-eig expects every:k");
      every = static_cast<int>(parse_list(subdomain.substr(6)).at(0));
      if (every < 1) throw Error(ErrorKind::Usage, "--subdomain-eig needs k >= 1");
      if (!m.domain) throw Error(ErrorKind::Usage, "subdomain eigenvalues need a mesh that records its domain");
    }
    const EigenSolution sol = solve_first(m, bc.in(), bc.out());
    Eigen::VectorXd u = sol.nodal_values;
    PotentialFn potential;
    if (tilt > 0.0) {
      const MorsePerturbation mp = morse_perturb(m, bc.in(), bc.out(), sol, {tilt * Vec2(1.0, 0.5), collar});
      u = mp.perturbed;
      potential = nodal_potential(m, mp.potential);
    }
    FlowOptions fo;
    fo.t_end = -std::abs(tmax);
    fo.dt = dt;
    SweepRecord rec = advance_fronts(m, u, fo);
    if (every > 0) annotate_subdomain_eigenvalues(rec, *m.domain, bc.in(), bc.out(), {}, potential, every);
    if (!csv.empty()) report::write_file(csv, report::csv_sweep(rec));
    if (!svg.empty()) report::write_file(svg, report::svg_fronts(rec, m));
    json j = report::to_json(rec);
    j.erase("front_in");
    j.erase("front_out");
    j["lambda"] = sol.lambda;
    emit(j);
    return 0;
  }
};

struct HwCmd {
  std::string domain;
  BcFlags bc;
  int n_theta = 64, n_r = 8, levels = 3;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("hw-verify", "compare lambda_1 of a domain with its matched shell");
    c->add_option("--domain,domain", domain, "domain JSON")->required();
    bc.add(c);
    c->add_option("--ntheta", n_theta)->capture_default_str();
    c->add_option("--nr", n_r)->capture_default_str();
    c->add_option("--levels", levels)->capture_default_str();
    return c;
  }

  int run() const {
    HwOptions o;
    o.n_theta = n_theta;
    o.n_r = n_r;
    o.levels = levels;
    const HwReport r = hersch_weinberger_check(StarAnnularDomain::load(domain), bc.in(), bc.out(), o);
    emit(report::to_json(r));
    return r.pass ? 0 : kExitAssertion;
  }
};

struct CounterCmd {
  double alpha = 0.5;
  std::string k = "2,4,8,16";
  std::string csv;
  int levels = 3;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("counterexample", "rectangle-minus-disk scan against matched shells");
    c->add_option("--alpha", alpha)->capture_default_str();
    c->add_option("--k", k, "comma-separated half-lengths")->capture_default_str();
    c->add_option("--levels", levels)->capture_default_str();
    c->add_option("--csv", csv);
    return c;
  }

  int run() const {
    CounterexampleOptions o;
    o.levels = levels;
    const std::vector<double> ks = parse_list(k);
    const auto rows = counterexample_scan(alpha, ks, o);
    if (!csv.empty()) report::write_file(csv, report::csv_counterexample(rows));
    json j = json::array();
    for (const auto& r : rows) j.push_back(report::to_json(r));
    const auto first = first_reversed(rows);
    emit({{"rows", j}, {"first_reversed_k", first ? json(*first) : json(nullptr)}});
    return 0;
  }
};

struct Morse3dCmd {
  bool classify = false, descent = false, ascent = false;
  std::string trace, csv;
  double section = 0.0;
  int samples = 64;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("morse3d", "the explicit function on R^3");
    c->add_flag("--classify", classify);
    c->add_option("--trace", trace, "x,y,z start point");
    c->add_flag("--descent", descent);
    c->add_flag("--ascent", ascent);
    c->add_option("--section", section, "sphere radius for the saddle section");
    c->add_option("--samples", samples)->capture_default_str();
    c->add_option("--csv", csv, "trajectory or section points");
    return c;
  }

  int run() const {
    if (!classify && trace.empty() && section == 0.0) {
      throw Error(ErrorKind::Usage, "morse3d needs --classify, --trace or --section");
    }
    if (descent && ascent) throw Error(ErrorKind::Usage, "choose one of --descent and --ascent");
    json j = json::object();
    if (classify) {
      json a = json::array();
      for (const auto& cp : classify_critical_points()) a.push_back(report::to_json(cp));
      j["critical_points"] = a;
    }
    if (!trace.empty()) {
      const std::vector<double> x = parse_list(trace);
      if (x.size() != 3) throw Error(ErrorKind::Usage, "--trace expects x,y,z");
      const Trajectory t = trace_flow(Vec3(x[0], x[1], x[2]), ascent ? FlowDirection::Ascent : FlowDirection::Descent);
      j["trace"] = {{"converged", t.converged}, {"limit", {t.limit.x(), t.limit.y(), t.limit.z()}},
                    {"t", t.t}, {"monotone", t.monotone}, {"steps", t.points.size() - 1}};
      if (!csv.empty() && section == 0.0) report::write_file(csv, report::csv_points(t.points));
    }
    if (section != 0.0) {
      const SectionReport s = saddle_sphere_section(section, samples);
      j["section"] = {{"radius", s.radius}, {"samples", s.points.size()}, {"all_reach_saddle", true}};
      if (!csv.empty()) report::write_file(csv, report::csv_points(s.points));
    }
    emit(j);
    return 0;
  }
};

struct SuiteCmd {
  ExperimentConfig cfg;
  std::string inner = "robin:1", outer = "robin:1", grid, k_values = "2,4,8,16";
  std::uint64_t seed = 20240917;

  CLI::App* add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("suite", "run a named experiment suite");
    c->add_option("--suite,suite", cfg.suite, "one of " + names())->required();
    c->add_option("--domain-file", cfg.domain_file);
    c->add_option("--inner", inner)->capture_default_str();
    c->add_option("--outer", outer)->capture_default_str();
    c->add_option("--tol", cfg.tol)->capture_default_str();
    c->add_option("--alpha", cfg.alpha)->capture_default_str();
    c->add_option("--beta", cfg.beta)->capture_default_str();
    c->add_option("--grid", grid, "comma-separated radii for shell-tables");
    c->add_option("--k-values", k_values)->capture_default_str();
    c->add_option("--counter-alpha", cfg.counter_alpha)->capture_default_str();
    c->add_option("--t-end", cfg.t_end)->capture_default_str();
    c->add_option("--dt", cfg.dt)->capture_default_str();
    c->add_option("--subdomain-every", cfg.subdomain_every)->capture_default_str();
    c->add_option("--tilt", cfg.tilt)->capture_default_str();
    c->add_option("--collar", cfg.collar)->capture_default_str();
    c->add_option("--n-theta", cfg.n_theta)->capture_default_str();
    c->add_option("--n-r", cfg.n_r)->capture_default_str();
    c->add_option("--levels", cfg.levels)->capture_default_str();
    c->add_option("--out-dir", cfg.out_dir)->capture_default_str();
    c->add_option("--seed", seed)->capture_default_str();
    return c;
  }

  static std::string names() {
    std::string s;
    for (const auto& n : suite_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }

  int run() {
    cfg.inner = BoundaryCondition::parse(inner);
    cfg.outer = BoundaryCondition::parse(outer);
    cfg.grid = grid.empty() ? std::vector<double>{} : parse_list(grid);
    cfg.k_values = parse_list(k_values);
    cfg.seed = seed;
    const SuiteResult r = run_suite(cfg);
    std::cout << r.summary();
    return r.exit_code();
  }
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Usage:
    case ErrorKind::Domain:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin eigenvalue toolkit for doubly-connected domains"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  int threads = 0;
  app.add_option("--threads", threads, "thread budget (overrides SHELLSPEC_THREADS)");
  app.footer("--config FILE anywhere on the line appends the JSON file's keys as flags, overriding\n"
             "earlier values. SHELLSPEC_THREADS bounds the thread count.");

  ShellCmd shell;
  MatchCmd match;
  MeshCmd mesh;
  FemCmd fem;
  FlowCmd flow;
  HwCmd hw;
  CounterCmd counter;
  Morse3dCmd morse;
  SuiteCmd suite;
  const std::vector<std::pair<CLI::App*, std::function<int()>>> commands{
      {shell.add(app), [&] { return shell.run(); }},
      {match.add(app), [&] { return match.run(); }},
      {mesh.add(app), [&] { return mesh.run(); }},
      {fem.add(app), [&] { return fem.run(); }},
      {flow.add(app), [&] { return flow.run(); }},
      {hw.add(app), [&] { return hw.run(); }},
      {counter.add(app), [&] { return counter.run(); }},
      {morse.add(app), [&] { return morse.run(); }},
      {suite.add(app), [&] { return suite.run(); }}};

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "shellspec: " << e.what() << "\n";
    return exit_code_for(e);
  }
  try {
    if (threads > 0) set_thread_budget(threads);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) return run();
    }
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "shellspec: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "shellspec: " << e.what() << "\n";
    return kExitRuntime;
  }
}
