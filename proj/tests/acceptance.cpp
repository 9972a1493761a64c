// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "shellspec/error.hpp"
#include "shellspec/fem_eig.hpp"
#include "shellspec/mesh.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"
#include "shellspec/suites.hpp"

using namespace shellspec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

const std::string kOutDir = "acceptance_out";

SuiteResult suite(const std::string& name) {
  ExperimentConfig cfg;
  cfg.suite = name;
  cfg.out_dir = kOutDir;
  return run_suite(cfg);
}

/// All checks whose name starts with one of the prefixes must pass, and at
/// least one must match each prefix.
Outcome checks_pass(const SuiteResult& r, const std::vector<std::string>& prefixes) {
  Outcome o{true, ""};
  int total = 0;
  for (const auto& p : prefixes) {
    int matched = 0;
    for (const auto& c : r.checks) {
      if (c.name.rfind(p, 0) != 0) continue;
      ++matched;
      if (!c.pass) {
        o.pass = false;
        o.detail += "[" + c.name + ": " + c.detail + "] ";
      }
    }
    if (matched == 0) {
      o.pass = false;
      o.detail += "[no check named '" + p + "'] ";
    }
    total += matched;
  }
  if (o.pass) o.detail = std::to_string(total) + " checks";
  return o;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  ShellProblem p{3, 1.0, 2.0, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet()};
  const double lambda = smallest_eigenvalue(p, 1e-13).lambda;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double rel = std::abs(lambda - pi2) / pi2;
  const double secs = seconds_since(t0);
  return {rel <= 1e-8 && secs < 1.0, "rel " + fmt(rel) + ", " + fmt(secs) + " s"};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto domain = domains::concentric_annulus(1.0, 2.0);
  const TriMesh coarse = build_transfinite_mesh(domain, 64, 8);
  struct Case {
    const char* name;
    BoundaryCondition bc;
  };
  const std::vector<Case> cases{{"DD", BoundaryCondition::dirichlet()},
                                {"NN", BoundaryCondition::neumann()},
                                {"RR", BoundaryCondition::robin(1.0)}};
  Outcome o{true, ""};
  for (const auto& c : cases) {
    const auto fem = richardson_estimate(coarse, c.bc, c.bc, 4);
    const double radial = smallest_eigenvalue(ShellProblem{2, 1.0, 2.0, c.bc, c.bc}, 1e-12).lambda;
    if (c.bc.is_neumann()) {
      // lambda = 0 exactly; relative agreement and the order are undefined
      const bool ok = std::abs(fem.lambda) <= 1e-3;
      o.pass = o.pass && ok;
      o.detail += std::string(c.name) + " |lambda| " + fmt(std::abs(fem.lambda)) + "; ";
      continue;
    }
    const double rel = std::abs(fem.lambda - radial) / radial;
    const bool ok = rel <= 1e-3 && std::abs(fem.order - 2.0) <= 0.3;
    o.pass = o.pass && ok;
    o.detail += std::string(c.name) + " rel " + fmt(rel) + " p " + fmt(fem.order) + "; ";
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 30.0;
  o.detail += fmt(secs) + " s";
  return o;
}

Outcome timed_suite(const std::string& name, const std::vector<std::string>& prefixes,
                    double limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResult r = suite(name);
  const double secs = seconds_since(t0);
  Outcome o = checks_pass(r, prefixes);
  if (limit > 0.0 && secs >= limit) o.pass = false;
  o.detail += (o.detail.empty() ? "" : ", ") + fmt(secs) + " s";
  return o;
}

}  // namespace

int main() {
  std::filesystem::create_directories(kOutDir);

  // flow-sweep backs three criteria; run it once
  std::optional<SuiteResult> flow;
  auto flow_checks = [&](const std::vector<std::string>& prefixes) {
    if (!flow) flow = suite("flow-sweep");
    return checks_pass(*flow, prefixes);
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"radial oracle: 3D Dirichlet shell equals pi^2", criterion1},
      {"FEM agrees with the radial solver (DD, NN, RR)", criterion2},
      {"RN/NR monotonicity and max-min identity",
       [] {
         return timed_suite("shell-tables",
                            {"dirichlet 3d", "RN decreasing", "NR increasing", "max-min split"}, 60.0);
       }},
      {"fixtures lie below the matched shell",
       [] { return timed_suite("hw-verify", {"lambda_1 below matched shell"}, 300.0); }},
      {"swept pieces stay above lambda_1",
       [&] { return flow_checks({"swept pieces above lambda_1"}); }},
      {"swept pieces exhaust the domain monotonically",
       [&] { return flow_checks({"swept pieces exhaust", "swept areas nondecreasing"}); }},
      {"rectangle-minus-disk reverses the shell comparison",
       [] {
         return timed_suite("counterexample",
                            {"domain above the rectangle", "shell eigenvalue decreasing",
                             "reversed at the largest k"},
                            300.0);
       }},
      {"Morse perturbation keeps lambda_1 with a linear potential",
       [&] {
         return flow_checks({"potential keeps lambda_1", "sup norm of the potential",
                             "perturbed eigenfunction is Morse"});
       }},
      {"quermassintegral oracles",
       [] {
         return timed_suite("geometry-checks",
                            {"W2 of the unit cube from the Steiner fit", "Alexandrov-Fenchel",
                             "quermassintegral homogeneity"},
                            0.0);
       }},
      {"explicit 3D function: critical points, gradient, saddle section",
       [] {
         return timed_suite("morse3d",
                            {"three critical points", "finite-difference gradient",
                             "equator of the radius-4 sphere"},
                            0.0);
       }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
