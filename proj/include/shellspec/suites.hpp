#pragma once

// Named experiment suites behind `shellspec suite` and the acceptance gate.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "shellspec/boundary_condition.hpp"
#include "shellspec/flow.hpp"

namespace shellspec {

struct ExperimentConfig {
  std::string suite;
  std::string domain_file;  ///< empty selects the suite's default fixture
  BoundaryCondition inner = BoundaryCondition::robin(1.0);
  BoundaryCondition outer = BoundaryCondition::robin(1.0);
  double tol = 1e-10;
  double alpha = 1.0;
  double beta = 2.0;
  std::vector<double> grid;  ///< shell-tables radii; empty picks ten points
  std::vector<double> k_values{2.0, 4.0, 8.0, 16.0};
  double counter_alpha = 0.5;
  double t_end = -30.0;
  double dt = 0.02;
  int subdomain_every = 0;   ///< 0 annotates ten steps before the fronts cover 90% of the area
  double tilt = 1e-3;        ///< tilt vector is tilt * (1, 1/2)
  double collar = 0.08;
  int n_theta = 64;
  int n_r = 8;
  int levels = 3;
  std::string out_dir = ".";
  std::uint64_t seed = 20240917;

  /// Unknown keys are a usage error.
  static ExperimentConfig from_json(const nlohmann::json& j);
  /// Throws Usage / Io when tolerances are not positive or files are missing.
  void validate() const;
};

struct SuiteCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCheck> checks;
  nlohmann::json results;
  std::vector<std::string> files;

  bool ok() const;
  int exit_code() const { return ok() ? 0 : 1; }
  std::string summary() const;
};

struct FlowExperimentOptions {
  int n_theta = 64;
  int n_r = 8;
  int levels = 3;
  Vec2 tilt = Vec2(1e-3, 5e-4);
  double collar = 0.08;
  FlowOptions flow;
  /// 0 annotates ten evenly spaced steps taken before the swept pieces cover
  /// 90% of the domain; later pieces sit within the error bars of lambda_1.
  int subdomain_every = 0;
  SubdomainOptions subdomain;
};

struct FlowExperiment {
  RichardsonResult base;        ///< lambda_1 of the domain with its error bar
  MorsePerturbation morse;
  RichardsonResult perturbed;   ///< lambda_1 with the potential V_n
  SweepRecord sweep;
  std::vector<CriticalPoint2D> critical;
};

/// Solve, perturb, sweep and annotate the swept pieces with their eigenvalues.
FlowExperiment run_flow_experiment(const StarAnnularDomain& domain, const BoundaryCondition& inner,
                                   const BoundaryCondition& outer,
                                   const FlowExperimentOptions& options);

const std::vector<std::string>& suite_names();

/// Runs one suite, writes `<out_dir>/<suite>.json` plus its CSV/SVG artifacts
/// at the end, and returns the checks. Throws Usage for an unknown suite.
SuiteResult run_suite(const ExperimentConfig& config);

}  // namespace shellspec
