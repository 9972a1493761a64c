#include <cmath>

#include "shellspec/error.hpp"
#include "shellspec/flow.hpp"
#include "shellspec/shell_radial.hpp"

namespace shellspec {

const char* to_string(ComparisonStatus status) {
  switch (status) {
    case ComparisonStatus::Strict: return "strict";
    case ComparisonStatus::Equal: return "equal";
    case ComparisonStatus::Violated: return "violated";
  }
  return "?";
}

HwReport hersch_weinberger_check(const StarAnnularDomain& domain, const BoundaryCondition& inner,
                                 const BoundaryCondition& outer, const HwOptions& options) {
  HwReport r;
  r.inner = inner;
  r.outer = outer;
  r.membership = class_membership(domain);
  if (!r.membership.in_class) {
    const auto& m = r.membership;
    throw Error(ErrorKind::Precondition,
                std::string("domain is outside the class (convexity ") + (m.convexity_ok ? "ok" : "fails") +
                    ", containment " + (m.containment_ok ? "ok" : "fails") + ", ordering " +
                    (m.ordering_ok ? "ok" : "fails") + ", volume " + (m.volume_ok ? "ok" : "fails") + ")");
  }
  const TriMesh mesh = build_transfinite_mesh(domain, options.n_theta, options.n_r);
  const RichardsonResult fem = richardson_estimate(mesh, inner, outer, options.levels, options.eigen);
  r.lambda_domain = fem.lambda;
  r.error_bar = fem.error_bar;
  r.order = fem.order;
  r.warning = fem.warning;

  ShellProblem shell;
  shell.dim = 2;
  shell.alpha = r.membership.alpha;
  shell.beta = r.membership.beta;
  shell.inner = inner;
  shell.outer = outer;
  r.lambda_shell = smallest_eigenvalue(shell, options.shell_tol).lambda;
  r.margin = r.lambda_shell - r.lambda_domain;
  if (r.margin > r.error_bar) {
    r.status = ComparisonStatus::Strict;
  } else if (std::abs(r.margin) <= r.error_bar) {
    r.status = ComparisonStatus::Equal;
  } else {
    r.status = ComparisonStatus::Violated;
  }
  r.pass = r.status != ComparisonStatus::Violated;
  return r;
}

}  // namespace shellspec
