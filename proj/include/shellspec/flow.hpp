#pragma once

// Gradient-flow fronts of a computed eigenfunction, swept subdomains and their
// mixed eigenvalues, the effectless-cut estimate, the Morse perturbation with
// its compensating potential, discrete critical points, and the full
// comparison pipeline against the matched shell.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shellspec/boundary_condition.hpp"
#include "shellspec/convex_geometry.hpp"
#include "shellspec/fem_eig.hpp"
#include "shellspec/mesh.hpp"

namespace shellspec {

/// Area-weighted average of the constant triangle gradients at each vertex.
std::vector<Vec2> gradient_field(const TriMesh& mesh, const Eigen::VectorXd& u);

/// P1 interpolation of a vertex vector field.
class VectorFieldSampler {
 public:
  VectorFieldSampler(const TriMesh& mesh, std::vector<Vec2> field);
  /// Zero when p is off the mesh.
  Vec2 operator()(const Vec2& p) const;
  const std::vector<Vec2>& field() const noexcept { return field_; }

 private:
  const TriMesh* mesh_;
  PointLocator locator_;
  std::vector<Vec2> field_;
};

// ---------------------------------------------------------------------------
// Fronts

struct FlowFront {
  double t = 0.0;  ///< <= 0
  BoundaryTag origin = BoundaryTag::Inner;
  std::vector<Vec2> points;
  std::vector<double> labels;  ///< seed polar angle carried by each point
  std::vector<char> frozen;
};

struct SweepStep {
  double t = 0.0;
  FlowFront front_in;
  FlowFront front_out;
  double area_in = 0.0;   ///< between the inner boundary and front_in
  double area_out = 0.0;  ///< between front_out and the outer boundary
  double gap = 0.0;       ///< smallest distance between the two fronts
  std::optional<double> lambda_in, lambda_out;  ///< RN on the inner piece, NR on the outer
  double error_in = 0.0, error_out = 0.0;
};

struct SweepRecord {
  std::vector<SweepStep> steps;
  double domain_area = 0.0;
  double t_stop = 0.0;
  bool all_frozen = false;
  std::string warning;
};

struct FlowOptions {
  double t_end = -30.0;
  double dt = 0.02;
  double stop_fraction = 1e-3;  ///< freeze where |grad u| < stop_fraction * max |grad u|
  double spacing = 0.0;         ///< target point spacing h; 0 uses 0.4 * mean boundary edge length
  double gap_stop = 0.5;        ///< freeze within gap_stop * h of the other front
  int record_every = 1;         ///< keep every k-th step (the last step is always kept)
};

/// Integrates d phi / ds = +grad u (s = -t) from both boundary loops with RK4.
/// Throws FlowDegenerate, with the record so far in the message, when a front
/// self-intersects or the fronts cross.
SweepRecord advance_fronts(const TriMesh& mesh, const Eigen::VectorXd& u,
                           const FlowOptions& options);

/// Signed shoelace area.
double polygon_area(const std::vector<Vec2>& polygon);
/// True when no two non-adjacent segments of the closed polyline intersect.
bool polyline_is_simple(const std::vector<Vec2>& polygon);
/// True when the two closed polylines share no point.
bool polylines_disjoint(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

struct SubdomainOptions {
  int n_theta = 64;
  int n_r = 4;
  int levels = 3;
  EigenOptions eigen;
};

struct SubdomainEigen {
  double lambda = 0.0;
  double error_bar = 0.0;
};

/// Mixed eigenvalue of the region swept by `front`: the original condition on
/// the seed boundary, Neumann on the front, plus the optional potential.
/// Throws Remesh when the front is not star-shaped about the domain center.
SubdomainEigen subdomain_eigen(const StarAnnularDomain& domain, const FlowFront& front,
                               const BoundaryCondition& original,
                               const SubdomainOptions& options = {},
                               const PotentialFn& potential = {});

/// Fills lambda_in / lambda_out on every recorded step (parallel over steps).
void annotate_subdomain_eigenvalues(SweepRecord& record, const StarAnnularDomain& domain,
                                    const BoundaryCondition& inner,
                                    const BoundaryCondition& outer,
                                    const SubdomainOptions& options = {},
                                    const PotentialFn& potential = {}, int every = 1);

struct EffectlessCut {
  std::vector<Vec2> curve;  ///< closed polyline, one point per sampled angle
  bool simple = false;
  double max_gap = 0.0;     ///< widest front separation along a ray
  std::string warning;
};

/// Pairs the terminal inner and outer fronts along rays from the domain center
/// and returns the midpoints.
EffectlessCut effectless_cut_estimate(const SweepRecord& record, const StarAnnularDomain& domain,
                                      int samples = 256, double gap_warning = 0.0);

// ---------------------------------------------------------------------------
// Morse perturbation

struct MorseOptions {
  Vec2 tilt = Vec2::Zero();
  double collar = 0.2;  ///< cutoff is 0 within collar of the boundary, 1 beyond 2 * collar
};

struct MorsePerturbation {
  Vec2 tilt = Vec2::Zero();
  double collar = 0.0;
  Eigen::VectorXd cutoff;     ///< nodal phi
  Eigen::VectorXd perturbed;  ///< u_n
  Eigen::VectorXd potential;  ///< V_n, zero where phi = 0
  double sup_norm = 0.0;
  double min_gradient_on_support = 0.0;  ///< min |grad u| over vertices with 0 < phi < 1
  double max_tilt_gradient = 0.0;        ///< max |grad w| over the same vertices
  /// grad u_n cannot vanish where phi varies; false for tilts too large for the collar.
  bool collar_clear() const { return min_gradient_on_support > max_tilt_gradient; }
};

/// u_n = u + phi (a . (x - c)) with a smooth cutoff phi and the nodal
/// potential V_n = (lambda w - M_L^{-1} K w) / u_n, w = u_n - u, which makes
/// u_n a discrete eigenvector of K + V_n for lambda up to the lumping error.
/// Throws Precondition when u_n is not positive on the support or |grad u|
/// drops below 1e-3 max |grad u| where the cutoff varies.
MorsePerturbation morse_perturb(const TriMesh& mesh, const BoundaryCondition& inner,
                                const BoundaryCondition& outer, const EigenSolution& solution,
                                const MorseOptions& options);

enum class CriticalType { Minimum, Saddle, Maximum };

struct CriticalPoint2D {
  int vertex = -1;
  Vec2 point = Vec2::Zero();
  CriticalType type = CriticalType::Maximum;
  int multiplicity = 1;  ///< saddles: (sign changes / 2) - 1; degenerate when > 1
};

/// Lower-link classification of interior vertices; ties broken by index.
std::vector<CriticalPoint2D> critical_points(const TriMesh& mesh, const Eigen::VectorXd& f);

// ---------------------------------------------------------------------------
// Comparison with the matched shell

enum class ComparisonStatus { Strict, Equal, Violated };

struct HwOptions {
  int n_theta = 64;
  int n_r = 8;
  int levels = 3;
  double shell_tol = 1e-12;
  EigenOptions eigen;
};

struct HwReport {
  MembershipReport membership;
  BoundaryCondition inner = BoundaryCondition::dirichlet();
  BoundaryCondition outer = BoundaryCondition::dirichlet();
  double lambda_domain = 0.0;
  double error_bar = 0.0;
  double order = 0.0;
  double lambda_shell = 0.0;
  double margin = 0.0;  ///< lambda_shell - lambda_domain
  ComparisonStatus status = ComparisonStatus::Violated;
  bool pass = false;    ///< status != Violated
  std::string warning;
};

const char* to_string(ComparisonStatus status);

/// Throws Precondition (carrying the membership flags) when the domain is not
/// in the class.
HwReport hersch_weinberger_check(const StarAnnularDomain& domain, const BoundaryCondition& inner,
                                 const BoundaryCondition& outer, const HwOptions& options = {});

}  // namespace shellspec
