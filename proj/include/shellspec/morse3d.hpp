#pragma once

// The explicit function v = z - sigma(|x|^2) psi(x3) on R^3, with
// z = x1^2 + x2^2 + x3^4 - 2 x3^2 and psi = x3^4 - 3 x3^2, so that v = z for
// |x|^2 <= 2 and v = |x|^2 for |x|^2 >= 3.

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace shellspec {

using Vec3 = Eigen::Vector3d;

/// sigma(t) = g(t - 2) / (g(t - 2) + g(3 - t)), g(s) = exp(-1/s) for s > 0.
struct SmoothStep {
  static double value(double t);
  static double d1(double t);
  static double d2(double t);
};

struct VEval {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
};

VEval v_eval(const Vec3& x);

struct CriticalPoint3D {
  Vec3 location = Vec3::Zero();
  Vec3 hessian_eigenvalues = Vec3::Zero();  ///< ascending
  int index = 0;                            ///< number of negative eigenvalues
};

struct ClassifyOptions {
  double half_width = 2.0;  ///< search box [-w, w]^3
  int grid_n = 33;          ///< grid points per axis
  double scale = 1.0;       ///< classify scale * v
  int max_newton = 100;
};

/// Grid sign scan of the gradient, damped Newton from every candidate cell,
/// deduplication. Seeds whose Newton iteration stalls are skipped.
std::vector<CriticalPoint3D> classify_critical_points(const ClassifyOptions& options = {});

enum class FlowDirection { Ascent, Descent };

struct Trajectory {
  std::vector<Vec3> points;
  std::vector<double> values;
  double t = 0.0;
  bool converged = false;  ///< ended within `capture` of a critical point
  Vec3 limit = Vec3::Zero();
  bool monotone = true;    ///< v strictly monotone along every step
};

struct TraceOptions {
  double t_max = 60.0;
  double dt = 0.01;
  double capture = 1e-6;
};

/// RK4 on -grad v (descent) or +grad v (ascent); stops on reaching a known
/// critical point or t_max.
Trajectory trace_flow(const Vec3& x0, FlowDirection direction, const TraceOptions& options = {});

struct SectionReport {
  double radius = 4.0;
  std::vector<Vec3> points;
  std::vector<Vec3> limits;
};

/// Equator of the sphere of the given radius, verified by descent from every
/// sample; throws Consistency when a sample does not reach the saddle.
SectionReport saddle_sphere_section(double radius = 4.0, int samples = 64,
                                    const TraceOptions& options = {});

}  // namespace shellspec
