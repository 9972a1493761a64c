#include "shellspec/morse3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "shellspec/error.hpp"
#include "shellspec/parallel.hpp"

namespace shellspec {

namespace {

struct G {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

G g_of(double s) {
  if (s <= 0.0) return {};
  const double e = std::exp(-1.0 / s);
  const double s2 = s * s;
  return {e, e / s2, e * (1.0 / (s2 * s2) - 2.0 / (s2 * s))};
}

struct Sigma {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
};

Sigma sigma(double t) {
  if (t <= 2.0) return {0.0, 0.0, 0.0};
  if (t >= 3.0) return {1.0, 0.0, 0.0};
  const G a = g_of(t - 2.0);
  const G bg = g_of(3.0 - t);
  // b(t) = g(3 - t): derivatives pick up the chain-rule sign.
  const double b = bg.v, b1 = -bg.d1, b2 = bg.d2;
  const double s = a.v + b, s1 = a.d1 + b1, s2 = a.d2 + b2;
  const double num1 = a.d1 * s - a.v * s1;
  Sigma r;
  r.v = a.v / s;
  r.d1 = num1 / (s * s);
  r.d2 = (a.d2 * s - a.v * s2) / (s * s) - 2.0 * s1 * num1 / (s * s * s);
  return r;
}

const std::vector<Vec3>& known_critical_points() {
  static const std::vector<Vec3> pts{{0.0, 0.0, -1.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  return pts;
}

}  // namespace

double SmoothStep::value(double t) { return sigma(t).v; }
double SmoothStep::d1(double t) { return sigma(t).d1; }
double SmoothStep::d2(double t) { return sigma(t).d2; }

VEval v_eval(const Vec3& x) {
  const double q = x.squaredNorm();
  const double x3 = x.z(), x32 = x3 * x3;
  VEval r;
  if (q >= 3.0) {
    r.value = q;
    r.gradient = 2.0 * x;
    r.hessian = 2.0 * Eigen::Matrix3d::Identity();
    return r;
  }
  const double z = x.x() * x.x() + x.y() * x.y() + x32 * x32 - 2.0 * x32;
  const Vec3 gz(2.0 * x.x(), 2.0 * x.y(), 4.0 * x32 * x3 - 4.0 * x3);
  Eigen::Matrix3d hz = Eigen::Matrix3d::Zero();
  hz(0, 0) = 2.0;
  hz(1, 1) = 2.0;
  hz(2, 2) = 12.0 * x32 - 4.0;
  if (q <= 2.0) {
    r.value = z;
    r.gradient = gz;
    r.hessian = hz;
    return r;
  }
  const double psi = x32 * x32 - 3.0 * x32;
  const Vec3 gpsi(0.0, 0.0, 4.0 * x32 * x3 - 6.0 * x3);
  const double hpsi = 12.0 * x32 - 6.0;
  const Sigma s = sigma(q);
  r.value = z - s.v * psi;
  r.gradient = gz - 2.0 * s.d1 * psi * x - s.v * gpsi;
  const Eigen::Matrix3d xx = x * x.transpose();
  const Eigen::Matrix3d cross_terms = x * gpsi.transpose() + gpsi * x.transpose();
  r.hessian = hz - 4.0 * s.d2 * psi * xx - 2.0 * s.d1 * psi * Eigen::Matrix3d::Identity() -
              2.0 * s.d1 * cross_terms;
  r.hessian(2, 2) -= s.v * hpsi;
  return r;
}

std::vector<CriticalPoint3D> classify_critical_points(const ClassifyOptions& options) {
  if (options.grid_n < 2 || !(options.half_width > 0.0) || !(options.scale > 0.0)) {
    throw Error(ErrorKind::Usage, "bad classification grid");
  }
  const int n = options.grid_n;
  const double w = options.half_width;
  const double step = 2.0 * w / (n - 1);
  auto node = [&](int i) { return -w + step * i; };
  std::vector<Vec3> grads(static_cast<std::size_t>(n) * n * n);
  auto at = [n](int i, int j, int k) { return (static_cast<std::size_t>(i) * n + j) * n + k; };
  parallel_for_static(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        grads[at(static_cast<int>(i), j, k)] =
            options.scale * v_eval(Vec3(node(static_cast<int>(i)), node(j), node(k))).gradient;
      }
    }
  });

  std::vector<Vec3> seeds;
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j + 1 < n; ++j) {
      for (int k = 0; k + 1 < n; ++k) {
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (int c = 0; c < 8; ++c) {
          const Vec3& g = grads[at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))];
          lo = lo.cwiseMin(g);
          hi = hi.cwiseMax(g);
        }
        if ((lo.array() <= 0.0).all() && (hi.array() >= 0.0).all()) {
          seeds.emplace_back(node(i) + 0.5 * step, node(j) + 0.5 * step, node(k) + 0.5 * step);
        }
      }
    }
  }

  std::vector<CriticalPoint3D> found;
  for (const Vec3& seed : seeds) {
    Vec3 x = seed;
    VEval e = v_eval(x);
    bool ok = false;
    for (int it = 0; it < options.max_newton; ++it) {
      const double gnorm = e.gradient.norm();
      if (gnorm < 1e-14) {
        ok = true;
        break;
      }
      const Eigen::FullPivLU<Eigen::Matrix3d> lu(e.hessian);
      if (!lu.isInvertible()) break;
      const Vec3 dx = lu.solve(e.gradient);
      double damping = 1.0;
      bool improved = false;
      for (int h = 0; h < 40; ++h, damping *= 0.5) {
        const Vec3 trial = x - damping * dx;
        const VEval te = v_eval(trial);
        if (te.gradient.norm() < gnorm) {
          x = trial;
          e = te;
          improved = true;
          break;
        }
      }
      if (!improved) {
        ok = gnorm < 1e-12;
        break;
      }
    }
    if (!ok || (x.cwiseAbs().array() > w).any()) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const CriticalPoint3D& c) {
      return (c.location - x).norm() < 1e-6;
    });
    if (duplicate) continue;
    CriticalPoint3D cp;
    cp.location = x;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(options.scale * e.hessian);
    cp.hessian_eigenvalues = eig.eigenvalues();
    cp.index = static_cast<int>((cp.hessian_eigenvalues.array() < 0.0).count());
    found.push_back(cp);
  }
  std::sort(found.begin(), found.end(), [](const CriticalPoint3D& a, const CriticalPoint3D& b) {
    return std::make_tuple(a.location.z(), a.location.y(), a.location.x()) <
           std::make_tuple(b.location.z(), b.location.y(), b.location.x());
  });
  return found;
}

Trajectory trace_flow(const Vec3& x0, FlowDirection direction, const TraceOptions& options) {
  if (!(options.t_max > 0.0) || !(options.dt > 0.0)) {
    throw Error(ErrorKind::Usage, "need t_max > 0 and dt > 0");
  }
  const double sign = direction == FlowDirection::Descent ? -1.0 : 1.0;
  auto f = [sign](const Vec3& x) { return Vec3(sign * v_eval(x).gradient); };
  Trajectory tr;
  Vec3 x = x0;
  tr.points.push_back(x);
  tr.values.push_back(v_eval(x).value);
  const double dt = options.dt;
  for (double t = 0.0; t < options.t_max; t += dt) {
    for (const Vec3& c : known_critical_points()) {
      if ((x - c).norm() < options.capture) {
        tr.converged = true;
        tr.limit = c;
        tr.t = t;
        return tr;
      }
    }
    const Vec3 k1 = f(x);
    if (k1.norm() == 0.0) break;
    const Vec3 k2 = f(x + 0.5 * dt * k1);
    const Vec3 k3 = f(x + 0.5 * dt * k2);
    const Vec3 k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double value = v_eval(x).value;
    if (sign * (value - tr.values.back()) <= 0.0) tr.monotone = false;
    tr.points.push_back(x);
    tr.values.push_back(value);
    tr.t = t + dt;
  }
  for (const Vec3& c : known_critical_points()) {
    if ((x - c).norm() < options.capture) {
      tr.converged = true;
      tr.limit = c;
    }
  }
  if (!tr.converged) tr.limit = x;
  return tr;
}

SectionReport saddle_sphere_section(double radius, int samples, const TraceOptions& options) {
  if (!(radius * radius > 3.0) || samples < 1) {
    throw Error(ErrorKind::Domain, "section sphere must lie in the |x|^2 >= 3 regime");
  }
  SectionReport rep;
  rep.radius = radius;
  rep.points.resize(samples);
  rep.limits.resize(samples);
  std::vector<char> ok(samples, 0);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / samples;
    rep.points[i] = Vec3(radius * std::cos(th), radius * std::sin(th), 0.0);
    const Trajectory tr = trace_flow(rep.points[i], FlowDirection::Descent, options);
    rep.limits[i] = tr.limit;
    ok[i] = tr.converged && tr.limit.norm() == 0.0;
  });
  for (int i = 0; i < samples; ++i) {
    if (!ok[i]) {
      throw Error(ErrorKind::Consistency,
                  "section mismatch: sample " + std::to_string(i) + " does not descend to the saddle");
    }
  }
  return rep;
}

}  // namespace shellspec
