#include "shellspec/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shellspec/error.hpp"
#include "shellspec/mesh.hpp"
#include "shellspec/parallel.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"

namespace shellspec {

std::vector<CounterexampleRow> counterexample_scan(double alpha, std::span<const double> k_values,
                                                   const CounterexampleOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, "alpha must lie in (0, 1)");
  for (double k : k_values) {
    if (!(k > 1.0)) throw Error(ErrorKind::Domain, "every k must exceed 1");
  }
  constexpr double pi = std::numbers::pi;
  std::vector<CounterexampleRow> rows(k_values.size());
  parallel_for(k_values.size(), [&](std::size_t i) {
    CounterexampleRow& row = rows[i];
    const double k = k_values[i];
    row.k = k;
    row.beta = (4.0 + 4.0 * k) / (2.0 * pi);
    row.lambda_rect = pi * pi / 4.0 * (1.0 + 1.0 / (k * k));

    ShellProblem shell;
    shell.dim = 2;
    shell.alpha = alpha;
    shell.beta = row.beta;
    shell.inner = options.bc;
    shell.outer = options.bc;
    row.lambda_shell = smallest_eigenvalue(shell, 1e-12).lambda;

    try {
      const int scale = static_cast<int>(std::ceil(k));
      const int n_theta = (options.base_theta * scale + 7) / 8 * 8;
      // Geometric layers with radial steps at most four angular steps keep
      // the aspect ratio bounded as the rectangle grows.
      const double spread = std::log(std::hypot(1.0, k) / alpha);
      const double dtheta = 2.0 * pi / n_theta;
      const int n_r = std::max(options.n_r, static_cast<int>(std::ceil(spread / (4.0 * dtheta))));
      MeshOptions mesh_options;
      mesh_options.geometric = true;
      const TriMesh mesh = build_transfinite_mesh(domains::rectangle_minus_disk(k, alpha), n_theta,
                                                  n_r, mesh_options);
      row.max_aspect = mesh_quality(mesh).max_aspect;
      const RichardsonResult r =
          richardson_estimate(mesh, options.bc, options.bc, options.levels, options.eigen);
      row.lambda_domain = r.lambda;
      row.error_bar = r.error_bar;
      row.order = r.order;
      if (!r.reliable) row.flag = r.warning;
      row.reversed = row.lambda_domain - row.error_bar > row.lambda_shell;
    } catch (const Error& e) {
      row.flag = e.what();
      row.reversed = false;
    }
  });
  return rows;
}

std::optional<double> first_reversed(const std::vector<CounterexampleRow>& rows) {
  for (const auto& r : rows) {
    if (r.reversed) return r.k;
  }
  return std::nullopt;
}

}  // namespace shellspec
