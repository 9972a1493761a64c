// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "shellspec/convex_geometry.hpp"
#include "shellspec/fem_eig.hpp"
#include "shellspec/mesh.hpp"
#include "shellspec/shell_radial.hpp"
#include "shellspec/star_domain.hpp"

using namespace shellspec;

namespace {

const TriMesh& bench_mesh() {
  static const TriMesh mesh =
      refine(refine(build_transfinite_mesh(domains::eccentric_annulus(1.0, 2.0, 0.3), 64, 8)));
  return mesh;
}

void BM_Assemble(benchmark::State& state) {
  const auto bc = BoundaryCondition::robin(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(bench_mesh(), bc, bc));
}

void BM_AssembleSerial(benchmark::State& state) {
  const auto bc = BoundaryCondition::robin(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(bench_mesh(), bc, bc));
}

SteinerOptions steiner_options() {
  SteinerOptions o;
  o.samples = 200'000;
  return o;
}

void BM_Steiner(benchmark::State& state) {
  const auto cube = ConvexBody3D::cube(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(steiner_monte_carlo(cube, steiner_options()));
}

void BM_SteinerSerial(benchmark::State& state) {
  const auto cube = ConvexBody3D::cube(1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(steiner_monte_carlo_serial(cube, steiner_options()));
}

const std::vector<double> kGrid{1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.0};

void BM_MonotonicityScan(benchmark::State& state) {
  MonotonicitySweep sweep;
  for (auto _ : state) benchmark::DoNotOptimize(monotonicity_scan(sweep, kGrid, 1e-10));
}

void BM_MonotonicityScanSerial(benchmark::State& state) {
  MonotonicitySweep sweep;
  for (auto _ : state) benchmark::DoNotOptimize(monotonicity_scan_serial(sweep, kGrid, 1e-10));
}

}  // namespace

BENCHMARK(BM_Assemble)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Steiner)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SteinerSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonotonicityScan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonotonicityScanSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
