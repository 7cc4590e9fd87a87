#include <benchmark/benchmark.h>

#include "widthlab/finite_widths.hpp"
#include "widthlab/kernel.hpp"
#include "widthlab/mesh.hpp"
#include "widthlab/packing.hpp"
#include "widthlab/quadrature.hpp"
#include "widthlab/random.hpp"

using namespace widthlab;

namespace {

Manifold manifold_for(int64_t id) { return make_manifold(id == 0 ? "circle" : id == 1 ? "torus" : "sphere", {}); }

void BM_Synthesize(benchmark::State& state) {
  const Manifold m = manifold_for(state.range(0));
  const double lambda = static_cast<double>(state.range(1));
  const BasisPtr basis = spectral_data(m, lambda);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, lambda));
  CounterRng rng(1);
  const Eigen::VectorXd c = rng.normal_vector(static_cast<Eigen::Index>(basis->size()));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(*basis, q, c));
  state.counters["modes"] = static_cast<double>(basis->size());
  state.counters["nodes"] = static_cast<double>(q.size());
}
BENCHMARK(BM_Synthesize)->Args({0, 1 << 20})->Args({1, 4096})->Args({1, 65536})->Args({2, 1024})->Args({2, 8192})
    ->Unit(benchmark::kMillisecond);

void BM_KernelRow(benchmark::State& state) {
  const Manifold m = manifold_for(state.range(0));
  const FilterFunction F = make_filter(1.0, 1.0, 2.0, 0, 1e-6);
  const double t = 1.0 / static_cast<double>(state.range(1));
  const double cut = F.lambda_tail() / (t * t);
  const KernelJob job(spectral_data(m, cut * 1.0001), F, t);
  const Quadrature q = build_quadrature(m, resolution_for_band(m, cut));
  const Point x = m.kind() == ManifoldKind::Sphere ? sphere_point(0.7, 0.2) : torus_point(0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_row(job, x, q));
  state.counters["modes"] = static_cast<double>(job.mode_count());
}
BENCHMARK(BM_KernelRow)->Args({0, 64})->Args({1, 8})->Args({2, 4})->Unit(benchmark::kMillisecond);

void BM_WidthOptimizer(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const FiniteBallProblem pr{m, m / 2, LpIndex::parse("inf"), LpIndex::parse("1"), WidthKind::Kolmogorov};
  for (auto _ : state) benchmark::DoNotOptimize(kolmogorov_numeric(pr, {}, 7));
}
BENCHMARK(BM_WidthOptimizer)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Lanczos(benchmark::State& state) {
  const MeshOperators ops = cotan_laplacian(icosphere(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_eigs(ops, static_cast<int>(state.range(1)), 1));
  state.counters["vertices"] = static_cast<double>(ops.mass.size());
}
BENCHMARK(BM_Lanczos)->Args({3, 16})->Args({3, 48})->Args({4, 48})->Unit(benchmark::kMillisecond);

void BM_GreedyPacking(benchmark::State& state) {
  const Manifold m = make_manifold("sphere", {});
  const int N = static_cast<int>(state.range(0));
  const Quadrature q = build_quadrature(m, {16, 32});
  const CandidateSet c = default_candidates(q, packing_radius(m, N));
  for (auto _ : state) benchmark::DoNotOptimize(greedy_packing(m, N, c));
  state.counters["candidates"] = static_cast<double>(c.points.size());
}
BENCHMARK(BM_GreedyPacking)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
