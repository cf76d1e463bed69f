#include <benchmark/benchmark.h>

#include <cmath>

#include "gaussot/gaussot.hpp"

using namespace gaussot;

namespace {

PsdMatrix spd(Index d, NormalStream& g) {
  const Matrix a = g.matrix(d, d);
  return PsdMatrix(Matrix(a * a.transpose() + 0.1 * Matrix::Identity(d, d)));
}

// A A^T on the 1/16 lattice, exactly singular.
PsdMatrix singular(Index d, Index rank, NormalStream& g) {
  Matrix a = g.matrix(d, rank);
  a = (16.0 * a).array().round() / 16.0;
  return PsdMatrix(Matrix(a * a.transpose()));
}

void BM_VClosedForm(benchmark::State& state) {
  const Index d = state.range(0);
  NormalStream g(1);
  const PsdMatrix a = spd(d, g), b = spd(d, g);
  for (auto _ : state) benchmark::DoNotOptimize(v_closed_form(a, b));
}
BENCHMARK(BM_VClosedForm)->Arg(2)->Arg(4)->Arg(8);

void BM_FrameDirect(benchmark::State& state) {
  const Index d = state.range(0);
  NormalStream g(2);
  const PsdMatrix a = spd(d, g), b = spd(d, g);
  for (auto _ : state) benchmark::DoNotOptimize(shared_correlation_frame(a, b));
}
BENCHMARK(BM_FrameDirect)->Arg(2)->Arg(4)->Arg(8);

void BM_FrameContinuation(benchmark::State& state) {
  const Index d = state.range(0);
  NormalStream g(3);
  const PsdMatrix a = singular(d, d / 2, g), b = singular(d, d - 1, g);
  for (auto _ : state) benchmark::DoNotOptimize(shared_correlation_frame(a, b));
}
BENCHMARK(BM_FrameContinuation)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SampleCoupling(benchmark::State& state) {
  NormalStream g(4);
  const GaussianLaw mu = GaussianLaw::centered(spd(4, g));
  const GaussianLaw nu = GaussianLaw::centered(spd(4, g));
  const OptimalCoupling c = optimal_coupling(mu, nu);
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_coupling(c, mu, nu, static_cast<std::size_t>(state.range(0)), 7));
}
BENCHMARK(BM_SampleCoupling)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Assignment(benchmark::State& state) {
  const Index n = state.range(0);
  NormalStream g(5);
  const Matrix x = g.matrix(n, 2), y = g.matrix(n, 2);
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) cost(i, j) = (x.row(i) - y.row(j)).squaredNorm();
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost));
}
BENCHMARK(BM_Assignment)->Arg(100)->Arg(200)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BruteForce2d(benchmark::State& state) {
  NormalStream g(6);
  const PsdMatrix a = spd(2, g), b = spd(2, g);
  GridConfig cfg;
  cfg.resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(theta_brute_force(a, b, cfg));
}
BENCHMARK(BM_BruteForce2d)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
