#include <benchmark/benchmark.h>

#include "qplab/cocycle.hpp"
#include "qplab/dynamics.hpp"
#include "qplab/spectral.hpp"

using namespace qplab;

namespace {

PotentialSpec amo() {
  return PotentialSpec::almost_mathieu(2.0, BigFloat::golden_mean(256),
                                       BigFloat(0.0, 256));
}

void BM_cocycle_product(benchmark::State& state) {
  PotentialSpec g = amo();
  const long long span = state.range(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(product(g, 0.5, 0, span).log_norm());
  state.SetItemsProcessed(state.iterations() * span);
}
BENCHMARK(BM_cocycle_product)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_lyapunov(benchmark::State& state) {
  PotentialSpec g = amo();
  const long long n = state.range(0);
  auto base = default_base_points(n, 16);
  for (auto _ : state)
    benchmark::DoNotOptimize(lyapunov_estimate(g, 0.5, n, base).value);
}
BENCHMARK(BM_lyapunov)->Arg(1000)->Arg(10000);

void BM_eigendecompose(benchmark::State& state) {
  PotentialSpec g = amo();
  Truncation t = build_truncation(g, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(t).residual_max);
}
BENCHMARK(BM_eigendecompose)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_amplitude_row(benchmark::State& state) {
  PotentialSpec g = amo();
  EigenSystem sys = eigendecompose(build_truncation(g, state.range(0)));
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(amplitude_row(sys, 0, t).squaredNorm());
    t += 1.0;
  }
}
BENCHMARK(BM_amplitude_row)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
