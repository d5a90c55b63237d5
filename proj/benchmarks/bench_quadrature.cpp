#include <benchmark/benchmark.h>

#include "utmq/quadrature.hpp"

using namespace utmq;

static void GaussKronrodRealLine(benchmark::State& state) {
  const Dispersion d(Family::CH_PLUS, 1.0, 1.0);
  const double x = 1.0;
  for (auto _ : state) {
    auto rep = integrate_real_line(
        [&](cx l) { return stable_exp(iu * l * x - d.omega(l) * 0.5) / (iu * l + 1.0); },
        1e-9, 0.5, d, 1, x);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(GaussKronrodRealLine);

static void BoundaryCurveQuadrature(benchmark::State& state) {
  const Dispersion d(Family::CH_PLUS, 1.0, 1.0);
  const ContourPath boundary = domega_boundary(d, 8.0);
  QuadOptions opt;
  opt.tol = 1e-9;
  opt.osc.x_freq = 1.0;
  for (auto _ : state) {
    auto rep = integrate_path(
        [&](cx l) { return stable_exp(iu * l * 1.0) / (1.0 + l * l * l * l); }, boundary,
        opt);
    benchmark::DoNotOptimize(rep.value);
  }
}
BENCHMARK(BoundaryCurveQuadrature);

BENCHMARK_MAIN();
