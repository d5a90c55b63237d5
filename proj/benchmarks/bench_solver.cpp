#include <benchmark/benchmark.h>

#include "utmq/solver.hpp"

using namespace utmq;

namespace {
ProblemData demo_problem() {
  ProblemData data;
  data.family = Family::CH_PLUS;
  data.alpha = 1.0;
  data.beta = 1.0;
  data.u0 = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});
  data.g0 = make_time_signal("one_minus_exp", {});
  data.g1 = make_time_signal("zero", {});
  return data;
}
}  // namespace

static void SolveChRayPoint(benchmark::State& state) {
  const ProblemData data = demo_problem();
  EvalRequest req;
  req.points = {{1.0, 0.5}};
  SolveOptions opt;
  opt.threads = 1;
  for (auto _ : state) {
    auto field = solve(data, req, opt);
    benchmark::DoNotOptimize(field.values[0]);
  }
}
BENCHMARK(SolveChRayPoint);

static void SolveChBoundaryPoint(benchmark::State& state) {
  const ProblemData data = demo_problem();
  EvalRequest req;
  req.points = {{1.0, 0.5}};
  SolveOptions opt;
  opt.threads = 1;
  opt.representation = Representation::boundary;
  for (auto _ : state) {
    auto field = solve(data, req, opt);
    benchmark::DoNotOptimize(field.values[0]);
  }
}
BENCHMARK(SolveChBoundaryPoint);
