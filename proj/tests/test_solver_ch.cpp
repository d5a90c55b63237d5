#include <doctest.h>

#include <cmath>
#include <random>

#include "utmq/fd.hpp"
#include "utmq/solver.hpp"

using namespace utmq;

TEST_SUITE_BEGIN("ch");

namespace {

ProblemData compatible_problem(double alpha, double beta) {
  ProblemData data;
  data.family = Family::CH_PLUS;
  data.alpha = alpha;
  data.beta = beta;
  data.u0 = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});
  data.g0 = make_time_signal("one_minus_exp", {});
  data.g1 = make_time_signal("zero", {});
  return data;
}

ProblemData mixed_problem() {
  ProblemData data = compatible_problem(1.0, 1.0);
  data.g1 = make_time_signal("sin", {{"scale", 0.3}});
  SeparableTerm term{make_half_line("exp", {}), make_time_signal("cos", {})};
  data.f.terms.push_back(term);
  return data;
}

}  // namespace

TEST_CASE("zero data solves to zero in both representations") {
  ProblemData data = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  EvalRequest req;
  req.points = {{0.7, 0.4}};
  req.deriv_orders = {{0, 0}, {1, 0}};
  for (auto rep : {Representation::ray, Representation::boundary}) {
    SolveOptions opt;
    opt.representation = rep;
    const SolutionField f = solve(data, req, opt);
    for (const cx& v : f.values) CHECK(std::abs(v) < 1e-14);
  }
}

TEST_CASE("boundary value of the step response approaches one") {
  // constant boundary datum: U(0, t) = 1 exactly, approached as x -> 0+
  ProblemData data = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  data.g0 = make_time_signal("const", {});
  EvalRequest req;
  for (double x : {0.1, 0.03, 0.01}) req.points.push_back({x, 1.0});
  const SolutionField f = solve(data, req);
  double prev = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double err = std::abs(f.at(k) - 1.0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("ray and boundary representations agree") {
  const ProblemData data = mixed_problem();
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> xr(0.3, 2.5), tr(0.3, 1.5);
  EvalRequest req;
  for (int k = 0; k < 10; ++k) req.points.push_back({xr(rng), tr(rng)});
  SolveOptions ray, bnd;
  ray.representation = Representation::ray;
  bnd.representation = Representation::boundary;
  const SolutionField fr = solve(data, req, ray);
  const SolutionField fb = solve(data, req, bnd);
  for (std::size_t k = 0; k < req.points.size(); ++k)
    CHECK(std::abs(fr.at(k) - fb.at(k)) < 1e-7);
}

TEST_CASE("field matches the reference solver") {
  const ProblemData data = compatible_problem(1.0, 2.0);
  EvalRequest req;
  for (double t : {0.25, 0.5, 1.0})
    for (double x : {0.5, 1.0, 2.0, 3.0}) req.points.push_back({x, t});
  const SolutionField utm = solve(data, req);
  FDGrid grid;
  grid.L = 40.0;
  grid.nx = 6400;
  grid.t_end = 1.0;
  grid.dt = 0.25 * grid.h();
  const FDField fd = fd_solve(data, grid);
  const CompareTable table =
      compare({utm.values.begin(), utm.values.end()}, req.points, fd);
  CHECK(table.linf_rel <= 1e-3);
}

TEST_CASE("boundary traces recovered with their Richardson limits") {
  const ProblemData data = compatible_problem(1.0, 1.0);
  const std::vector<double> eps = {0.1, 0.03, 0.01};
  EvalRequest req;
  for (double e : eps) req.points.push_back({e, 1.0});
  req.deriv_orders = {{0, 0}, {1, 0}};
  const SolutionField f = solve(data, req);
  auto extrapolate = [&](std::size_t order) {
    double v = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      double li = 1.0;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) li *= (0.0 - eps[j]) / (eps[i] - eps[j]);
      v += li * f.at(i, order).real();
    }
    return v;
  };
  double prev0 = 1e300, prev1 = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double e0 = std::abs(f.at(k, 0) - data.g0(1.0));
    const double e1 = std::abs(f.at(k, 1) - data.g1(1.0));
    CHECK(e0 < prev0);
    CHECK(e1 < prev1);
    prev0 = e0;
    prev1 = e1;
  }
  CHECK(std::abs(extrapolate(0) - data.g0(1.0)) <= 1e-3 * (1.0 + std::abs(data.g0(1.0))));
  CHECK(std::abs(extrapolate(1) - data.g1(1.0)) <= 1e-3 * (1.0 + std::abs(data.g1(1.0))));
}

TEST_CASE("initial datum recovered as t shrinks") {
  const ProblemData data = compatible_problem(1.0, 1.0);
  // probe where the initial time derivative vanishes so the sweep reflects
  // reconstruction rather than honest evolution
  const double x0 = [&] {
    // alpha u0'' - beta u0'''' = (4x - 10) e^{-x} + (2 - 4x + x^2) ... for
    // this preset the root sits near x = 2.5; locate it numerically
    auto ut0 = [&](double x) {
      const double e = std::exp(-x);
      const double u2 = (2.0 - 4.0 * x + x * x) * e;
      const double u4 = (12.0 - 8.0 * x + x * x) * e;
      return data.alpha * u2 - data.beta * u4;
    };
    double lo = 1.0, hi = 4.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ut0(lo) * ut0(mid) <= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  EvalRequest req;
  for (double t : {0.1, 0.03, 0.01}) req.points.push_back({x0, t});
  const SolutionField f = solve(data, req);
  const double target = data.u0(x0);
  double prev = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double err = std::abs(f.at(k) - target);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-3 * (1.0 + std::abs(target)));
}

TEST_CASE("solution is linear in the data") {
  ProblemData d1 = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  d1.u0 = make_half_line("exp", {});
  ProblemData d2 = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  d2.g0 = make_time_signal("sin", {});
  ProblemData sum = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  sum.u0 = d1.u0;
  sum.g0 = d2.g0;
  EvalRequest req;
  req.points = {{0.5, 0.3}, {1.2, 0.9}, {2.4, 1.7}, {0.8, 1.1}, {3.0, 0.6}};
  const SolutionField f1 = solve(d1, req);
  const SolutionField f2 = solve(d2, req);
  const SolutionField fs = solve(sum, req);
  for (std::size_t k = 0; k < req.points.size(); ++k)
    CHECK(std::abs(fs.at(k) - f1.at(k) - f2.at(k)) < 1e-8);
}

TEST_CASE("field satisfies the equation pointwise") {
  const ProblemData data = mixed_problem();
  EvalRequest req;
  req.points = {{0.9, 0.5}, {1.8, 1.1}};
  req.deriv_orders = {{0, 1}, {2, 0}, {4, 0}, {0, 0}};
  SolveOptions opt;
  opt.tol = 1e-11;
  const SolutionField f = solve(data, req, opt);
  for (std::size_t k = 0; k < req.points.size(); ++k) {
    const auto [x, t] = req.points[k];
    const cx resid = f.at(k, 0) - data.alpha * f.at(k, 1) + data.beta * f.at(k, 2) -
                     data.f(x, t);
    const double scale =
        1.0 + std::abs(f.at(k, 0)) + std::abs(f.at(k, 1)) + std::abs(f.at(k, 2));
    CHECK(std::abs(resid) <= 1e-6 * scale);
  }
}

TEST_CASE("derivatives match finite differences of the field") {
  const ProblemData data = compatible_problem(1.0, 1.0);
  const double x = 1.1, t = 0.8, h = 1e-3;
  EvalRequest req;
  req.points = {{x, t}, {x + h, t}, {x - h, t}, {x, t + h}, {x, t - h}};
  req.deriv_orders = {{0, 0}, {1, 0}, {0, 1}};
  SolveOptions opt;
  opt.tol = 1e-11;
  const SolutionField f = solve(data, req, opt);
  const double ux_fd = ((f.at(1, 0) - f.at(2, 0)) / (2 * h)).real();
  const double ut_fd = ((f.at(3, 0) - f.at(4, 0)) / (2 * h)).real();
  CHECK(f.at(0, 1).real() == doctest::Approx(ux_fd).epsilon(1e-4));
  CHECK(f.at(0, 2).real() == doctest::Approx(ut_fd).epsilon(1e-4));
}

TEST_CASE("spatial decay far from the boundary") {
  ProblemData data = zero_problem(Family::CH_PLUS, 1.0, 1.0);
  data.u0 = make_half_line("exp", {});
  data.g0 = make_time_signal("const", {});
  EvalRequest req;
  req.points = {{20.0, 0.5}};
  req.deriv_orders = {{0, 0}, {1, 0}, {2, 0}};
  SolveOptions opt;
  opt.tol = 1e-12;
  const SolutionField f = solve(data, req, opt);
  for (std::size_t o = 0; o < 3; ++o)
    CHECK(400.0 * std::abs(f.at(0, o)) < 1e-6);
}

TEST_CASE("fixed-horizon representation is horizon independent") {
  const ProblemData data = compatible_problem(1.0, 1.0);
  const double x = 0.9, t = 0.7;
  std::vector<cx> vals;
  for (double T : {t + 0.5, t + 1.0, 2.0 * t}) {
    EvalRequest req;
    req.points = {{x, t}};
    req.ehrenpreis_T = T;
    vals.push_back(solve(data, req).at(0));
  }
  CHECK(std::abs(vals[0] - vals[1]) < 1e-8);
  CHECK(std::abs(vals[0] - vals[2]) < 1e-8);
  EvalRequest req;
  req.points = {{x, t}};
  CHECK(std::abs(solve(data, req).at(0) - vals[0]) < 1e-7);
}

TEST_CASE("vanishing diffusion reduces to the quartic family") {
  ProblemData data = zero_problem(Family::CH_PLUS, 0.0, 1.0);
  data.u0 = make_half_line("exp", {});
  ProblemData bih = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  bih.u0 = data.u0;
  EvalRequest req;
  req.points = {{1.0, 0.4}};
  CHECK(std::abs(solve(data, req).at(0) - solve(bih, req).at(0)) < 1e-12);
}

TEST_CASE("backward family: boundary datum recovered") {
  ProblemData data = zero_problem(Family::CH_MINUS, 1.0, 1.0);
  data.g0 = make_time_signal("const", {});
  EvalRequest req;
  for (double x : {0.1, 0.03, 0.01}) req.points.push_back({x, 1.0});
  const SolutionField f = solve(data, req);
  double prev = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double err = std::abs(f.at(k) - 1.0);
    CHECK(err < prev);
    CHECK(std::abs(f.at(k).imag()) < 1e-9);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("backward family rejects the ray representation") {
  ProblemData data = zero_problem(Family::CH_MINUS, 1.0, 1.0);
  data.u0 = make_half_line("exp", {});
  EvalRequest req;
  req.points = {{1.0, 0.5}};
  SolveOptions opt;
  opt.representation = Representation::ray;
  CHECK_THROWS_AS(solve(data, req, opt), DomainError);
}

TEST_CASE("backward family initial datum recovered") {
  ProblemData data = zero_problem(Family::CH_MINUS, 1.0, 1.0);
  data.u0 = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});
  EvalRequest req;
  for (double t : {0.1, 0.03, 0.01}) req.points.push_back({2.0, t});
  const SolutionField f = solve(data, req);
  const double target = data.u0(2.0);
  double prev = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double err = std::abs(f.at(k) - target);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-2 * (1.0 + std::abs(target)));
}

TEST_SUITE_END();
