#include <doctest.h>

#include <cmath>

#include "utmq/fd.hpp"
#include "utmq/solver.hpp"

using namespace utmq;

TEST_SUITE_BEGIN("biharmonic");

namespace {

ProblemData decay_problem() {
  ProblemData data = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  data.u0 = make_half_line("exp", {});
  return data;
}

ProblemData mixed_problem() {
  ProblemData data = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  data.u0 = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});
  data.g0 = make_time_signal("one_minus_exp", {});
  data.g1 = make_time_signal("sin", {{"scale", 0.3}});
  return data;
}

}  // namespace

TEST_CASE("zero data solves to zero") {
  ProblemData data = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  EvalRequest req;
  req.points = {{0.5, 0.2}, {2.0, 1.0}};
  req.deriv_orders = {{0, 0}, {1, 0}, {0, 1}};
  const SolutionField f = solve(data, req);
  for (const cx& v : f.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("request validation") {
  ProblemData data = decay_problem();
  EvalRequest bad1;
  bad1.points = {{0.0, 1.0}};
  CHECK_THROWS_AS(solve(data, bad1), DomainError);
  EvalRequest bad2;
  bad2.points = {{1.0, 1.0}};
  bad2.deriv_orders = {{9, 0}};
  CHECK_THROWS_AS(solve(data, bad2), DomainError);
  EvalRequest bad3;
  bad3.points = {{1.0, 1.0}};
  bad3.ehrenpreis_T = 0.5;
  CHECK_THROWS_AS(solve(data, bad3), DomainError);
}

TEST_CASE("heat flow of a decaying datum matches the reference solver") {
  const ProblemData data = decay_problem();
  EvalRequest req;
  req.points = {{1.0, 0.25}, {2.0, 0.25}, {0.75, 0.5}, {3.0, 0.5}};
  const SolutionField utm = solve(data, req);

  FDGrid grid;
  grid.L = 40.0;
  grid.nx = 6400;
  grid.t_end = 0.5;
  grid.dt = 0.25 * grid.h();
  const FDField fd = fd_solve(data, grid);
  const CompareTable table =
      compare({utm.values.begin(), utm.values.end()}, req.points, fd);
  CHECK(table.linf_rel <= 1e-3);
  for (const cx& v : utm.values) CHECK(std::abs(v.imag()) < 1e-8);
}

TEST_CASE("initial datum recovered as t shrinks") {
  const ProblemData data = decay_problem();
  EvalRequest req;
  for (double t : {0.1, 0.05, 0.025}) req.points.push_back({1.0, t});
  const SolutionField f = solve(data, req);
  const double target = data.u0(1.0);
  double prev = 1e300;
  for (std::size_t k = 0; k < 3; ++k) {
    const double err = std::abs(f.at(k) - target);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("boundary data recovered as x shrinks") {
  const ProblemData data = mixed_problem();
  const std::vector<double> eps = {0.1, 0.03, 0.01};
  EvalRequest req;
  for (double e : eps) req.points.push_back({e, 1.0});
  req.deriv_orders = {{0, 0}, {1, 0}};
  const SolutionField f = solve(data, req);
  // the traces converge linearly in x when the next trace is nonzero, so the
  // sequence is extrapolated to 0 through the quadratic fit
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

TEST_CASE("fixed-horizon representation is horizon independent") {
  const ProblemData data = mixed_problem();
  const double x = 0.8, t = 0.6;
  std::vector<cx> vals;
  for (double T : {t + 0.5, t + 1.0, 2.0 * t}) {
    EvalRequest req;
    req.points = {{x, t}};
    req.ehrenpreis_T = T;
    vals.push_back(solve(data, req).at(0));
  }
  CHECK(std::abs(vals[0] - vals[1]) < 1e-8);
  CHECK(std::abs(vals[0] - vals[2]) < 1e-8);
  // and it agrees with the tracking-horizon evaluation
  EvalRequest req;
  req.points = {{x, t}};
  CHECK(std::abs(solve(data, req).at(0) - vals[0]) < 1e-7);
}

TEST_CASE("derivatives match finite differences of the field") {
  const ProblemData data = mixed_problem();
  const double x = 1.2, t = 0.7, h = 1e-3;
  EvalRequest req;
  req.points = {{x, t},     {x + h, t}, {x - h, t}, {x, t + h},
                {x, t - h}, {x + 2 * h, t}, {x - 2 * h, t}};
  req.deriv_orders = {{0, 0}, {1, 0}, {2, 0}, {0, 1}};
  SolveOptions opt;
  opt.tol = 1e-11;
  const SolutionField f = solve(data, req, opt);
  const double ux_fd = ((f.at(1, 0) - f.at(2, 0)) / (2 * h)).real();
  const double uxx_fd =
      ((f.at(1, 0) - 2.0 * f.at(0, 0) + f.at(2, 0)) / (h * h)).real();
  const double ut_fd = ((f.at(3, 0) - f.at(4, 0)) / (2 * h)).real();
  CHECK(f.at(0, 1).real() == doctest::Approx(ux_fd).epsilon(1e-4));
  CHECK(f.at(0, 2).real() == doctest::Approx(uxx_fd).epsilon(1e-4));
  CHECK(f.at(0, 3).real() == doctest::Approx(ut_fd).epsilon(1e-4));
}

TEST_CASE("field satisfies the equation pointwise") {
  ProblemData data = mixed_problem();
  SeparableTerm term{make_half_line("exp", {{"rate", 1.5}}),
                     make_time_signal("cos", {{"freq", 2.0}})};
  data.f.terms.push_back(term);
  EvalRequest req;
  req.points = {{0.8, 0.4}, {1.7, 0.9}, {2.5, 0.3}};
  req.deriv_orders = {{0, 1}, {4, 0}, {0, 0}};
  SolveOptions opt;
  opt.tol = 1e-11;
  const SolutionField f = solve(data, req, opt);
  for (std::size_t k = 0; k < req.points.size(); ++k) {
    const auto [x, t] = req.points[k];
    const cx resid = f.at(k, 0) + f.at(k, 1) - data.f(x, t);
    const double scale = std::abs(f.at(k, 2)) + std::abs(f.at(k, 1)) + 1.0;
    CHECK(std::abs(resid) <= 1e-6 * scale);
  }
}

TEST_CASE("solution is linear in the data") {
  const ProblemData d1 = decay_problem();
  const ProblemData d2 = [&] {
    ProblemData d = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
    d.g0 = make_time_signal("sin", {});
    return d;
  }();
  ProblemData sum = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  sum.u0 = d1.u0;
  sum.g0 = d2.g0;

  EvalRequest req;
  req.points = {{0.6, 0.3}, {1.4, 0.8}, {2.2, 1.3}, {0.9, 1.9}, {3.1, 0.45}};
  const SolutionField f1 = solve(d1, req);
  const SolutionField f2 = solve(d2, req);
  const SolutionField fs = solve(sum, req);
  for (std::size_t k = 0; k < req.points.size(); ++k)
    CHECK(std::abs(fs.at(k) - f1.at(k) - f2.at(k)) < 1e-8);
}

TEST_CASE("general beta reduces to the normalized kernel") {
  ProblemData data = zero_problem(Family::BIHARMONIC, 0.0, 3.0);
  data.u0 = make_half_line("exp", {});
  EvalRequest req;
  req.points = {{1.0, 0.4}};
  req.deriv_orders = {{0, 0}, {1, 0}};
  const SolutionField f = solve(data, req);

  // u(x,t) for u_t = -beta u_xxxx equals w(x beta^{-1/4}, t) for the
  // normalized problem with the rescaled datum
  ProblemData norm = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  const double s = std::pow(3.0, 0.25);
  norm.u0 = make_half_line("exp", {{"rate", s}});
  EvalRequest nreq;
  nreq.points = {{1.0 / s, 0.4}};
  nreq.deriv_orders = {{0, 0}, {1, 0}};
  const SolutionField g = solve(norm, nreq);
  CHECK(std::abs(f.at(0, 0) - g.at(0, 0)) < 1e-9);
  CHECK(std::abs(f.at(0, 1) - g.at(0, 1) / s) < 1e-9);
}

TEST_CASE("incompatible corner data raise a warning near the corner") {
  const ProblemData data = decay_problem();  // u0(0) = 1 but g0 = 0
  EvalRequest req;
  req.points = {{0.005, 0.005}};
  const SolutionField f = solve(data, req);
  REQUIRE(!f.warnings.empty());
  CHECK(f.warnings.front().find("corner") != std::string::npos);
}

TEST_CASE("forced problem against the reference solver") {
  ProblemData data = zero_problem(Family::BIHARMONIC, 0.0, 1.0);
  data.u0 = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});
  SeparableTerm term{make_half_line("exp", {{"rate", 2.0}}),
                     make_time_signal("const", {{"value", 0.5}})};
  data.f.terms.push_back(term);
  EvalRequest req;
  req.points = {{1.0, 0.25}, {2.0, 0.5}, {0.5, 0.125}};
  const SolutionField utm = solve(data, req);

  FDGrid grid;
  grid.L = 40.0;
  grid.nx = 6400;
  grid.t_end = 0.5;
  grid.dt = 0.25 * grid.h();
  const FDField fd = fd_solve(data, grid);
  const CompareTable table =
      compare({utm.values.begin(), utm.values.end()}, req.points, fd);
  CHECK(table.linf_rel <= 1e-3);
}

TEST_SUITE_END();
