#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "utmq/transforms.hpp"

using namespace utmq;

TEST_SUITE_BEGIN("transforms");

TEST_CASE("half-line transform closed cases") {
  const auto u1 = make_half_line("exp", {});
  CHECK(std::abs(fourier_half_line(u1, 0.0) - cx(1.0, 0.0)) < 1e-10);

  const auto u2 = make_half_line("exp", {{"rate", 2.0}});
  // 1/(i + 2) = (2 - i)/5
  CHECK(std::abs(fourier_half_line(u2, 1.0) - cx(0.4, -0.2)) < 1e-10);
  CHECK(std::abs(u2.hat_closed(1.0) - cx(0.4, -0.2)) < 1e-15);
}

TEST_CASE("half-line transform against a fixed-grid oracle") {
  const auto u = make_half_line("poly_exp", {{"c2", 1.0}, {"rate", 1.0}});  // y^2 e^{-y}
  const cx lambda(-0.7, -0.3);
  const cx engine = fourier_half_line(u, lambda, 1e-11);
  const cx brute = oracle::gauss_fixed(
      [&](double y) { return std::exp(-iu * lambda * y) * u(y); }, 0.0, 60.0, 1000);
  CHECK(std::abs(engine - brute) < 1e-9);
  CHECK(std::abs(engine - u.hat_closed(lambda)) < 1e-10);
}

TEST_CASE("half-line transform rejects the upper half-plane") {
  const auto u = make_half_line("exp", {});
  CHECK_THROWS_AS(fourier_half_line(u, cx(0.0, 0.1)), DomainError);
}

TEST_CASE("transform linearity at random lower half-plane points") {
  const auto u = make_half_line("poly_exp", {{"c1", 1.0}, {"rate", 2.0}});
  const auto v = make_half_line("exp", {{"scale", 0.7, }, {"rate", 0.5}});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-6.0, 6.0), im(-3.0, 0.0);
  const double a = 1.4, b = -0.6;
  HalfLineFunction w;
  w.fn = [&, af = u.fn, bf = v.fn](double y) { return a * af(y) + b * bf(y); };
  w.decay = DecayClass::exp_decay;
  w.decay_rate = 0.5;
  w.scale = 2.0;
  w.derivs_at_zero.assign(9, 0.0);
  for (int k = 0; k < 20; ++k) {
    const cx l(re(rng), im(rng));
    const cx lhs = fourier_half_line(w, l, 1e-12);
    const cx rhs = a * fourier_half_line(u, l, 1e-12) + b * fourier_half_line(v, l, 1e-12);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)) + 1e-12);
  }
}

TEST_CASE("sigma tail values and errors") {
  const auto u = make_half_line("exp", {});
  // u(0)/(2i) = -0.5 i
  CHECK(std::abs(sigma_tail(u, 2.0, 1) - cx(0.0, -0.5)) < 1e-15);
  CHECK(sigma_tail(u, 2.0, 0) == cx{});
  CHECK_THROWS_AS(sigma_tail(u, 0.0, 1), DomainError);
}

TEST_CASE("partial-integration tail law") {
  // |uhat - sigma_M| lambda^{M+1} stays bounded as lambda grows
  const auto u = make_half_line("exp", {});
  for (int M : {1, 2, 3}) {
    double bound = 0.0;
    for (double l = 2.0; l <= 100.0; l *= 1.3) {
      for (double sgn : {-1.0, 1.0}) {
        const cx lam(sgn * l, 0.0);
        const cx diff = fourier_half_line(u, lam, 1e-12) - sigma_tail(u, lam, M);
        bound = std::max(bound, std::abs(diff) * std::pow(l, M + 1));
      }
    }
    CHECK(bound < 50.0);
  }
}

TEST_CASE("tail decay rate on a log-log grid") {
  const auto u = make_half_line("exp", {});
  const int M = 3;
  std::vector<double> ls = {10.0, 20.0, 40.0, 80.0};
  std::vector<double> lg;
  for (double l : ls)
    lg.push_back(std::log(std::abs(fourier_half_line(u, l, 1e-13) - sigma_tail(u, l, M))));
  // slope of log diff vs log lambda should be at most -(M+1)
  const double slope = (lg.back() - lg.front()) / (std::log(ls.back()) - std::log(ls.front()));
  CHECK(slope <= -(M + 1) + 0.1);
}

TEST_CASE("stable time transform closed cases") {
  const auto one = make_time_signal("const", {});
  CHECK(std::abs(time_transform_stable(one, 0.0, 3.0) - cx(3.0, 0.0)) < 1e-12);
  // (1 - e^{-2})/2
  CHECK(std::abs(time_transform_stable(one, 2.0, 1.0) - cx(0.43233235838169365, 0.0)) <
        1e-11);
}

TEST_CASE("stable time transform against a closed oscillatory form") {
  const auto s = make_time_signal("sin", {});
  const cx w(1.0, 5.0);
  const double t = 2.0;
  // int_0^t e^{-w(t-tau)} sin(tau) dtau via complex exponentials
  auto closed = [&] {
    const cx a = (std::exp(iu * t) - std::exp(-w * t)) / (w + iu);
    const cx b = (std::exp(-iu * t) - std::exp(-w * t)) / (w - iu);
    return (a - b) / (2.0 * iu);
  }();
  CHECK(std::abs(time_transform_stable(s, w, t) - closed) < 1e-10);
  CHECK(std::abs(s.stable_transform(w, t, t) - closed) < 1e-13);
}

TEST_CASE("stable time transform never overflows for huge real exponents") {
  const auto s = make_time_signal("sin", {{"freq", 2.0}});
  const auto r = make_time_signal("one_minus_exp", {});
  for (double w : {0.0, 1.0, 80.0, 1e3, 1e6}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const cx a = time_transform_stable(s, cx(w, 0.3 * w), t);
      const cx b = time_transform_stable(r, cx(w, 0.0), t);
      CHECK(is_finite(a));
      CHECK(is_finite(b));
    }
  }
}

TEST_CASE("integration-by-parts identity of the stable transform") {
  // E(w,t) = g(t)/w - e^{-wt} g(0)/w - e^{-wt} (g')~(w,t)/w, with the last
  // term integrated directly
  const auto g = make_time_signal("cos", {{"freq", 1.5}});
  const auto gp = g.derivative();
  for (const cx w : {cx(3.0, 0.0), cx(12.0, 7.0), cx(120.0, -40.0)}) {
    if (w.real() < 0.0) continue;
    const double t = 1.2;
    const cx lhs = time_transform_stable(g, w, t, 1e-12);
    const cx Egp = oracle::gauss_fixed(
        [&](double tau) { return (std::exp(-w * (t - tau)) * gp(tau)); }, 0.0, t, 400);
    const cx rhs = g(t) / w - std::exp(-w * t) * g(0.0) / w - Egp / w;
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(g(t))));
  }
}

TEST_CASE("time transform with a fixed horizon") {
  const auto g = make_time_signal("sin", {});
  const cx w(0.0, 9.0);  // pure oscillation, as on the spectral boundary
  const double t = 0.8, T = 2.0;
  const cx engine = time_transform_stable(g, w, t, 1e-12, T);
  const cx brute = oracle::gauss_fixed(
      [&](double tau) { return std::exp(-w * (t - tau)) * g(tau); }, 0.0, T, 2000);
  CHECK(std::abs(engine - brute) < 1e-10);
  CHECK(std::abs(g.stable_transform(w, t, T) - brute) < 1e-11);
}

TEST_CASE("forcing transforms") {
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);

  SpaceTimeFunction zero;
  auto [f0, ft0] = forcing_transforms(zero, d, 1.0, 1.0);
  CHECK(f0 == cx{});
  CHECK(ft0 == cx{});

  // f(y,tau) = e^{-y}: fhat(0,1) = 1 and the stable transform at omega(0)=0
  // integrates 1 over [0,1]
  SpaceTimeFunction f;
  f.terms.push_back({make_half_line("exp", {}), make_time_signal("const", {})});
  auto [fh, ftl] = forcing_transforms(f, d, 0.0, 1.0);
  CHECK(std::abs(fh - cx(1.0, 0.0)) < 1e-10);
  CHECK(std::abs(ftl - cx(1.0, 0.0)) < 1e-10);
}

TEST_CASE("forcing transforms against a tensor fixed-grid oracle") {
  // f(y,tau) = e^{-y^2} cos(tau)
  SpaceTimeFunction f;
  f.terms.push_back({make_half_line("gauss", {}), make_time_signal("cos", {})});
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  const cx lambda(1.0, -1.0);
  const double t = 0.5;
  auto [fh, ftl] = forcing_transforms(f, d, lambda, t, 1e-10);

  const cx w = d.omega(lambda);
  const cx fh_oracle = oracle::gauss_fixed(
      [&](double y) { return std::exp(-iu * lambda * y) * std::exp(-y * y); }, 0.0, 12.0,
      400) * std::cos(t);
  const cx ft_oracle = oracle::gauss_fixed_2d(
      [&](double tau, double y) {
        return std::exp(-w * (t - tau)) * std::cos(tau) *
               std::exp(-iu * lambda * y) * std::exp(-y * y);
      },
      0.0, t, 0.0, 12.0, 120, 400);
  CHECK(std::abs(fh - fh_oracle) < 1e-8);
  CHECK(std::abs(ftl - ft_oracle) < 1e-8);
}

TEST_CASE("forcing decay matches the quintic tail law") {
  // |e^{-wt} ftilde| lambda^5 bounded for lambda real growing
  SpaceTimeFunction f;
  f.terms.push_back({make_half_line("exp", {}), make_time_signal("cos", {})});
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  double bound = 0.0;
  for (double l = 4.0; l <= 64.0; l *= 2.0) {
    auto [fh, ftl] = forcing_transforms(f, d, l, 0.7, 1e-12);
    (void)fh;
    bound = std::max(bound, std::abs(ftl) * std::pow(l, 5));
  }
  CHECK(bound < 100.0);
}

TEST_SUITE_END();
