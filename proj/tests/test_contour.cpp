#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "utmq/contour.hpp"
#include "utmq/quadrature.hpp"
#include "utmq/transforms.hpp"

using namespace utmq;

TEST_SUITE_BEGIN("contour");

TEST_CASE("sector boundary geometry and decay certificates") {
  auto [g1, g2] = gamma_biharmonic();
  // 2 e^{i pi/8} lies on the outgoing ray of the second sector boundary
  const cx probe = 2.0 * std::polar(1.0, pi / 8.0);
  bool found = false;
  for (const auto& s : g2.segments)
    if (s.kind == SegKind::Ray && std::abs(s.point(2.0) - probe) < 1e-14) found = true;
  CHECK(found);
  // Re omega vanishes along the pi/8 direction
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  CHECK(std::abs(d.omega(std::polar(1.0, pi / 8.0)).real()) < 1e-15);
  CHECK(g1.min_decay_sigma() >= std::sin(pi / 8.0) - 1e-12);
  CHECK(g2.min_decay_sigma() >= std::sin(pi / 8.0) - 1e-12);
}

TEST_CASE("sector orientation: winding of the closed truncated sector") {
  // both rays plus the closing arc should wind once counterclockwise around
  // an interior point
  auto [g1, g2] = gamma_biharmonic();
  (void)g1;
  const double R = 10.0;
  ContourPath closed;
  closed.segments.push_back(g2.segments[1]);  // out along pi/8
  closed.segments.push_back(make_arc({0.0, 0.0}, R, pi / 8.0, 3.0 * pi / 8.0));
  closed.segments.push_back(g2.segments[0]);  // back in along 3 pi/8
  const cx pole = 2.0 * std::polar(1.0, pi / 4.0);
  QuadOptions opt;
  opt.trunc_R = R;
  auto rep = integrate_path([&](cx l) { return 1.0 / (l - pole); }, closed, opt);
  CHECK(std::abs(rep.value - cx(0.0, 2.0 * pi)) < 1e-9);
}

TEST_CASE("spectral boundary stays on the zero set") {
  for (const auto& d :
       {Dispersion(Family::CH_PLUS, 1.0, 1.0), Dispersion(Family::CH_PLUS, 1.0, 5.0),
        Dispersion(Family::CH_MINUS, 1.0, 1.0)}) {
    const ContourPath boundary = domega_boundary(d, 9.0);
    for (const auto& seg : boundary.segments) {
      for (int k = 1; k < 8; ++k) {
        const cx l = seg.point(k / 8.0);
        CHECK(region_membership(d, l) == RegionClass::on_boundary);
      }
    }
  }
}

TEST_CASE("ch_plus boundary passes through the branch point") {
  const Dispersion d(Family::CH_PLUS, 1.0, 1.0);
  const ContourPath boundary = domega_boundary(d, 8.0);
  double best = 1e9;
  for (const auto& seg : boundary.segments)
    for (int k = 0; k <= 16; ++k) best = std::min(best, std::abs(seg.point(k / 16.0) - iu));
  CHECK(best < 1e-12);
}

TEST_CASE("ch_minus boundary contains the real anchor points") {
  const Dispersion d(Family::CH_MINUS, 1.0, 1.0);
  const ContourPath boundary = domega_boundary(d, 8.0);
  for (const cx target : {cx(1.0, 0.0), cx(-1.0, 0.0)}) {
    double best = 1e9;
    for (const auto& seg : boundary.segments)
      for (int k = 0; k <= 32; ++k)
        best = std::min(best, std::abs(seg.point(k / 32.0) - target));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("decay profile matches the sampled direction lower bound") {
  auto [g1, g2] = gamma_biharmonic();
  for (const auto& path : {g1, g2})
    for (const auto& seg : path.segments) {
      double lo = 1.0;
      for (int k = 1; k < 64; ++k) {
        const cx z = seg.point((seg.kind == SegKind::Ray ? 50.0 : 1.0) * k / 64.0);
        if (std::abs(z) > 1e-12) lo = std::min(lo, z.imag() / std::abs(z));
      }
      CHECK(seg.decay_sigma <= lo + 1e-12);
    }
}

TEST_CASE("deformed asymptotic paths") {
  const Dispersion d(Family::CH_PLUS, 1.0, 1.0);
  const DeformedPaths dp = deformed_paths_for_asymptotics(d);
  REQUIRE(dp.E.size() == 4);
  // positive real part of omega away from the base points
  CHECK(d.omega(2.0 * std::polar(1.0, pi / 16.0)).real() > 0.0);
  for (const auto& e : dp.E) {
    const auto& seg = e.segments.front();
    for (double s : {0.05, 0.3, 1.0, 3.0, 10.0})
      CHECK(d.omega(seg.point(s)).real() > 0.0);
  }
  // Z excludes the open real interval (-1, 1)
  for (const auto& seg : dp.Z.segments)
    for (int k = 0; k <= 8; ++k) {
      const cx z = seg.point(seg.kind == SegKind::Ray ? k / 2.0 : k / 8.0);
      CHECK(!(std::abs(z.imag()) < 1e-12 && std::abs(z.real()) < 1.0 - 1e-12));
    }
}

TEST_CASE("boundary-to-rays deformation invariance") {
  // a boundary-kernel style integrand integrates identically over the
  // spectral boundary and over the four deformed half-lines
  const Dispersion d(Family::CH_PLUS, 1.0, 1.0);
  const auto g0 = make_time_signal("sin", {});
  const double t = 0.9;
  const double x = 1.2;
  auto integrand = [&](cx l) {
    const cx r = rho_value(d, l, CutSide::from_right_quadrant);
    // window transform of the data, entire in omega
    const cx D = g0.stable_transform(d.omega(l), t, t);
    return stable_exp(iu * l * x) * l * (iu * l + r) * r * D;
  };
  const ContourPath boundary = domega_boundary(d, 40.0);
  QuadOptions opt;
  opt.tol = 1e-10;
  opt.osc.x_freq = x;
  const cx over_boundary = integrate_path(integrand, boundary, opt).value;

  const DeformedPaths dp = deformed_paths_for_asymptotics(d);
  cx over_rays{};
  for (const auto& e : dp.E) {
    QuadOptions ro;
    ro.tol = 1e-11;
    ro.osc.x_freq = x;
    ro.trunc_R = 45.0;
    over_rays += integrate_path(integrand, e, ro).value;
  }
  CHECK(std::abs(over_boundary - over_rays) < 1e-6);
}

TEST_CASE("real-line to sector deformation invariance") {
  // integrands analytic above the axis with time decay move freely between
  // the real line and the sector boundaries
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  const double t = 0.6, x = 0.8;
  auto integrand = [&](cx l) {
    // surrogate initial-datum transform with its pole in the lower half-plane
    return stable_exp(iu * l * x - d.omega(l) * t) / (1.0 - iu * l);
  };
  QuadOptions opt;
  opt.tol = 1e-11;
  opt.osc.x_freq = x;
  const cx line = integrate_real_line(integrand, 1e-11, t, d, 1, x).value;
  // the rotated rays carry the same integral with quartic decay
  auto [g1, g2] = gamma_biharmonic_rotated();
  opt.trunc_R = truncation_radius_x(x, std::sin(pi / 16.0), 2, 1e-11);
  const cx sectors = integrate_path(integrand, g1, opt).value +
                     integrate_path(integrand, g2, opt).value;
  CHECK(std::abs(line - sectors) < 1e-8);
}

TEST_CASE("diagnostic arcs") {
  ContourPath circle = diagnostic_arc(1.0, 0.0, 2.0 * pi);
  QuadOptions opt;
  auto rep = integrate_path([](cx l) { return 1.0 / l; }, circle, opt);
  CHECK(std::abs(rep.value - cx(0.0, 2.0 * pi)) < 1e-12);

  // arc integrals of the heat kernel tail shrink as the radius grows; the
  // endpoints sit where the decay degenerates, so the drop is algebraic
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  auto f = [&](cx l) { return l * l * l * stable_exp(-d.omega(l) * 1.0) / l; };
  const double at2 = std::abs(
      integrate_path(f, diagnostic_arc(2.0, -pi / 8.0, pi / 8.0), opt).value);
  const double at16 = std::abs(
      integrate_path(f, diagnostic_arc(16.0, -pi / 8.0, pi / 8.0), opt).value);
  CHECK(at16 < at2 / 4.0);

  ContourPath degenerate = diagnostic_arc(1.0, 0.3, 0.3);
  CHECK(std::abs(integrate_path([](cx) { return cx(1.0, 0.0); }, degenerate, opt).value) <
        1e-15);
  CHECK_THROWS_AS(diagnostic_arc(-1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("arc decay along doubling radii") {
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);
  QuadOptions opt;
  double prev = 1e300;
  for (double R : {2.0, 4.0, 8.0, 16.0}) {
    ContourPath arc = diagnostic_arc(R, pi / 8.0, 3.0 * pi / 8.0);
    auto f = [&](cx l) { return l * l * l * stable_exp(d.omega(l) * 1.0) / l; };
    const double mag = std::abs(integrate_path(f, arc, opt).value);
    CHECK(mag <= prev * 1.05);
    prev = mag;
  }
}

TEST_SUITE_END();
