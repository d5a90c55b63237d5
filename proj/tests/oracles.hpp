#pragma once

// Test-only reference integrators, independent of the adaptive engine.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cx = std::complex<double>;

// composite 10-point Gauss-Legendre on [a, b] with `panels` panels
template <class F>
cx gauss_fixed(F&& f, double a, double b, int panels) {
  static const double xg[5] = {0.1488743389816312108, 0.4333953941292471908,
                               0.6794095682990244062, 0.8650633666889845108,
                               0.9739065285171717200};
  static const double wg[5] = {0.2955242247147528701, 0.2692667193099963551,
                               0.2190863625159820440, 0.1494513491505805931,
                               0.0666713443086881376};
  cx total{};
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    cx acc{};
    for (int q = 0; q < 5; ++q) {
      acc += wg[q] * (f(mid + 0.5 * h * xg[q]) + f(mid - 0.5 * h * xg[q]));
    }
    total += acc * (0.5 * h);
  }
  return total;
}

// tensor-product version for double integrals over [ax,bx] x [ay,by]
template <class F>
cx gauss_fixed_2d(F&& f, double ax, double bx, double ay, double by, int px, int py) {
  return gauss_fixed(
      [&](double x) { return gauss_fixed([&](double y) { return f(x, y); }, ay, by, py); },
      ax, bx, px);
}

// track sqrt(z(s)) continuously along a straight path from z0 (with a given
// starting branch value) to z1 in `steps` increments
inline cx continued_sqrt(cx w_start, cx z0, cx z1, int steps) {
  cx w = w_start;
  for (int k = 1; k <= steps; ++k) {
    const cx z = z0 + (z1 - z0) * (double(k) / steps);
    cx s = std::sqrt(z);
    if (std::abs(s - w) > std::abs(-s - w)) s = -s;
    w = s;
  }
  return w;
}

}  // namespace oracle
