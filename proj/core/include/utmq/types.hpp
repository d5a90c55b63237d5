#pragma once

#include <cmath>
#include <complex>

namespace utmq {

using cx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cx iu{0.0, 1.0};

// exp with hard underflow to an exact zero. Any factor whose real exponent is
// below -746 is not representable as a double anyway, and flushing it avoids
// 0 * inf products downstream.
inline cx stable_exp(cx z) {
  if (z.real() <= -746.0) return {0.0, 0.0};
  return std::exp(z);
}

// (e^z - 1)/z, small-|z| series so the subtraction never cancels.
inline cx expm1_over(cx z) {
  if (std::abs(z) < 1e-4)
    return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

inline bool is_finite(cx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline cx ipow(cx z, int n) {
  cx r{1.0, 0.0};
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

}  // namespace utmq
