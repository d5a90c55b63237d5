#pragma once

#include <utility>

#include "utmq/data.hpp"
#include "utmq/quadrature.hpp"

namespace utmq {

// Half-line Fourier transform int_0^inf e^{-i lambda y} u(y) dy via adaptive
// quadrature, truncation window from the decay class. Im(lambda) <= 1e-12.
cx fourier_half_line(const HalfLineFunction& u, cx lambda, double tol = 1e-10,
                     QuadratureReport* rep = nullptr);

// Partial integration tail: sum_{j=1..M} u^{(j-1)}(0) / (i lambda)^j
cx sigma_tail(const HalfLineFunction& u, cx lambda, int M);

// E(omega, t) = e^{-omega t} int_0^t e^{omega tau} g(tau) dtau, evaluated in
// the jointly exponentiated form int_0^t e^{-omega (t-tau)} g(tau) dtau.
// Above |omega| = omega_switch the integration-by-parts identity is applied
// twice and only the second-derivative remainder is integrated numerically.
// `horizon` generalizes the upper limit (pass T >= t for the fixed-horizon
// form); negative means horizon = t.
cx time_transform_stable(const TimeSignal& g, cx omega, double t, double tol = 1e-10,
                         double horizon = -1.0);

inline constexpr double omega_switch = 50.0;

// (fhat(lambda, t), e^{-omega t} ftilde(lambda, omega, t)) for the forcing.
std::pair<cx, cx> forcing_transforms(const SpaceTimeFunction& f, const Dispersion& d,
                                     cx lambda, double t, double tol = 1e-9);

}  // namespace utmq
