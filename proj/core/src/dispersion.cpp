#include "utmq/dispersion.hpp"

#include <cmath>

namespace utmq {

const char* family_name(Family f) {
  switch (f) {
    case Family::BIHARMONIC: return "biharmonic";
    case Family::CH_PLUS: return "ch_plus";
    case Family::CH_MINUS: return "ch_minus";
  }
  return "?";
}

Dispersion::Dispersion(Family fam, double a, double b) : family(fam), alpha(a), beta(b) {
  if (beta <= 0.0) throw DomainError("dispersion: beta must be positive");
  switch (family) {
    case Family::BIHARMONIC:
      if (alpha != 0.0 || beta != 1.0)
        throw DomainError("dispersion: biharmonic instances are normalized to alpha=0, beta=1");
      break;
    case Family::CH_PLUS:
      if (alpha < 0.0) throw DomainError("dispersion: ch_plus needs alpha >= 0");
      break;
    case Family::CH_MINUS:
      if (alpha <= 0.0) throw DomainError("dispersion: ch_minus needs alpha > 0");
      break;
  }
}

cx Dispersion::omega(cx lambda) const {
  const cx l2 = lambda * lambda;
  switch (family) {
    case Family::BIHARMONIC: return l2 * l2;
    case Family::CH_PLUS: return alpha * l2 + beta * l2 * l2;
    case Family::CH_MINUS: return -alpha * l2 + beta * l2 * l2;
  }
  return {};
}

cx Dispersion::omega_prime(cx lambda) const {
  const cx l2 = lambda * lambda;
  switch (family) {
    case Family::BIHARMONIC: return 4.0 * l2 * lambda;
    case Family::CH_PLUS: return 2.0 * alpha * lambda + 4.0 * beta * l2 * lambda;
    case Family::CH_MINUS: return -2.0 * alpha * lambda + 4.0 * beta * l2 * lambda;
  }
  return {};
}

cx Dispersion::rho_squared(cx lambda) const {
  switch (family) {
    case Family::BIHARMONIC: return lambda * lambda;
    case Family::CH_PLUS: return lambda * lambda + kappa();
    case Family::CH_MINUS: return lambda * lambda - kappa();
  }
  return {};
}

cx omega(const Dispersion& d, cx lambda) { return d.omega(lambda); }

namespace {

// sqrt of z with the branch cut along the positive imaginary axis,
// arg in (-3pi/2, pi/2]. `side` resolves on-cut arguments.
cx sqrt_cut_up(cx z, CutSide side) {
  double phi = std::atan2(z.imag(), z.real());
  if (z.real() == 0.0 && z.imag() > 0.0) {
    phi = (side == CutSide::from_left_quadrant) ? -1.5 * pi : 0.5 * pi;
  } else if (phi > 0.5 * pi) {
    phi -= 2.0 * pi;
  }
  return std::sqrt(std::abs(z)) * std::polar(1.0, 0.5 * phi);
}

// sqrt of z with the branch cut along the negative imaginary axis,
// arg in [-pi/2, 3pi/2).
cx sqrt_cut_down(cx z, CutSide side) {
  double phi = std::atan2(z.imag(), z.real());
  if (z.real() == 0.0 && z.imag() < 0.0) {
    phi = (side == CutSide::from_left_quadrant) ? 1.5 * pi : -0.5 * pi;
  } else if (phi < -0.5 * pi) {
    phi += 2.0 * pi;
  }
  return std::sqrt(std::abs(z)) * std::polar(1.0, 0.5 * phi);
}

bool on_cut_ch_plus(cx lambda, double c) {
  return lambda.real() == 0.0 && std::abs(lambda.imag()) >= c;
}

bool on_cut_ch_minus(cx lambda, double c) {
  const bool real_segment = lambda.imag() == 0.0 && std::abs(lambda.real()) <= c;
  const bool imag_axis = lambda.real() == 0.0;
  return real_segment || imag_axis;
}

}  // namespace

BranchValue rho(const Dispersion& d, cx lambda, CutSide hint) {
  const double c = d.cut_start();
  BranchValue out;

  if (d.family == Family::CH_PLUS) {
    out.on_cut = on_cut_ch_plus(lambda, c);
    if (out.on_cut && hint == CutSide::none)
      throw CutError("rho: lambda on the imaginary cut, side hint required");
    out.side_used = out.on_cut ? hint : CutSide::none;
    // continuous branch pinned to -sqrt(lambda^2 + alpha/beta) on the real
    // axis; each factor carries one vertical cut
    const cx up = sqrt_cut_up(lambda - cx(0.0, c), hint);
    const cx down = sqrt_cut_down(lambda + cx(0.0, c), hint);
    out.value = -up * down;
    return out;
  }

  if (d.family == Family::CH_MINUS) {
    out.on_cut = on_cut_ch_minus(lambda, c);
    if (out.on_cut && hint == CutSide::none)
      throw CutError("rho: lambda on the cut set, side hint required");
    out.side_used = out.on_cut ? hint : CutSide::none;
    if (lambda.imag() == 0.0 && std::abs(lambda.real()) <= c) {
      // real segment: one-sided limits, continuous through each upper
      // quadrant; the sign still flips across Re lambda = 0
      const double x = lambda.real();
      const double s = std::sqrt(std::max(0.0, c * c - x * x));
      double v = x >= 0.0 ? -s : s;
      if (hint == CutSide::from_left_quadrant) v = -v;  // limit from below
      out.value = cx(0.0, v);
      return out;
    }
    // -sign(Re) lambda sqrt(1 - c^2/lambda^2): one branch per open
    // half-plane, each behaving like -|lambda| at its real axis so that
    // Re rho <= 0 along the whole region boundary. The sign flip across the
    // imaginary axis is the jump the cut set encodes.
    const double sgn = lambda.real() > 0.0 ? 1.0 : -1.0;
    cx v = -sgn * lambda * std::sqrt(1.0 - cx(c * c) / (lambda * lambda));
    if (lambda.real() == 0.0) {
      // on the axis the two one-sided limits are opposite
      v = -lambda * std::sqrt(1.0 - cx(c * c) / (lambda * lambda));
      if (hint == CutSide::from_left_quadrant) v = -v;
    }
    out.value = v;
    return out;
  }

  throw DomainError("rho: not defined for the biharmonic family");
}

cx rho_value(const Dispersion& d, cx lambda, CutSide hint) {
  return rho(d, lambda, hint).value;
}

RegionClass region_membership(const Dispersion& d, cx lambda, double tol) {
  const double re_w = d.omega(lambda).real();
  const double a4 = std::pow(std::abs(lambda), 4);
  const double wtol = tol * (1.0 + a4);
  const bool upper = lambda.imag() >= -tol;

  if (upper && std::abs(re_w) <= wtol) return RegionClass::on_boundary;
  // the region also touches the real axis wherever Re omega <= 0 there
  // (the CH_MINUS segments [-sqrt(a/b), sqrt(a/b)])
  if (std::abs(lambda.imag()) <= tol && re_w <= wtol) return RegionClass::on_boundary;
  if (upper && re_w < -wtol) return RegionClass::inside_Omega;
  return RegionClass::outside;
}

namespace {

// signed alpha: F(xi, eta) = beta(xi^4 - 6 xi^2 eta^2 + eta^4) + a(xi^2 - eta^2)
double signed_alpha(const Dispersion& d) {
  return d.family == Family::CH_MINUS ? -d.alpha : d.alpha;
}

}  // namespace

double boundary_eta(const Dispersion& d, int branch, double xi) {
  if (d.family == Family::BIHARMONIC)
    throw DomainError("boundary_eta: no finite boundary curves for the biharmonic family");
  const double a = signed_alpha(d);
  const double b = d.beta;
  const double x2 = xi * xi;
  const double D = 32.0 * b * b * x2 * x2 + 8.0 * a * b * x2 + a * a;
  const double sD = std::sqrt(std::max(0.0, D));
  const double X = 6.0 * b * x2 + a;
  double eta2;
  if (branch > 0) {
    // direct form is cancellation-free when X > 0, rationalized otherwise
    eta2 = (X > 0.0) ? (X + sD) / (2.0 * b) : 2.0 * x2 * (b * x2 + a) / (X - sD);
  } else {
    eta2 = 2.0 * x2 * (b * x2 + a) / (X + sD);
  }
  return std::sqrt(std::max(0.0, eta2));
}

double boundary_eta_prime(const Dispersion& d, int branch, double xi) {
  const double a = signed_alpha(d);
  const double b = d.beta;
  const double eta = boundary_eta(d, branch, xi);
  if (eta < 1e-150) {
    // corner at the origin, slope +-1 there
    return xi >= 0.0 ? 1.0 : -1.0;
  }
  const double Fxi = 2.0 * xi * (a + 2.0 * b * xi * xi - 6.0 * b * eta * eta);
  const double Feta = -2.0 * eta * (a + 6.0 * b * xi * xi - 2.0 * b * eta * eta);
  return -Fxi / Feta;
}

double boundary_xi_min(const Dispersion& d, int branch) {
  if (d.family == Family::CH_MINUS && branch < 0) return d.cut_start();
  return 0.0;
}

std::pair<double, double> psi_boundary(const Dispersion& d, double xi) {
  if (d.family != Family::CH_PLUS || d.alpha <= 0.0)
    throw DomainError("psi_boundary: defined for ch_plus with alpha > 0");
  return {boundary_eta(d, -1, xi), boundary_eta(d, +1, xi)};
}

}  // namespace utmq
