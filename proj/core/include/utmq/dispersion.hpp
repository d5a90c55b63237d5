#pragma once

#include <utility>

#include "utmq/errors.hpp"
#include "utmq/types.hpp"

namespace utmq {

enum class Family { BIHARMONIC, CH_PLUS, CH_MINUS };

const char* family_name(Family f);

// Which one-sided limit to take when evaluating the branch on a cut.
// For the vertical cuts the sides are Re(lambda) > 0 ("right") and
// Re(lambda) < 0 ("left"). For the CH_MINUS real segment the usable limits
// come from above and below; "right" selects the upper half-plane limit
// (the continuation used along the spectral boundary) and "left" the lower.
enum class CutSide { none, from_right_quadrant, from_left_quadrant };

struct BranchValue {
  cx value{};
  bool on_cut = false;
  CutSide side_used = CutSide::none;
};

enum class RegionClass { inside_Omega, on_boundary, outside };

// Dispersion relation omega(lambda) for one equation family, together with
// the branch rho(lambda) of the square root of lambda^2 +- alpha/beta and
// the spectral region Omega = { Im lambda >= 0, Re omega <= 0 }.
//
// BIHARMONIC instances are normalized: alpha = 0, beta = 1 (the solver
// rescales a general beta before building contours).
struct Dispersion {
  Family family = Family::BIHARMONIC;
  double alpha = 0.0;
  double beta = 1.0;

  Dispersion() = default;
  Dispersion(Family fam, double a, double b);

  double kappa() const { return alpha / beta; }
  // location of the imaginary (CH_PLUS) or real (CH_MINUS) branch points
  double cut_start() const { return std::sqrt(kappa()); }

  cx omega(cx lambda) const;
  cx omega_prime(cx lambda) const;
  // rho(lambda)^2 as a polynomial, valid for every lambda
  cx rho_squared(cx lambda) const;
};

cx omega(const Dispersion& d, cx lambda);

BranchValue rho(const Dispersion& d, cx lambda, CutSide hint = CutSide::none);

// Convenience wrapper that throws CutError when lambda sits on the cut and
// no side hint is given.
cx rho_value(const Dispersion& d, cx lambda, CutSide hint = CutSide::none);

RegionClass region_membership(const Dispersion& d, cx lambda, double tol = 1e-10);

// The two nonnegative roots eta of Re omega(xi + i eta) = 0 for CH_PLUS,
// psi_minus(xi) <= psi_plus(xi). psi_minus passes through the origin,
// psi_plus through sqrt(alpha/beta) i.
std::pair<double, double> psi_boundary(const Dispersion& d, double xi);

// Internal boundary curves shared by both CH families.
//   branch = -1: lower curve (through 0 for CH_PLUS, through +-sqrt(a/b) for CH_MINUS)
//   branch = +1: upper curve
double boundary_eta(const Dispersion& d, int branch, double xi);
// d eta / d xi on the boundary curve, by implicit differentiation
double boundary_eta_prime(const Dispersion& d, int branch, double xi);
// smallest |xi| for which the branch = -1 curve exists (0 for CH_PLUS,
// sqrt(alpha/beta) for CH_MINUS)
double boundary_xi_min(const Dispersion& d, int branch);

}  // namespace utmq
