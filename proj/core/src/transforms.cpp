#include "utmq/transforms.hpp"

#include <cmath>

namespace utmq {

cx fourier_half_line(const HalfLineFunction& u, cx lambda, double tol,
                     QuadratureReport* rep) {
  if (lambda.imag() > 1e-12)
    throw DomainError("fourier_half_line: Im(lambda) must be <= 1e-12");
  if (u.is_zero()) return {};

  const double X = half_line_truncation(u);
  ContourPath window;
  window.segments.push_back(make_segment(cx(0.0, 0.0), cx(X, 0.0)));
  QuadOptions opt;
  opt.tol = tol;
  opt.osc.x_freq = std::abs(lambda.real());
  auto f = [&](cx y) { return stable_exp(-iu * lambda * y) * u(y.real()); };
  QuadratureReport r = integrate_path(f, window, opt);
  r.truncation_R = X;
  if (!r.warnings.empty())
    throw NonConvergent("fourier_half_line: truncation bound cannot be met");
  if (rep) *rep = r;
  return r.value;
}

cx sigma_tail(const HalfLineFunction& u, cx lambda, int M) {
  if (M == 0) return {};
  if (lambda == cx(0.0, 0.0)) throw DomainError("sigma_tail: lambda must be nonzero");
  if (M < 0 || M > int(u.derivs_at_zero.size()))
    throw DomainError("sigma_tail: M exceeds stored derivatives");
  cx acc{};
  cx il = iu * lambda;
  cx denom = il;
  for (int j = 1; j <= M; ++j) {
    acc += u.derivs_at_zero[std::size_t(j - 1)] / denom;
    denom *= il;
  }
  return acc;
}

namespace {

cx time_transform_quad(const TimeSignal& g, cx omega, double t, double T, double tol) {
  if (T <= 0.0) return {};
  ContourPath window;
  window.segments.push_back(make_segment(cx(0.0, 0.0), cx(T, 0.0)));
  QuadOptions opt;
  opt.tol = tol;
  opt.osc.x_freq = std::abs(omega.imag());
  auto f = [&](cx tau) { return stable_exp(-omega * (t - tau.real())) * g(tau.real()); };
  return integrate_path(f, window, opt).value;
}

cx time_transform_rec(const TimeSignal& g, cx omega, double t, double T, double tol,
                      int depth) {
  if (depth == 0 || !g.has_model())
    return time_transform_quad(g, omega, t, T, tol);
  // e^{-omega t} gtilde = [e^{-omega(t-T)} g(T) - e^{-omega t} g(0)]/omega
  //                       - (1/omega) * (same for g')
  const cx boundary =
      (stable_exp(-omega * (t - T)) * g(T) - stable_exp(-omega * t) * g(0.0)) / omega;
  const TimeSignal gp = g.derivative();
  return boundary - time_transform_rec(gp, omega, t, T, tol * std::abs(omega), depth - 1) / omega;
}

}  // namespace

cx time_transform_stable(const TimeSignal& g, cx omega, double t, double tol,
                         double horizon) {
  if (t < 0.0) throw DomainError("time_transform_stable: t must be nonnegative");
  const double T = horizon < 0.0 ? t : horizon;
  if (T < t) throw DomainError("time_transform_stable: horizon must be >= t");
  if (g.is_zero() || T == 0.0) return {};
  if (std::abs(omega) < omega_switch) return time_transform_quad(g, omega, t, T, tol);
  return time_transform_rec(g, omega, t, T, tol, 2);
}

std::pair<cx, cx> forcing_transforms(const SpaceTimeFunction& f, const Dispersion& d,
                                     cx lambda, double t, double tol) {
  if (lambda.imag() > 1e-12)
    throw DomainError("forcing_transforms: Im(lambda) must be <= 1e-12");
  if (t < 0.0) throw DomainError("forcing_transforms: t must be nonnegative");
  if (f.empty()) return {cx{}, cx{}};

  const cx w = d.omega(lambda);
  cx fhat{}, ftilde{};
  for (const auto& term : f.terms) {
    if (term.space.is_zero() || term.time.is_zero()) continue;
    const cx xhat = term.space.has_closed_hat() ? term.space.hat_closed(lambda)
                                                : fourier_half_line(term.space, lambda, tol);
    fhat += xhat * term.time(t);
    const cx E = term.time.has_model() ? term.time.stable_transform(w, t, t)
                                       : time_transform_stable(term.time, w, t, tol);
    ftilde += xhat * E;
  }
  return {fhat, ftilde};
}

}  // namespace utmq
