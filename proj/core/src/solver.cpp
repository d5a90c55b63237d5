#include "utmq/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "utmq/contour.hpp"
#include "utmq/errors.hpp"

namespace utmq {

void EvalRequest::validate() const {
  if (points.empty()) throw DomainError("eval request: no points");
  double tmax = 0.0;
  for (auto [x, t] : points) {
    if (!(x > 0.0) || !(t > 0.0))
      throw DomainError("eval request: points must have x > 0 and t > 0");
    tmax = std::max(tmax, t);
  }
  if (deriv_orders.empty()) throw DomainError("eval request: no derivative orders");
  for (auto [n, m] : deriv_orders) {
    if (n < 0 || m < 0 || n + 4 * m > 8)
      throw DomainError("eval request: need n, m >= 0 and n + 4m <= 8");
  }
  if (ehrenpreis_T && !(*ehrenpreis_T > tmax))
    throw DomainError("eval request: ehrenpreis horizon must exceed every t");
}

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  int nt = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nt = std::max(1, std::min<int>(nt, int(n)));
  if (nt == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(nt);
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ----- data transforms used by the kernels -----------------------------------

// One boundary signal and its derivative chain (up to g'''' so second time
// derivatives of the field stay available).
struct SigKit {
  bool zero = true;
  bool exact = true;
  std::vector<TimeSignal> sig;  // g, g', g'', ...
  std::vector<double> d0;       // g^{(j)}(0)

  double val(int k, double t) const { return sig[std::size_t(k)](t); }

  cx E(int k, cx w, double t, double T) const {
    const TimeSignal& s = sig[std::size_t(k)];
    if (s.is_zero()) return {};
    if (exact && s.has_model()) return s.stable_transform(w, t, T);
    return time_transform_stable(s, w, t, 1e-11, T);
  }
};

SigKit make_sigkit(const TimeSignal& g, bool exact) {
  SigKit kit;
  kit.exact = exact;
  kit.zero = g.is_zero();
  kit.d0 = g.derivs_at_zero;
  kit.d0.resize(9, 0.0);
  kit.sig.push_back(g);
  if (g.has_model())
    for (int k = 0; k < 4; ++k) kit.sig.push_back(kit.sig.back().derivative());
  return kit;
}

// D_t^m of int_0^t e^{-w(t-tau)} g dtau. With a fixed horizon T the time
// dependence is the plain exponential and the horizon tail is carried by a
// separate decay-region integral; the tracking horizon picks up the boundary
// terms of repeated differentiation instead.
cx Dt_E(const SigKit& g, cx w, double t, std::optional<double> T, int m) {
  if (g.zero) return {};
  if (T) return ipow(-w, m) * g.E(0, w, t, t);
  if (m >= int(g.sig.size()))
    throw DomainError("field time derivative needs an analytic signal model");
  cx v = g.E(m, w, t, t);
  if (m > 0) {
    cx p{};
    cx wp{1.0, 0.0};
    for (int j = 0; j < m; ++j) {
      p += wp * g.d0[std::size_t(m - 1 - j)];
      wp *= -w;
    }
    v += stable_exp(-w * t) * p;
  }
  return v;
}

// Split of Dt_E into a rational tail part, an e^{-wt} part and a small
// remainder, valid termwise for |lambda| away from the zeros of omega:
//   Dt_E = [G(t)/w - G'(t)/w^2] + e^{-wt} (p_m - G(0)/w + G'(0)/w^2)
//          + E_{G''}(w,t)/w^2,  G = g^{(m)}
cx Dt_E_rational(const SigKit& g, cx w, double t, int m) {
  if (g.zero) return {};
  return g.val(m, t) / w - g.val(m + 1, t) / (w * w);
}

cx Dt_E_nonrational(const SigKit& g, cx w, double t, int m) {
  if (g.zero) return {};
  cx p{};
  cx wp{1.0, 0.0};
  for (int j = 0; j < m; ++j) {
    p += wp * g.d0[std::size_t(m - 1 - j)];
    wp *= -w;
  }
  const cx expo = stable_exp(-w * t) * (p - g.d0[std::size_t(m)] / w + g.d0[std::size_t(m + 1)] / (w * w));
  return expo + g.E(m + 2, w, t, t) / (w * w);
}

cx horizon_D(const SigKit& g, cx w, double t, double T) {
  if (g.zero) return {};
  return g.sig[0].horizon_tail(w, t, T);
}

struct FTermKit {
  std::function<cx(cx)> xhat;      // transform of the spatial factor
  bool xhat_analytic = false;      // closed form, usable off the real axis
  SigKit time;
};

struct DataKit {
  Dispersion d;
  double beta = 1.0;
  std::function<cx(cx)> u0hat;
  bool u0_zero = true;
  SigKit g0, g1;
  std::vector<FTermKit> fterms;
  bool have_f = false;

  cx rho_up(cx lambda) const {  // branch with the upper-side rule on cuts
    return rho_value(d, lambda, CutSide::from_right_quadrant);
  }
};

DataKit make_datakit(const ProblemData& data, const Dispersion& d, bool exact) {
  DataKit kit;
  kit.d = d;
  kit.beta = data.beta;
  kit.u0_zero = data.u0.is_zero();
  if (!kit.u0_zero) {
    if (exact && data.u0.has_closed_hat()) {
      const HalfLineFunction u0 = data.u0;
      kit.u0hat = [u0](cx l) { return u0.hat_closed(l); };
    } else {
      const HalfLineFunction u0 = data.u0;
      kit.u0hat = [u0](cx l) { return fourier_half_line(u0, l, 1e-11); };
    }
  } else {
    kit.u0hat = [](cx) { return cx{}; };
  }
  kit.g0 = make_sigkit(data.g0, exact);
  kit.g1 = make_sigkit(data.g1, exact);
  kit.have_f = !data.f.empty();
  for (const auto& term : data.f.terms) {
    if (term.space.is_zero() || term.time.is_zero()) continue;
    FTermKit fk;
    fk.time = make_sigkit(term.time, exact);
    if (exact && term.space.has_closed_hat()) {
      const HalfLineFunction xs = term.space;
      fk.xhat = [xs](cx l) { return xs.hat_closed(l); };
      fk.xhat_analytic = true;
    } else {
      const HalfLineFunction xs = term.space;
      fk.xhat = [xs](cx l) { return fourier_half_line(xs, l, 1e-11); };
      fk.xhat_analytic = false;
    }
    kit.fterms.push_back(std::move(fk));
  }
  return kit;
}

// D_t^m of e^{-wt} ftilde(lambda_arg, w, t) and its tail split.
cx Dt_F(const DataKit& kit, cx lambda_arg, cx w, double t, std::optional<double> T, int m) {
  cx acc{};
  for (const auto& fk : kit.fterms) acc += fk.xhat(lambda_arg) * Dt_E(fk.time, w, t, T, m);
  return acc;
}

cx Dt_F_rational(const DataKit& kit, cx lambda_arg, cx w, double t, int m) {
  cx acc{};
  for (const auto& fk : kit.fterms)
    acc += fk.xhat(lambda_arg) * Dt_E_rational(fk.time, w, t, m);
  return acc;
}

cx Dt_F_nonrational(const DataKit& kit, cx lambda_arg, cx w, double t, int m) {
  cx acc{};
  for (const auto& fk : kit.fterms)
    acc += fk.xhat(lambda_arg) * Dt_E_nonrational(fk.time, w, t, m);
  return acc;
}

bool fterms_analytic(const DataKit& kit) {
  for (const auto& fk : kit.fterms)
    if (!fk.xhat_analytic) return false;
  return true;
}

// (f(A) - f(B)) / (A - B)
template <class F>
cx diffq(F&& f, cx A, cx B) {
  const cx dAB = A - B;
  if (dAB == cx{}) throw DomainError("difference quotient at coincident points");
  return (f(A) - f(B)) / dAB;
}

// ----- accumulation ----------------------------------------------------------

struct Accum {
  cx value{};
  double err = 0.0;
  std::vector<QuadratureReport>* reports = nullptr;

  void add(cx prefactor, const QuadratureReport& r) {
    value += prefactor * r.value;
    err += std::abs(prefactor) * r.abs_error_est;
    if (reports) reports->push_back(r);
  }
};

// Integral over the real line of e^{i lambda x} K(lambda) where K has an
// algebraic tail but extends analytically to {|Re lambda| >= w0, Im >= 0}.
// The tails are folded onto upward verticals at Re = +-w0 where e^{i lambda x}
// decays; the middle window is left to the caller.
void slow_tails(Accum& acc, cx prefactor, const Integrand& K, double x, double w0,
                double tol, double deg_hint) {
  const double smax = truncation_radius_x(x, 1.0, int(deg_hint), tol);
  ContourPath up, down;
  up.segments.push_back(make_segment(cx(w0, 0.0), cx(w0, smax)));
  down.segments.push_back(make_segment(cx(-w0, smax), cx(-w0, 0.0)));
  QuadOptions opt;
  opt.tol = tol;
  auto f = [&](cx l) { return stable_exp(iu * l * x) * K(l); };
  acc.add(prefactor, integrate_path(f, up, opt));
  acc.add(prefactor, integrate_path(f, down, opt));
}

// ----- biharmonic assembly (normalized alpha = 0, beta = 1) -------------------

// Gamma bracket coefficients: index 0 -> Gamma1, 1 -> Gamma2.
struct GammaCoef {
  cx c_g0, c_g1;  // multiply lambda^3 Eg0 and lambda^2 Eg1
  cx a, b;        // multiply u0hat(-lambda) and u0hat(s i lambda)
  cx s;           // +i or -i rotation for the second transform argument
};

const GammaCoef kGamma[2] = {
    {cx(2, -2), cx(-2, 2), cx(0, -1), cx(-1, 1), cx(0, 1)},
    {cx(-2, -2), cx(-2, -2), cx(0, 1), cx(-1, -1), cx(0, -1)},
};

std::pair<cx, double> eval_biharmonic_point(const DataKit& kit, double x, double t,
                                            int n, int m, std::optional<double> T,
                                            double tol,
                                            std::vector<QuadratureReport>* reps) {
  const Dispersion& d = kit.d;
  const int nterms = 3 + (kit.have_f ? 3 : 0);
  const double tol_i = tol * 2.0 * pi / nterms;
  Accum acc;
  acc.reports = reps;

  auto dfac = [&](cx l) { return ipow(iu * l, n) * ipow(-d.omega(l), m); };

  // real-line transform of the initial datum
  if (!kit.u0_zero) {
    auto f = [&](cx l) {
      return dfac(l) * stable_exp(iu * l * x - d.omega(l) * t) * kit.u0hat(l);
    };
    acc.add(1.0, integrate_real_line(f, tol_i, t, d, n + 4 * m, x));
  }

  // sector integrals over rays rotated into the decay wedges, where the
  // e^{-omega t} content of the brackets decays instead of oscillating
  auto [g1p, g2p] = gamma_biharmonic_rotated();
  const ContourPath* gammas[2] = {&g1p, &g2p};
  const double sigma = std::sin(pi / 16.0);
  const double Rx = truncation_radius_x(x, sigma, n + 4 * m + 3, tol_i);
  for (int k = 0; k < 2; ++k) {
    const GammaCoef& C = kGamma[k];
    const bool need = !kit.g0.zero || !kit.g1.zero || !kit.u0_zero;
    if (!need) break;
    auto fn = [&](cx l) {
      const cx w = d.omega(l);
      cx bracket{};
      if (!kit.g0.zero) bracket += C.c_g0 * l * l * l * Dt_E(kit.g0, w, t, T, m);
      if (!kit.g1.zero) bracket += C.c_g1 * l * l * Dt_E(kit.g1, w, t, T, m);
      if (!kit.u0_zero)
        bracket += ipow(-w, m) * stable_exp(-w * t) *
                   (C.a * kit.u0hat(-l) + C.b * kit.u0hat(C.s * l));
      return ipow(iu * l, n) * stable_exp(iu * l * x) * bracket;
    };
    QuadOptions opt;
    opt.tol = tol_i;
    opt.osc.x_freq = x;
    opt.trunc_R = Rx;
    acc.add(1.0, integrate_path(fn, *gammas[k], opt));
  }

  if (T && (!kit.g0.zero || !kit.g1.zero)) {
    // fixed-horizon correction: the windowed data transform decays inside the
    // sectors, so each sector contributes a pair of interior rays (their sum
    // vanishes analytically, which is exactly the horizon independence)
    const double in_ang[2] = {13.0 * pi / 16.0, 5.0 * pi / 16.0};
    const double out_ang[2] = {11.0 * pi / 16.0, 3.0 * pi / 16.0};
    const double Rd = truncation_radius_x(x, std::sin(3.0 * pi / 16.0), n + 4 * m + 3, tol_i);
    for (int k = 0; k < 2; ++k) {
      const GammaCoef& C = kGamma[k];
      ContourPath rays;
      rays.disjoint = true;
      rays.segments.push_back(
          make_ray(0.0, std::polar(1.0, in_ang[k]), -1, std::sin(in_ang[k])));
      rays.segments.push_back(
          make_ray(0.0, std::polar(1.0, out_ang[k]), +1, std::sin(out_ang[k])));
      auto fD = [&](cx l) {
        const cx w = d.omega(l);
        cx bracket{};
        if (!kit.g0.zero) bracket += C.c_g0 * l * l * l * horizon_D(kit.g0, w, t, *T);
        if (!kit.g1.zero) bracket += C.c_g1 * l * l * horizon_D(kit.g1, w, t, *T);
        return ipow(iu * l, n) * ipow(-w, m) * stable_exp(iu * l * x) * bracket;
      };
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      opt.trunc_R = Rd;
      acc.add(1.0, integrate_path(fD, rays, opt));
    }
  }

  if (kit.have_f) {
    // real-line forcing term, slow tail deformed onto verticals
    {
      const double w0 = 1.0;
      auto full = [&](cx l) {
        return ipow(iu * l, n) * stable_exp(iu * l * x) * Dt_F(kit, l, d.omega(l), t, {}, m);
      };
      ContourPath mid;
      mid.segments.push_back(make_segment(cx(-w0, 0.0), cx(w0, 0.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      acc.add(1.0, integrate_path(full, mid, opt));

      if (fterms_analytic(kit)) {
        auto Q = [&](cx l) { return ipow(iu * l, n) * Dt_F_rational(kit, l, d.omega(l), t, m); };
        slow_tails(acc, 1.0, Q, x, w0, tol_i, 2);
        auto rest = [&](cx l) {
          return ipow(iu * l, n) * stable_exp(iu * l * x) *
                 Dt_F_nonrational(kit, l, d.omega(l), t, m);
        };
        const double Rr = std::max(truncation_radius_t(d, t, n + 4 * m + 1, tol_i),
                                   std::pow(10.0 / tol_i, 1.0 / (8.0 - n)));
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(rest, tails, opt));
      } else {
        // no upper continuation for the spatial transform: plain truncation at
        // the algebraic radius
        const double Rr = std::pow(40.0 / (tol_i * std::max(x, 0.05)), 1.0 / 3.0);
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(full, tails, opt));
      }
    }
    // sector-boundary forcing brackets
    for (int k = 0; k < 2; ++k) {
      const GammaCoef& C = kGamma[k];
      auto f = [&](cx l) {
        const cx w = d.omega(l);
        const cx br = C.a * Dt_F(kit, -l, w, t, {}, m) + C.b * Dt_F(kit, C.s * l, w, t, {}, m);
        return ipow(iu * l, n) * stable_exp(iu * l * x) * br;
      };
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      opt.trunc_R = Rx;
      acc.add(1.0, integrate_path(f, *gammas[k], opt));
    }
  }

  return {acc.value / (2.0 * pi), acc.err / (2.0 * pi)};
}

// ----- CH ray-form assembly ---------------------------------------------------

// window half-width covering the zeros of omega on or near the real axis
double split_window(const Dispersion& d) {
  if (d.family == Family::CH_MINUS) return std::max(1.0, d.cut_start() + 0.5);
  return 1.0;
}

std::pair<cx, double> eval_ch_ray_point(const DataKit& kit, double x, double t, int n,
                                        int m, double tol,
                                        std::vector<QuadratureReport>* reps) {
  const Dispersion& d = kit.d;
  const double beta = kit.beta;
  const int nterms = 5 + (kit.have_f ? 3 : 0);
  const double tol_i = tol * 2.0 * pi / nterms;
  Accum acc;
  acc.reports = reps;

  auto rho_r = [&](cx l) { return kit.rho_up(l); };
  auto u0hat = kit.u0hat;

  // T1: plain transform of the initial datum
  if (!kit.u0_zero) {
    auto f = [&](cx l) {
      return ipow(iu * l, n) * ipow(-d.omega(l), m) *
             stable_exp(iu * l * x - d.omega(l) * t) * u0hat(l);
    };
    acc.add(1.0, integrate_real_line(f, tol_i, t, d, n + 4 * m, x));
  }

  // T2: reflected and rotated transforms against the boundary kernel
  if (!kit.u0_zero) {
    auto f = [&](cx l) {
      const cx r = rho_r(l);
      const cx br = (iu * l + r) * iu * diffq(u0hat, -l, iu * r) - u0hat(iu * r);
      return ipow(iu * l, n) * ipow(-d.omega(l), m) *
             stable_exp(iu * l * x - d.omega(l) * t) * br;
    };
    acc.add(1.0, integrate_real_line(f, tol_i, t, d, n + 4 * m, x));
  }

  // T3: image of the upper boundary component under the branch map
  if (!kit.u0_zero) {
    const double Rx = truncation_radius_x(x, 1.0, n + 2, tol_i);
    const double Rt = truncation_radius_t(d, t, n + 4 * m, tol_i);
    const double R = std::min(Rx, Rt);
    auto f = [&](cx mu) {
      const cx r = rho_r(mu);
      const cx br = ((iu * mu - r) * u0hat(iu * r) + 2.0 * r * u0hat(mu)) / (iu * mu + r);
      return ipow(r, n) * ipow(-d.omega(mu), m) *
             stable_exp(r * x - d.omega(mu) * t) * br * mu / (iu * r);
    };
    ContourPath line;
    line.segments.push_back(make_segment(cx(-R, 0.0), cx(R, 0.0)));
    QuadOptions opt;
    opt.tol = tol_i;
    acc.add(1.0, integrate_path(f, line, opt));
  }

  // T4: boundary-data kernel on the real line, split into a full middle
  // window, exponentially decaying tails and a rational part on verticals
  if (!kit.g0.zero || !kit.g1.zero) {
    const double w0 = split_window(d);
    auto kernel = [&](cx l) { return l * (iu * l + rho_r(l)); };
    auto full = [&](cx l) {
      const cx w = d.omega(l);
      const cx r = rho_r(l);
      return ipow(iu * l, n) * stable_exp(iu * l * x) * kernel(l) *
             (r * Dt_E(kit.g0, w, t, {}, m) - Dt_E(kit.g1, w, t, {}, m));
    };
    ContourPath mid;
    mid.segments.push_back(make_segment(cx(-w0, 0.0), cx(w0, 0.0)));
    QuadOptions opt;
    opt.tol = tol_i;
    opt.osc.x_freq = x;
    acc.add(-beta * iu / pi * 2.0 * pi, integrate_path(full, mid, opt));

    auto Q = [&](cx l) {
      const cx w = d.omega(l);
      const cx r = rho_r(l);
      return ipow(iu * l, n) * kernel(l) *
             (r * Dt_E_rational(kit.g0, w, t, m) - Dt_E_rational(kit.g1, w, t, m));
    };
    Accum sub;
    sub.reports = reps;
    slow_tails(sub, 1.0, Q, x, w0, tol_i, 2);
    acc.value += (-beta * iu / pi * 2.0 * pi) * sub.value;
    acc.err += std::abs(-beta * iu / pi * 2.0 * pi) * sub.err;

    auto rest = [&](cx l) {
      const cx w = d.omega(l);
      const cx r = rho_r(l);
      return ipow(iu * l, n) * stable_exp(iu * l * x) * kernel(l) *
             (r * Dt_E_nonrational(kit.g0, w, t, m) - Dt_E_nonrational(kit.g1, w, t, m));
    };
    const double Rr = std::max(truncation_radius_t(d, t, n + 4 * m + 3, tol_i),
                               std::pow(10.0 / tol_i, 1.0 / (8.0 - n)));
    ContourPath tails;
    tails.disjoint = true;
    tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
    tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
    acc.add(-beta * iu / pi * 2.0 * pi, integrate_path(rest, tails, opt));
  }

  // T5: boundary-data kernel carried to the branch image, decays as e^{rho x}
  if (!kit.g0.zero || !kit.g1.zero) {
    const double Rx = truncation_radius_x(x, 1.0, n + 3, tol_i);
    auto f = [&](cx mu) {
      const cx w = d.omega(mu);
      const cx r = rho_r(mu);
      return ipow(r, n) * stable_exp(r * x) * mu * (iu * mu - r) *
             (iu * mu * Dt_E(kit.g0, w, t, {}, m) + Dt_E(kit.g1, w, t, {}, m));
    };
    ContourPath line;
    line.segments.push_back(make_segment(cx(-Rx, 0.0), cx(Rx, 0.0)));
    QuadOptions opt;
    opt.tol = tol_i;
    acc.add(-beta * iu / pi * 2.0 * pi, integrate_path(f, line, opt));
  }

  if (kit.have_f) {
    // T6: plain forcing transform with the same tail treatment as T4
    {
      const double w0 = split_window(d);
      auto full = [&](cx l) {
        return ipow(iu * l, n) * stable_exp(iu * l * x) * Dt_F(kit, l, d.omega(l), t, {}, m);
      };
      ContourPath mid;
      mid.segments.push_back(make_segment(cx(-w0, 0.0), cx(w0, 0.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      acc.add(1.0, integrate_path(full, mid, opt));
      if (fterms_analytic(kit)) {
        auto Q = [&](cx l) { return ipow(iu * l, n) * Dt_F_rational(kit, l, d.omega(l), t, m); };
        slow_tails(acc, 1.0, Q, x, w0, tol_i, 2);
        auto rest = [&](cx l) {
          return ipow(iu * l, n) * stable_exp(iu * l * x) *
                 Dt_F_nonrational(kit, l, d.omega(l), t, m);
        };
        const double Rr = std::max(truncation_radius_t(d, t, n + 4 * m + 1, tol_i),
                                   std::pow(10.0 / tol_i, 1.0 / (8.0 - n)));
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(rest, tails, opt));
      } else {
        const double Rr = std::pow(40.0 / (tol_i * std::max(x, 0.05)), 1.0 / 3.0);
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(full, tails, opt));
      }
    }
    // T7: forcing against the boundary kernel
    {
      const double w0 = split_window(d);
      auto bracket = [&](cx l, auto&& F) {
        const cx r = rho_r(l);
        auto Fof = [&](cx a) { return F(a); };
        return (iu * l + r) * iu * diffq(Fof, -l, iu * r) - F(iu * r);
      };
      auto full = [&](cx l) {
        const cx w = d.omega(l);
        return ipow(iu * l, n) * stable_exp(iu * l * x) *
               bracket(l, [&](cx a) { return Dt_F(kit, a, w, t, {}, m); });
      };
      ContourPath mid;
      mid.segments.push_back(make_segment(cx(-w0, 0.0), cx(w0, 0.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      acc.add(1.0, integrate_path(full, mid, opt));
      if (fterms_analytic(kit)) {
        auto Q = [&](cx l) {
          const cx w = d.omega(l);
          return ipow(iu * l, n) *
                 bracket(l, [&](cx a) { return Dt_F_rational(kit, a, w, t, m); });
        };
        slow_tails(acc, 1.0, Q, x, w0, tol_i, 2);
        auto rest = [&](cx l) {
          const cx w = d.omega(l);
          return ipow(iu * l, n) * stable_exp(iu * l * x) *
                 bracket(l, [&](cx a) { return Dt_F_nonrational(kit, a, w, t, m); });
        };
        const double Rr = std::max(truncation_radius_t(d, t, n + 4 * m + 1, tol_i),
                                   std::pow(10.0 / tol_i, 1.0 / (8.0 - n)));
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(rest, tails, opt));
      } else {
        const double Rr = std::pow(40.0 / (tol_i * std::max(x, 0.05)), 1.0 / 3.0);
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(full, tails, opt));
      }
    }
    // T8: forcing carried to the branch image
    {
      const double Rx = truncation_radius_x(x, 1.0, n + 2, tol_i);
      auto f = [&](cx mu) {
        const cx w = d.omega(mu);
        const cx r = rho_r(mu);
        const cx br = ((iu * mu - r) * Dt_F(kit, iu * r, w, t, {}, m) +
                       2.0 * r * Dt_F(kit, mu, w, t, {}, m)) /
                      (iu * mu + r);
        return ipow(r, n) * stable_exp(r * x) * br * mu / (iu * r);
      };
      ContourPath line;
      line.segments.push_back(make_segment(cx(-Rx, 0.0), cx(Rx, 0.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      acc.add(1.0, integrate_path(f, line, opt));
    }
  }

  return {acc.value / (2.0 * pi), acc.err / (2.0 * pi)};
}

// ----- CH boundary-form assembly ----------------------------------------------

std::pair<cx, double> eval_ch_boundary_point(const DataKit& kit, double x, double t,
                                             int n, int m, std::optional<double> T,
                                             double tol,
                                             std::vector<QuadratureReport>* reps) {
  const Dispersion& d = kit.d;
  const double beta = kit.beta;
  const int nterms = 3 + (kit.have_f ? 2 : 0);
  const double tol_i = tol * 2.0 * pi / nterms;
  Accum acc;
  acc.reports = reps;

  auto rho_u = [&](cx l) { return kit.rho_up(l); };
  auto u0hat = kit.u0hat;

  const double sigma = std::sin(pi / 16.0);
  const double Rx = truncation_radius_x(x, sigma, n + 4 * m + 3, tol_i);
  const ContourPath boundary = integration_boundary(d);
  QuadOptions bopt;
  bopt.tol = tol_i;
  bopt.osc.x_freq = x;
  bopt.trunc_R = Rx;

  // real-line transform of the initial datum
  if (!kit.u0_zero) {
    auto f = [&](cx l) {
      return ipow(iu * l, n) * ipow(-d.omega(l), m) *
             stable_exp(iu * l * x - d.omega(l) * t) * u0hat(l);
    };
    acc.add(1.0, integrate_real_line(f, tol_i, t, d, n + 4 * m, x));
  }

  // boundary kernel against the reflected and rotated transforms
  if (!kit.u0_zero) {
    auto f = [&](cx l) {
      const cx r = rho_u(l);
      const cx br = (iu * l + r) * iu * diffq(u0hat, -l, iu * r) - u0hat(iu * r);
      return ipow(iu * l, n) * ipow(-d.omega(l), m) *
             stable_exp(iu * l * x - d.omega(l) * t) * br;
    };
    acc.add(1.0, integrate_path(f, boundary, bopt));
  }

  // boundary-data kernel
  if (!kit.g0.zero || !kit.g1.zero) {
    auto f = [&](cx l) {
      const cx w = d.omega(l);
      const cx r = rho_u(l);
      return ipow(iu * l, n) * stable_exp(iu * l * x) * l * (iu * l + r) *
             (r * Dt_E(kit.g0, w, t, T, m) - Dt_E(kit.g1, w, t, T, m));
    };
    acc.add(-beta * iu / pi * 2.0 * pi, integrate_path(f, boundary, bopt));

    if (T) {
      // fixed-horizon correction over interior spines of the region; the
      // windowed transforms are bounded where Re omega <= 0
      if (d.family != Family::CH_PLUS)
        throw DomainError("fixed-horizon form is available for ch_plus only");
      auto fD = [&](cx l) {
        const cx w = d.omega(l);
        const cx r = rho_u(l);
        return ipow(iu * l, n) * ipow(-w, m) * stable_exp(iu * l * x) * l * (iu * l + r) *
               (r * horizon_D(kit.g0, w, t, *T) - horizon_D(kit.g1, w, t, *T));
      };
      const double Rd = truncation_radius_x(x, std::sin(pi / 4.0), n + 4 * m + 3, tol_i);
      ContourPath spines;
      spines.disjoint = true;
      // the lower component deforms to this pair, the upper component to the
      // same pair reversed
      spines.segments.push_back(
          make_ray(0.0, std::polar(1.0, 3.0 * pi / 4.0), -1, std::sin(pi / 4.0)));
      spines.segments.push_back(
          make_ray(0.0, std::polar(1.0, pi / 4.0), +1, std::sin(pi / 4.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      opt.trunc_R = Rd;
      const QuadratureReport lower = integrate_path(fD, spines, opt);
      const QuadratureReport upper = integrate_path(fD, spines.reversed(), opt);
      acc.add(-beta * iu / pi * 2.0 * pi, lower);
      acc.add(-beta * iu / pi * 2.0 * pi, upper);
    }
  }

  if (kit.have_f) {
    // real-line forcing term (same split as the ray form)
    {
      const double w0 = split_window(d);
      auto full = [&](cx l) {
        return ipow(iu * l, n) * stable_exp(iu * l * x) * Dt_F(kit, l, d.omega(l), t, {}, m);
      };
      ContourPath mid;
      mid.segments.push_back(make_segment(cx(-w0, 0.0), cx(w0, 0.0)));
      QuadOptions opt;
      opt.tol = tol_i;
      opt.osc.x_freq = x;
      acc.add(1.0, integrate_path(full, mid, opt));
      if (fterms_analytic(kit)) {
        auto Q = [&](cx l) { return ipow(iu * l, n) * Dt_F_rational(kit, l, d.omega(l), t, m); };
        slow_tails(acc, 1.0, Q, x, w0, tol_i, 2);
        auto rest = [&](cx l) {
          return ipow(iu * l, n) * stable_exp(iu * l * x) *
                 Dt_F_nonrational(kit, l, d.omega(l), t, m);
        };
        const double Rr = std::max(truncation_radius_t(d, t, n + 4 * m + 1, tol_i),
                                   std::pow(10.0 / tol_i, 1.0 / (8.0 - n)));
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(rest, tails, opt));
      } else {
        const double Rr = std::pow(40.0 / (tol_i * std::max(x, 0.05)), 1.0 / 3.0);
        ContourPath tails;
        tails.disjoint = true;
        tails.segments.push_back(make_segment(cx(-Rr, 0.0), cx(-w0, 0.0)));
        tails.segments.push_back(make_segment(cx(w0, 0.0), cx(Rr, 0.0)));
        acc.add(1.0, integrate_path(full, tails, opt));
      }
    }
    // boundary kernel against the forcing transforms
    {
      auto f = [&](cx l) {
        const cx w = d.omega(l);
        const cx r = rho_u(l);
        auto F = [&](cx a) { return Dt_F(kit, a, w, t, {}, m); };
        const cx br = (iu * l + r) * iu * diffq(F, -l, iu * r) - F(iu * r);
        return ipow(iu * l, n) * stable_exp(iu * l * x) * br;
      };
      acc.add(1.0, integrate_path(f, boundary, bopt));
    }
  }

  return {acc.value / (2.0 * pi), acc.err / (2.0 * pi)};
}

// ----- biharmonic normalization ----------------------------------------------

HalfLineFunction rescale_half_line(const HalfLineFunction& u, double s) {
  // v(y) = u(s y)
  HalfLineFunction v = u;
  if (u.model) {
    HalfLineModel m = *u.model;
    for (auto& t : m.poly_exp) {
      t.coef *= std::pow(s, t.power);
      t.rate *= s;
    }
    for (auto& t : m.gauss) {
      t.coef *= std::pow(s, t.power);
      t.rate *= s * s;
    }
    if (m.step) {
      m.step->y0 /= s;
      m.step->width /= s;
    }
    v.model = m;
  }
  const auto base = u.fn;
  v.fn = [base, s](double y) { return base(s * y); };
  for (std::size_t j = 0; j < v.derivs_at_zero.size(); ++j)
    v.derivs_at_zero[j] = u.derivs_at_zero[j] * std::pow(s, double(j));
  if (v.decay == DecayClass::exp_decay) v.decay_rate = u.decay_rate * s;
  if (v.decay == DecayClass::compact_support) v.support_bound = u.support_bound / s;
  return v;
}

TimeSignal scale_time_signal(const TimeSignal& g, double c) {
  TimeSignal out = g;
  if (g.model) {
    TimeSignalModel m = *g.model;
    for (auto& [A, s] : m.exp_terms) A *= c;
    for (auto& p : m.poly) p *= c;
    out = time_signal_from_model(m, g.id);
    out.period_hint = g.period_hint;
  } else {
    const auto base = g.fn;
    out.fn = [base, c](double t) { return c * base(t); };
    for (auto& v : out.derivs_at_zero) v *= c;
  }
  if (c == 0.0) out.id = "zero";
  return out;
}

ProblemData normalize_biharmonic(const ProblemData& data, double& len_scale) {
  // u_t = -beta u_xxxx reduces to beta = 1 under x = beta^{1/4} xi
  len_scale = std::pow(data.beta, 0.25);
  ProblemData out = data;
  out.beta = 1.0;
  out.u0 = rescale_half_line(data.u0, len_scale);
  out.g1 = scale_time_signal(data.g1, len_scale);
  SpaceTimeFunction f;
  for (const auto& term : data.f.terms)
    f.terms.push_back({rescale_half_line(term.space, len_scale), term.time});
  out.f = f;
  return out;
}

struct Job {
  double x, t;
  int n, m;
  std::size_t slot;
};

SolutionField run_jobs(const ProblemData& data, const EvalRequest& req,
                       const SolveOptions& opt,
                       const std::function<std::pair<cx, double>(
                           const DataKit&, const Job&, double,
                           std::vector<QuadratureReport>*)>& eval,
                       const Dispersion& d) {
  SolutionField field;
  field.n_points = req.points.size();
  field.n_orders = req.deriv_orders.size();
  const std::size_t total = field.n_points * field.n_orders;
  field.values.assign(total, cx{});
  field.error_ests.assign(total, 0.0);

  const DataKit kit = make_datakit(data, d, opt.exact_transforms);
  const int comp = data.compatibility_order();
  for (auto [x, t] : req.points)
    if (comp == 0 && x * x + t * t < 1e-4) {
      field.warnings.push_back("corner singularity: incompatible data evaluated near (0,0)");
      break;
    }

  std::vector<Job> jobs;
  jobs.reserve(total);
  for (std::size_t p = 0; p < field.n_points; ++p)
    for (std::size_t o = 0; o < field.n_orders; ++o)
      jobs.push_back({req.points[p].first, req.points[p].second, req.deriv_orders[o].first,
                      req.deriv_orders[o].second, p * field.n_orders + o});

  std::vector<std::vector<QuadratureReport>> reps(opt.collect_reports ? total : 0);
  parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    std::vector<QuadratureReport> local;
    const auto [v, err] = eval(kit, job, opt.tol, opt.collect_reports ? &local : nullptr);
    field.values[job.slot] = v;
    field.error_ests[job.slot] = err;
    if (opt.collect_reports) reps[job.slot] = std::move(local);
  });
  for (auto& r : reps)
    for (auto& q : r) field.reports.push_back(std::move(q));
  return field;
}

}  // namespace

SolutionField solve_biharmonic(const ProblemData& data, const EvalRequest& req,
                               const SolveOptions& opt) {
  data.validate();
  req.validate();
  if (data.family != Family::BIHARMONIC && !(data.family == Family::CH_PLUS && data.alpha < 1e-10))
    throw DomainError("solve_biharmonic: wrong family");

  double s = 1.0;
  const ProblemData norm = normalize_biharmonic(data, s);
  const Dispersion d(Family::BIHARMONIC, 0.0, 1.0);

  EvalRequest scaled = req;
  for (auto& [x, t] : scaled.points) x /= s;

  SolutionField f = run_jobs(
      norm, scaled, opt,
      [&](const DataKit& kit, const Job& job, double tol,
          std::vector<QuadratureReport>* reps) {
        return eval_biharmonic_point(kit, job.x, job.t, job.n, job.m, req.ehrenpreis_T, tol,
                                     reps);
      },
      d);
  // undo the spatial rescale on the derivatives
  for (std::size_t p = 0; p < f.n_points; ++p)
    for (std::size_t o = 0; o < f.n_orders; ++o) {
      const double fac = std::pow(s, -double(req.deriv_orders[o].first));
      f.values[p * f.n_orders + o] *= fac;
      f.error_ests[p * f.n_orders + o] *= std::abs(fac);
    }
  return f;
}

SolutionField solve_ch(const ProblemData& data, const EvalRequest& req,
                       const SolveOptions& opt) {
  data.validate();
  req.validate();
  if (data.family == Family::BIHARMONIC) throw DomainError("solve_ch: wrong family");
  if (data.family == Family::CH_PLUS && data.alpha < 1e-10) {
    // degenerate branch point at the origin; the quartic kernel handles it
    return solve_biharmonic(data, req, opt);
  }
  const Dispersion d = data.dispersion();

  Representation rep = opt.representation;
  if (rep == Representation::automatic) {
    rep = (data.family == Family::CH_MINUS || req.ehrenpreis_T) ? Representation::boundary
                                                                : Representation::ray;
  }
  if (data.family == Family::CH_MINUS && rep == Representation::ray)
    throw DomainError("solve_ch: the ray form applies to ch_plus only");
  if (req.ehrenpreis_T && rep == Representation::ray)
    throw DomainError("solve_ch: the fixed-horizon form needs the boundary representation");

  if (rep == Representation::ray) {
    return run_jobs(
        data, req, opt,
        [&](const DataKit& kit, const Job& job, double tol,
            std::vector<QuadratureReport>* reps) {
          return eval_ch_ray_point(kit, job.x, job.t, job.n, job.m, tol, reps);
        },
        d);
  }
  return run_jobs(
      data, req, opt,
      [&](const DataKit& kit, const Job& job, double tol,
          std::vector<QuadratureReport>* reps) {
        return eval_ch_boundary_point(kit, job.x, job.t, job.n, job.m, req.ehrenpreis_T,
                                      tol, reps);
      },
      d);
}

SolutionField solve(const ProblemData& data, const EvalRequest& req,
                    const SolveOptions& opt) {
  if (data.family == Family::BIHARMONIC) return solve_biharmonic(data, req, opt);
  return solve_ch(data, req, opt);
}

// ----- global relation --------------------------------------------------------

std::vector<double> global_relation_residual(const ProblemData& data, double t,
                                             const std::vector<cx>& lambdas,
                                             const GlobalRelationOptions& opt) {
  data.validate();
  if (!(t > 0.0)) throw DomainError("global relation: t must be positive");
  double lmax = 0.0;
  for (cx l : lambdas) {
    if (l.imag() > 1e-12) throw DomainError("global relation: need Im(lambda) <= 0");
    if (std::abs(l) < 0.25)
      throw DomainError("global relation: |lambda| >= 0.25 (transform error near 0)");
    lmax = std::max(lmax, std::abs(l));
  }
  const Dispersion d = data.dispersion();
  const double beta = data.beta;
  const DataKit kit = make_datakit(data, d, true);

  // spatial window for the field transform
  const double X = half_line_truncation(data.u0) + 5.0 * (1.0 + std::pow(beta * t, 0.25));

  static const double gl_x[5] = {0.0469100770306680036, 0.2307653449471584545, 0.5,
                                 0.7692346550528415455, 0.9530899229693319964};
  static const double gl_w[5] = {0.1184634425280945438, 0.2393143352496832340,
                                 0.2844444444444444444, 0.2393143352496832340,
                                 0.1184634425280945438};

  // y grid resolving e^{-i lambda y} for the largest |lambda| requested
  const int fp = std::max(opt.field_panels, int(std::ceil(X * lmax / 2.0)));
  std::vector<double> ys(std::size_t(fp) * 5);
  for (int p = 0; p < fp; ++p)
    for (int q = 0; q < 5; ++q)
      ys[std::size_t(p) * 5 + q] = X * (p + gl_x[q]) / fp;

  // time nodes graded toward both endpoints: tau = sigma^4 toward 0 (traces
  // of rough corner data blow up like tau^{-3/4} there) and geometric in
  // t - tau toward t (the e^{-omega (t-tau)} weight has a 1/Re omega layer).
  // Below sigma_cut the trace has relaxed to the initial datum and the
  // remaining stretch contributes O(sigma_cut^4).
  const double sigma_cut = 0.25 * opt.trace_eps / 16.0;
  std::vector<std::pair<double, double>> tnodes;  // (tau, d tau weight)
  {
    const int sub = std::max(1, opt.trace_panels / 24);
    auto gl_panel = [&](double a, double b, auto&& map, auto&& dmap) {
      for (int p = 0; p < sub; ++p)
        for (int q = 0; q < 5; ++q) {
          const double lo = a + (b - a) * p / sub, hi2 = a + (b - a) * (p + 1) / sub;
          const double u = lo + (hi2 - lo) * gl_x[q];
          tnodes.push_back({map(u), (hi2 - lo) * gl_w[q] * dmap(u)});
        }
    };
    // lower half in sigma = tau^{1/4}
    const double s_half = std::pow(0.5 * t, 0.25);
    double hi = s_half;
    while (hi > sigma_cut) {
      const double lo = std::max(sigma_cut, 0.5 * hi);
      gl_panel(lo, hi, [](double sg) { return sg * sg * sg * sg; },
               [](double sg) { return 4.0 * sg * sg * sg; });
      hi = lo;
    }
    // upper half in mu = t - tau
    double mu_hi = 0.5 * t;
    const double mu_cut = t * 1e-13;
    while (mu_hi > mu_cut) {
      const double mu_lo = std::max(mu_cut, 0.5 * mu_hi);
      gl_panel(mu_lo, mu_hi, [&](double mu) { return t - mu; }, [](double) { return 1.0; });
      mu_hi = mu_lo;
    }
  }

  // field U(y, t) on the y grid
  // field U(y, t) on the y grid
  EvalRequest freq;
  for (double y : ys) freq.points.push_back({y, t});
  freq.deriv_orders = {{0, 0}};
  SolveOptions sopt;
  sopt.tol = 1e-10;
  sopt.threads = opt.threads;
  const SolutionField fieldU = solve(data, freq, sopt);

  // second and third derivative traces at eps and eps/2; the transforms are
  // extrapolated after integration, where the eps dependence is smooth
  EvalRequest treq;
  for (auto [tau, wq] : tnodes) {
    (void)wq;
    treq.points.push_back({opt.trace_eps, tau});
    treq.points.push_back({0.5 * opt.trace_eps, tau});
  }
  treq.deriv_orders = {{2, 0}, {3, 0}};
  const SolutionField traces = solve(data, treq, sopt);

  std::vector<double> out(lambdas.size(), 0.0);
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const cx l = lambdas[li];
    const cx w = d.omega(l);
    cx uhat{};
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double wq = gl_w[k % 5] * X / fp;
      uhat += wq * stable_exp(-iu * l * ys[k]) * fieldU.values[k];
    }
    cx E2a{}, E3a{}, E2b{}, E3b{};
    for (std::size_t k = 0; k < tnodes.size(); ++k) {
      const auto [tau, wq] = tnodes[k];
      const cx damp = wq * stable_exp(-w * (t - tau));
      E2a += damp * traces.at(2 * k, 0);
      E3a += damp * traces.at(2 * k, 1);
      E2b += damp * traces.at(2 * k + 1, 0);
      E3b += damp * traces.at(2 * k + 1, 1);
    }
    const cx E2 = 2.0 * E2b - E2a;
    const cx E3 = 2.0 * E3b - E3a;
    const cx r2 = d.rho_squared(l);
    const cx Eg0 = Dt_E(kit.g0, w, t, {}, 0);
    const cx Eg1 = Dt_E(kit.g1, w, t, {}, 0);
    cx Ftil{};
    if (kit.have_f) Ftil = Dt_F(kit, l, w, t, {}, 0);

    const cx terms[6] = {uhat,
                         -stable_exp(-w * t) * kit.u0hat(l),
                         -beta * (E3 + iu * l * E2),
                         beta * r2 * Eg1,
                         iu * l * beta * r2 * Eg0,
                         -Ftil};
    cx resid{};
    double scale = 0.0;
    for (const cx& v : terms) {
      resid += v;
      scale = std::max(scale, std::abs(v));
    }
    out[li] = std::abs(resid) / std::max(scale, 1e-300);
  }
  return out;
}

// ----- half-value check -------------------------------------------------------

std::vector<HalfValueResult> half_value_check(const ProblemData& data,
                                              const std::vector<double>& t_list,
                                              double tol) {
  data.validate();
  if (data.family != Family::BIHARMONIC && data.family != Family::CH_PLUS)
    throw DomainError("half_value_check: biharmonic or ch_plus");

  double s = 1.0;
  const ProblemData norm = data.family == Family::BIHARMONIC
                               ? normalize_biharmonic(data, s)
                               : data;
  const Dispersion d = norm.dispersion();
  const DataKit kit = make_datakit(norm, d, true);
  const bool bih = norm.family == Family::BIHARMONIC;

  std::vector<HalfValueResult> out;
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("half_value_check: t must be positive");
    HalfValueResult res;
    res.t = t;
    if (kit.g0.zero && kit.g1.zero) {
      res.value = cx{};
      out.push_back(res);
      continue;
    }

    // the kernel splits into a pure 1/omega part, summable only as a
    // generalized integral (tapered below), and a remainder that decays on
    // the rotated rays
    struct Piece {
      ContourPath path;
      cx coef;
    };
    std::vector<Piece> pieces;
    if (bih) {
      auto [G1, G2] = gamma_biharmonic_rotated();
      pieces.push_back({G1, kGamma[0].c_g0});
      pieces.push_back({G2, kGamma[1].c_g0});
    } else {
      pieces.push_back({integration_boundary(d), cx(-2.0, 0.0) * iu});
    }

    auto kernel_full = [&](cx l) -> cx {
      const cx w = d.omega(l);
      if (bih) return l * l * l * Dt_E(kit.g0, w, t, {}, 0);
      const cx r = kit.rho_up(l);
      return l * (iu * l + r) * (r * Dt_E(kit.g0, w, t, {}, 0) - Dt_E(kit.g1, w, t, {}, 0));
    };
    auto kernel_rational = [&](cx l) -> cx {
      const cx w = d.omega(l);
      if (bih) return l * l * l * kit.g0.val(0, t) / w;
      const cx r = kit.rho_up(l);
      return l * (iu * l + r) * (r * kit.g0.val(0, t) - kit.g1.val(0, t)) / w;
    };
    // E(w,t) - g(t)/w = -e^{-wt} g(0)/w - E_{g'}(w,t)/w
    auto Ediff = [&](const SigKit& g, cx w, double t_) -> cx {
      if (g.zero) return {};
      return -stable_exp(-w * t_) * g.d0[0] / w - g.E(1, w, t_, t_) / w;
    };
    auto kernel_rest = [&](cx l) -> cx {
      const cx w = d.omega(l);
      if (bih) return l * l * l * Ediff(kit.g0, w, t);
      const cx r = kit.rho_up(l);
      return l * (iu * l + r) * (r * Ediff(kit.g0, w, t) - Ediff(kit.g1, w, t));
    };

    // rotating a ray changes a generalized integral with a c/lambda tail by
    // the arc term i c (theta_orig - theta_rot); collect those analytically
    cx arc_correction{};
    {
      const double far = 1e8;
      auto add_arc = [&](cx coef, double th_orig, double th_rot, int orient) {
        const cx lam = far * std::polar(1.0, th_rot);
        const cx cinf = lam * kernel_rational(lam);
        arc_correction += double(orient) * coef * iu * cinf * (th_orig - th_rot);
      };
      if (bih) {
        add_arc(kGamma[0].c_g0, 7.0 * pi / 8.0, 15.0 * pi / 16.0, -1);
        add_arc(kGamma[0].c_g0, 5.0 * pi / 8.0, 9.0 * pi / 16.0, +1);
        add_arc(kGamma[1].c_g0, 3.0 * pi / 8.0, 7.0 * pi / 16.0, -1);
        add_arc(kGamma[1].c_g0, pi / 8.0, pi / 16.0, +1);
      } else {
        const cx coef = cx(-2.0, 0.0) * iu;
        add_arc(coef, 7.0 * pi / 8.0, 15.0 * pi / 16.0, -1);
        add_arc(coef, pi / 8.0, pi / 16.0, +1);
        add_arc(coef, 3.0 * pi / 8.0, 7.0 * pi / 16.0, -1);
        add_arc(coef, 5.0 * pi / 8.0, 9.0 * pi / 16.0, +1);
      }
    }

    const double s0 = 1.0;  // ray parameter where the tail split starts
    cx fixed = arc_correction;
    for (const auto& pc : pieces) {
      // base stubs with the full integrand
      for (const auto& seg : pc.path.segments) {
        if (seg.kind != SegKind::Ray) {  // CH_MINUS never reaches here
          continue;
        }
        ContourPath stub;
        stub.segments.push_back(make_segment(seg.point(0.0), seg.point(s0)));
        if (seg.orientation < 0) stub = stub.reversed();
        QuadOptions opt;
        opt.tol = tol;
        fixed += pc.coef * integrate_path(kernel_full, stub, opt).value;
      }
      // decaying remainder on the ray tails
      {
        ContourPath tails;
        tails.disjoint = true;
        for (const auto& seg : pc.path.segments) {
          PathSegment tail = seg;
          tail.base = seg.point(s0);
          tails.segments.push_back(tail);
        }
        QuadOptions opt;
        opt.tol = tol;
        opt.trunc_R = std::max(truncation_radius_t(d, t, 4, tol) + s0 + 2.0,
                               std::pow(4.0 / tol, 0.25) + s0);
        fixed += pc.coef * integrate_path(kernel_rest, tails, opt).value;
      }
    }

    auto tapered = [&](double R) {
      auto weight = [R](double a) {
        if (a <= R) return 1.0;
        if (a >= 2.0 * R) return 0.0;
        return 0.5 * (1.0 + std::cos(pi * (a - R) / R));
      };
      cx acc{};
      for (const auto& pc : pieces) {
        ContourPath tails;
        tails.disjoint = true;
        for (const auto& seg : pc.path.segments) {
          PathSegment tail = seg;
          tail.base = seg.point(s0);
          tails.segments.push_back(tail);
        }
        QuadOptions opt;
        opt.tol = tol;
        opt.trunc_R = 2.0 * R + s0 + 2.0;
        acc += pc.coef * integrate_path(
                             [&](cx l) { return weight(std::abs(l)) * kernel_rational(l); },
                             tails, opt)
                             .value;
      }
      return acc;
    };

    double R = std::max(4.0, 2.0 * d.cut_start() + 2.0);
    cx prev = fixed + tapered(R);
    bool settled = false;
    for (int esc = 0; esc < 8; ++esc) {
      R *= 2.0;
      const cx cur = fixed + tapered(R);
      const double denom =
          std::max({std::abs(cur), std::abs(prev), 1e-8 * (1.0 + std::abs(norm.g0(t)))});
      if (std::abs(cur - prev) <= 0.01 * denom) {
        prev = cur;
        settled = true;
        break;
      }
      prev = cur;
    }
    if (!settled)
      throw NonConvergent("half_value_check: tapered values did not stabilize");
    res.value = prev;
    res.R_used = R;
    const double g0t = norm.g0(t);
    if (std::abs(g0t) > 1e-14) res.ratio = (prev / (2.0 * pi * g0t)).real();
    out.push_back(res);
  }
  return out;
}

// ----- non-uniqueness construction --------------------------------------------

namespace {

// tails of the spectral boundary rotated into the decay wedges, joined by
// arcs of radius r through the region interior
ContourPath nonuniqueness_contour(double r) {
  const double a1 = pi / 16.0, a2 = 7.0 * pi / 16.0, a3 = 9.0 * pi / 16.0,
               a4 = 15.0 * pi / 16.0;
  ContourPath path;
  path.label = "Gamma_nonuniqueness";
  path.disjoint = true;
  // left piece: in, sweep down across the region, out
  path.segments.push_back(
      make_ray(r * std::polar(1.0, a4), std::polar(1.0, a4), -1, std::sin(a4)));
  path.segments.push_back(make_arc(0.0, r, a4, a3));
  path.segments.push_back(
      make_ray(r * std::polar(1.0, a3), std::polar(1.0, a3), +1, std::sin(a3)));
  // right piece
  path.segments.push_back(
      make_ray(r * std::polar(1.0, a2), std::polar(1.0, a2), -1, std::sin(a2)));
  path.segments.push_back(make_arc(0.0, r, a2, a1));
  path.segments.push_back(
      make_ray(r * std::polar(1.0, a1), std::polar(1.0, a1), +1, std::sin(a1)));
  return path;
}

}  // namespace

NonUniquenessResult nonuniqueness_pair(double alpha, double beta, double r,
                                       const EvalRequest& grid, const SolveOptions& opt) {
  if (!(alpha >= 0.0) || !(beta > 0.0))
    throw DomainError("nonuniqueness_pair: need alpha >= 0, beta > 0");
  if (!(r > std::sqrt(alpha / beta)))
    throw DomainError("nonuniqueness_pair: need r > sqrt(alpha/beta)");
  grid.validate();

  ProblemData data = zero_problem(Family::CH_PLUS, alpha, beta);
  data.g0 = make_time_signal("const", {{"value", 1.0}});

  NonUniquenessResult out;
  out.U = solve_ch(data, grid, opt);

  const Dispersion d = data.dispersion();
  out.v.n_points = grid.points.size();
  out.v.n_orders = 1;
  out.v.values.assign(grid.points.size(), cx{});
  out.v.error_ests.assign(grid.points.size(), 0.0);

  const ContourPath gamma = nonuniqueness_contour(r);
  parallel_for(grid.points.size(), opt.threads, [&](std::size_t pi_) {
    const auto [x, t] = grid.points[pi_];
    const double Rx = truncation_radius_x(x, std::sin(pi / 16.0), 4, opt.tol);
    auto f = [&](cx l) {
      const cx rho = rho_value(d, l, CutSide::from_right_quadrant);
      return stable_exp(iu * l * x - d.omega(l) * t) * l * (iu * l + rho) * rho;
    };
    QuadOptions qopt;
    qopt.tol = opt.tol;
    qopt.osc.x_freq = x;
    qopt.trunc_R = std::max(Rx, 2.0 * r);
    const QuadratureReport rep = integrate_path(f, gamma, qopt);
    out.v.values[pi_] = -beta * iu / pi * rep.value;
    out.v.error_ests[pi_] = beta / pi * rep.abs_error_est;
  });
  return out;
}

// ----- interior-point Laplace expansion ----------------------------------------

std::pair<cx, cx> laplace_expand(const std::array<cx, 4>& phi_derivs,
                                 const std::array<cx, 3>& h_derivs, double t) {
  const cx phi0 = phi_derivs[0], phi2 = phi_derivs[1], phi3 = phi_derivs[2],
           phi4 = phi_derivs[3];
  const cx h0 = h_derivs[0], h1 = h_derivs[1], h2 = h_derivs[2];
  if (!(phi2.real() < 0.0))
    throw DomainError("laplace_expand: need phi''(lambda0) < 0");
  if (!(t > 0.0)) throw DomainError("laplace_expand: t must be positive");

  const cx front = stable_exp(phi0 * t) * std::sqrt(2.0 * pi / (-phi2));
  const cx leading = front * h0 / std::sqrt(t);
  const cx bracket = -h2 / (2.0 * phi2) + h0 * phi4 / (8.0 * phi2 * phi2) +
                     h1 * phi3 / (2.0 * phi2 * phi2) -
                     5.0 * h0 * phi3 * phi3 / (24.0 * phi2 * phi2 * phi2);
  const cx correction = front * bracket / (t * std::sqrt(t));
  return {leading, correction};
}

}  // namespace utmq
