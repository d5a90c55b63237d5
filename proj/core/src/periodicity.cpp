#include <algorithm>
#include <cmath>

#include "utmq/errors.hpp"
#include "utmq/solver.hpp"

namespace utmq {

namespace {

bool compatible_period(const TimeSignal& g, double T) {
  if (g.is_zero() || g.id == "const") return true;
  if (!g.period_hint) return false;
  const double k = T / *g.period_hint;
  return std::abs(k - std::round(k)) < 1e-9 && std::round(k) >= 1.0;
}

// int_{-T}^0 e^{w tau} g(tau) dtau for a T-periodic signal
cx window_transform(const TimeSignal& g, cx w, double T) {
  if (g.is_zero()) return {};
  return stable_exp(-w * T) * g.stable_transform(w, 0.0, T);
}

}  // namespace

PeriodicityFit periodicity_analysis(const ProblemData& data, double x0, double T,
                                    const std::vector<double>& t_grid,
                                    const SolveOptions& opt) {
  data.validate();
  if (data.family != Family::CH_PLUS)
    throw DomainError("periodicity_analysis: ch_plus only");
  if (!(T > 0.0) || !(x0 > 0.0))
    throw DomainError("periodicity_analysis: need T > 0 and x0 > 0");
  if (t_grid.size() < 3) throw DomainError("periodicity_analysis: need at least 3 times");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1]))
      throw DomainError("periodicity_analysis: t grid must increase");

  PeriodicityFit fit;
  fit.x0 = x0;
  fit.T = T;
  if (!compatible_period(data.g0, T) || !compatible_period(data.g1, T))
    throw DomainError("periodicity_analysis: boundary data are not T-periodic presets");

  // sampled differences U(x0, t+T) - U(x0, t)
  EvalRequest req;
  for (double t : t_grid) {
    req.points.push_back({x0, t});
    req.points.push_back({x0, t + T});
  }
  SolveOptions sopt = opt;
  sopt.tol = std::min(opt.tol, 1e-10);
  const SolutionField field = solve(data, req, sopt);
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const cx diff = field.at(2 * k + 1) - field.at(2 * k);
    fit.samples.push_back({t_grid[k], diff.real()});
  }

  // least squares on log|diff| vs log t
  std::vector<double> lx, ly;
  const double floor_ = 10.0 * sopt.tol;
  for (auto [t, dv] : fit.samples) {
    if (std::abs(dv) <= floor_) continue;
    lx.push_back(std::log(t));
    ly.push_back(std::log(std::abs(dv)));
  }
  if (lx.size() < 3)
    throw FitUnstable("periodicity_analysis: too few resolvable differences");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  const double nn = double(lx.size());
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double icept = (sy - slope * sx) / nn;
  double rss = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - (icept + slope * lx[k]);
    rss += r * r;
  }
  fit.fitted_exponent = slope;
  fit.fit_residual = std::sqrt(rss / nn);
  if (fit.fit_residual > 0.1)
    throw FitUnstable("periodicity_analysis: log-log fit residual exceeds 0.1");

  // coefficient of t^{-1/2} under the fitted model and under the forced model
  {
    double acc = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) acc += ly[k] + 0.5 * lx[k];
    fit.C1_fit = std::exp(acc / nn);
  }

  // Laplace expansion of the boundary-kernel window integrand at lambda0 = 0:
  //   h(l) = (-beta i/pi) e^{i l x0} l (i l + rho(l)) [rho(l) G0(omega(l)) - G1(omega(l))]
  // with Gk the transform of gk over one period window. h(0) = 0 because of
  // the l factor; the remaining derivatives come from high-order stencils of
  // the analytic closure.
  {
    const Dispersion d = data.dispersion();
    auto h = [&](double l) -> cx {
      if (l == 0.0) return {};
      const cx lam(l, 0.0);
      const cx r = rho_value(d, lam);
      const cx w = d.omega(lam);
      const cx D = r * window_transform(data.g0, w, T) - window_transform(data.g1, w, T);
      return (-data.beta * iu / pi) * stable_exp(iu * lam * x0) * lam * (iu * lam + r) * D;
    };
    const double dl = 5e-3;
    const cx h0{};
    const cx h1 = (-h(2 * dl) + 8.0 * h(dl) - 8.0 * h(-dl) + h(-2 * dl)) / (12.0 * dl);
    const cx h2 =
        (-h(2 * dl) + 16.0 * h(dl) - 30.0 * h(0.0) + 16.0 * h(-dl) - h(-2 * dl)) /
        (12.0 * dl * dl);
    const std::array<cx, 4> phid = {cx{}, cx(-2.0 * data.alpha, 0.0), cx{},
                                    cx(-24.0 * data.beta, 0.0)};
    const double t_ref = t_grid[t_grid.size() / 2];
    auto [lead, corr] = laplace_expand(phid, {h0, h1, h2}, t_ref);
    fit.laplace_leading = lead;
    fit.laplace_correction = corr;
    fit.C1_laplace = std::abs(lead) * std::sqrt(t_ref);
  }
  return fit;
}

}  // namespace utmq
