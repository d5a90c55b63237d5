#include "utmq/data.hpp"

#include <algorithm>
#include <cmath>

namespace utmq {

namespace {

constexpr int kDerivOrder = 8;

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double binom(int n, int k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

void require_consumed(const std::map<std::string, double>& params, const std::string& id) {
  if (!params.empty())
    throw ConfigError("preset '" + id + "': unknown parameter '" + params.begin()->first + "'");
}

double take(std::map<std::string, double>& params, const std::string& key, double dflt) {
  auto it = params.find(key);
  if (it == params.end()) return dflt;
  const double v = it->second;
  params.erase(it);
  return v;
}

}  // namespace

// ----- time signals ---------------------------------------------------------

bool TimeSignal::is_zero() const { return id == "zero"; }

TimeSignal time_signal_from_model(TimeSignalModel m, std::string id) {
  TimeSignal g;
  g.model = m;
  g.id = std::move(id);
  g.fn = [m](double t) {
    cx acc{};
    for (const auto& [A, s] : m.exp_terms) acc += A * std::exp(s * t);
    double p = 0.0;
    for (std::size_t k = m.poly.size(); k-- > 0;) p = p * t + m.poly[k];
    return acc.real() + p;
  };
  g.derivs_at_zero.resize(kDerivOrder + 1, 0.0);
  for (int j = 0; j <= kDerivOrder; ++j) {
    cx acc{};
    for (const auto& [A, s] : m.exp_terms) acc += A * ipow(s, j);
    double v = acc.real();
    if (j < int(m.poly.size())) v += factorial(j) * m.poly[j];
    g.derivs_at_zero[j] = v;
  }
  return g;
}

TimeSignal TimeSignal::derivative() const {
  if (!model) throw DomainError("TimeSignal::derivative: signal has no closed model");
  TimeSignalModel dm;
  for (const auto& [A, s] : model->exp_terms) dm.exp_terms.push_back({A * s, s});
  for (std::size_t k = 1; k < model->poly.size(); ++k)
    dm.poly.push_back(double(k) * model->poly[k]);
  return time_signal_from_model(dm, id + "'");
}

namespace {

// int_0^T e^{-omega (t - tau)} e^{s tau} dtau, exponent-safe
cx stable_exp_moment(cx omega, cx s, double t, double T) {
  const cx z = (omega + s) * T;
  if (std::abs(z) < 1e-4) return stable_exp(-omega * t) * T * expm1_over(z);
  return (stable_exp(s * T + omega * (T - t)) - stable_exp(-omega * t)) / (omega + s);
}

// int_0^T e^{-omega (t - tau)} tau^k dtau
cx stable_poly_moment(cx omega, int k, double t, double T) {
  const cx z = omega * T;
  if (std::abs(z) <= 12.0) {
    // e^{-omega t} T^{k+1} sum_m z^m / (m! (k+m+1))
    cx sum{};
    cx term{1.0, 0.0};
    for (int m = 0; m < 220; ++m) {
      const cx add = term / double(k + m + 1);
      sum += add;
      if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum)) && m > 2) break;
      term *= z / double(m + 1);
    }
    return stable_exp(-omega * t) * std::pow(T, k + 1) * sum;
  }
  // upward recursion, |omega T| large so the divisions are benign
  cx I = (stable_exp(-omega * (t - T)) - stable_exp(-omega * t)) / omega;
  for (int j = 1; j <= k; ++j)
    I = (stable_exp(-omega * (t - T)) * std::pow(T, j) - double(j) * I) / omega;
  return I;
}

}  // namespace

cx TimeSignal::stable_transform(cx om, double t, double T) const {
  if (!model) throw DomainError("TimeSignal::stable_transform: signal has no closed model");
  cx acc{};
  for (const auto& [A, s] : model->exp_terms) acc += A * stable_exp_moment(om, s, t, T);
  for (std::size_t k = 0; k < model->poly.size(); ++k)
    if (model->poly[k] != 0.0) acc += model->poly[k] * stable_poly_moment(om, int(k), t, T);
  return acc;
}

cx TimeSignal::horizon_tail(cx om, double t, double T) const {
  if (!model) throw DomainError("TimeSignal::horizon_tail: signal has no closed model");
  if (T < t) throw DomainError("TimeSignal::horizon_tail: need T >= t");
  cx acc{};
  const double W = T - t;
  for (const auto& [A, ss] : model->exp_terms) {
    const cx z = (om + ss) * W;
    if (std::abs(z) < 1e-4) {
      acc += A * stable_exp(ss * t) * W * expm1_over(z);
    } else {
      acc += A * (stable_exp(ss * T + om * W) - stable_exp(ss * t)) / (om + ss);
    }
  }
  for (std::size_t k = 0; k < model->poly.size(); ++k) {
    if (model->poly[k] == 0.0) continue;
    // shift tau = t + sigma and expand the power
    double tpow = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double bin = factorial(int(k)) / (factorial(int(j)) * factorial(int(k - j)));
      const double tk = std::pow(t, double(k - j));
      acc += model->poly[k] * bin * tk * stable_poly_moment(om, int(j), 0.0, W);
      (void)tpow;
    }
  }
  return acc;
}

TimeSignal make_time_signal(const std::string& id, std::map<std::string, double> params) {
  TimeSignalModel m;
  if (id == "zero") {
    require_consumed(params, id);
    auto g = time_signal_from_model(m, "zero");
    return g;
  }
  if (id == "const") {
    m.poly = {take(params, "value", 1.0)};
    require_consumed(params, id);
    return time_signal_from_model(m, "const");
  }
  if (id == "poly") {
    std::vector<double> c;
    for (int k = 0; k <= 4; ++k) c.push_back(take(params, "c" + std::to_string(k), 0.0));
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    m.poly = c;
    require_consumed(params, id);
    return time_signal_from_model(m, "poly");
  }
  if (id == "exp") {
    const double a = take(params, "scale", 1.0);
    const double r = take(params, "rate", 1.0);
    m.exp_terms.push_back({cx(a, 0.0), cx(-r, 0.0)});
    require_consumed(params, id);
    return time_signal_from_model(m, "exp");
  }
  if (id == "one_minus_exp") {
    const double a = take(params, "scale", 1.0);
    const double r = take(params, "rate", 1.0);
    m.poly = {a};
    m.exp_terms.push_back({cx(-a, 0.0), cx(-r, 0.0)});
    require_consumed(params, id);
    return time_signal_from_model(m, "one_minus_exp");
  }
  if (id == "sin" || id == "cos") {
    const double a = take(params, "scale", 1.0);
    const double w = take(params, "freq", 1.0);
    double phase = take(params, "phase", 0.0);
    if (id == "cos") phase += 0.5 * pi;
    // a sin(w t + phase) = Im[a e^{i phase} e^{i w t}]
    const cx amp = a * std::polar(1.0, phase);
    m.exp_terms.push_back({amp / (2.0 * iu), cx(0.0, w)});
    m.exp_terms.push_back({-std::conj(amp) / (2.0 * iu), cx(0.0, -w)});
    require_consumed(params, id);
    auto g = time_signal_from_model(m, id);
    if (w != 0.0) g.period_hint = 2.0 * pi / std::abs(w);
    return g;
  }
  if (id == "sin_period") {
    const double a = take(params, "scale", 1.0);
    const double T = take(params, "period", 1.0);
    if (T <= 0.0) throw ConfigError("sin_period: period must be positive");
    std::map<std::string, double> p{{"scale", a}, {"freq", 2.0 * pi / T}};
    require_consumed(params, id);
    auto g = make_time_signal("sin", p);
    g.id = "sin_period";
    g.period_hint = T;
    return g;
  }
  throw ConfigError("unknown time signal preset '" + id + "'");
}

// ----- half-line functions --------------------------------------------------

bool HalfLineFunction::is_zero() const { return id == "zero"; }

bool HalfLineFunction::has_closed_hat() const {
  return model && model->gauss.empty() && !model->step;
}

cx HalfLineFunction::hat_closed(cx lambda) const {
  if (!has_closed_hat()) throw DomainError("hat_closed: no closed transform for this preset");
  cx acc{};
  for (const auto& tm : model->poly_exp) {
    // int_0^inf y^p e^{-(i lambda + a) y} dy = p! / (i lambda + a)^{p+1}
    const cx denom = iu * lambda + tm.rate;
    acc += tm.coef * factorial(tm.power) / ipow(denom, tm.power + 1);
  }
  return acc;
}

namespace {

double sample_scale(const std::function<double(double)>& fn) {
  double s = 0.0;
  for (int k = 0; k <= 400; ++k) s = std::max(s, std::abs(fn(0.05 * k)));
  return s > 0.0 ? s : 1.0;
}

HalfLineFunction from_model(HalfLineModel m, std::string id) {
  HalfLineFunction u;
  u.model = m;
  u.id = std::move(id);
  u.fn = [m](double y) {
    double acc = 0.0;
    for (const auto& t : m.poly_exp) acc += t.coef * std::pow(y, t.power) * std::exp(-t.rate * y);
    for (const auto& t : m.gauss) acc += t.coef * std::pow(y, t.power) * std::exp(-t.rate * y * y);
    if (m.step) acc += m.step->scale / (1.0 + std::exp((y - m.step->y0) / m.step->width));
    return acc;
  };

  u.derivs_at_zero.assign(kDerivOrder + 1, 0.0);
  for (const auto& t : m.poly_exp)
    for (int j = t.power; j <= kDerivOrder; ++j)
      u.derivs_at_zero[j] +=
          t.coef * binom(j, t.power) * factorial(t.power) * std::pow(-t.rate, j - t.power);
  for (const auto& t : m.gauss)
    for (int j = t.power; j <= kDerivOrder; ++j) {
      const int d = j - t.power;
      if (d % 2) continue;
      u.derivs_at_zero[j] +=
          t.coef * factorial(j) * std::pow(-t.rate, d / 2) / factorial(d / 2);
    }
  if (m.step) {
    // d^j/dy^j of 1/(1+e^{z}) with z = (y-y0)/w, via q_{j+1} = q_j' (v^2 - v)
    const double v0 = 1.0 / (1.0 + std::exp(-m.step->y0 / m.step->width));
    std::vector<double> q = {0.0, 1.0};  // q_0(v) = v
    for (int j = 0; j <= kDerivOrder; ++j) {
      double val = 0.0, p = 1.0;
      for (double ck : q) {
        val += ck * p;
        p *= v0;
      }
      u.derivs_at_zero[j] += m.step->scale * val / std::pow(m.step->width, j);
      // next polynomial: q' * (v^2 - v)
      std::vector<double> dq(std::max<std::size_t>(1, q.size() - 1), 0.0);
      for (std::size_t k = 1; k < q.size(); ++k) dq[k - 1] = double(k) * q[k];
      std::vector<double> nq(dq.size() + 2, 0.0);
      for (std::size_t k = 0; k < dq.size(); ++k) {
        nq[k + 2] += dq[k];
        nq[k + 1] -= dq[k];
      }
      q = nq;
    }
  }

  // decay classification: slowest exponential wins; pure gaussians are
  // schwartz-tagged
  if (!m.poly_exp.empty() || m.step) {
    u.decay = DecayClass::exp_decay;
    double r = 1e300;
    for (const auto& t : m.poly_exp) r = std::min(r, t.rate);
    if (m.step) r = std::min(r, 1.0 / m.step->width);
    u.decay_rate = r;
  } else {
    u.decay = DecayClass::schwartz;
  }
  u.scale = sample_scale(u.fn);
  return u;
}

}  // namespace

HalfLineFunction half_line_from_poly_exp(std::vector<PolyExpTerm> terms, std::string id) {
  HalfLineModel m;
  m.poly_exp = std::move(terms);
  return from_model(std::move(m), std::move(id));
}

HalfLineFunction make_half_line(const std::string& id, std::map<std::string, double> params) {
  if (id == "zero") {
    require_consumed(params, id);
    HalfLineFunction u = half_line_from_poly_exp({}, "zero");
    u.decay = DecayClass::compact_support;
    u.support_bound = 1.0;
    return u;
  }
  if (id == "exp") {
    const double s = take(params, "scale", 1.0);
    const double r = take(params, "rate", 1.0);
    if (r <= 0.0) throw ConfigError("exp preset: rate must be positive");
    require_consumed(params, id);
    return half_line_from_poly_exp({{s, 0, r}}, "exp");
  }
  if (id == "poly_exp") {
    const double r = take(params, "rate", 1.0);
    if (r <= 0.0) throw ConfigError("poly_exp preset: rate must be positive");
    std::vector<PolyExpTerm> terms;
    for (int p = 0; p <= kDerivOrder; ++p) {
      const double c = take(params, "c" + std::to_string(p), 0.0);
      if (c != 0.0) terms.push_back({c, p, r});
    }
    require_consumed(params, id);
    if (terms.empty()) throw ConfigError("poly_exp preset: all coefficients zero");
    return half_line_from_poly_exp(std::move(terms), "poly_exp");
  }
  if (id == "gauss") {
    const double s = take(params, "scale", 1.0);
    const double r = take(params, "rate", 1.0);
    const int p = int(take(params, "power", 0.0));
    if (r <= 0.0) throw ConfigError("gauss preset: rate must be positive");
    require_consumed(params, id);
    HalfLineModel m;
    m.gauss.push_back({s, p, r});
    return from_model(std::move(m), "gauss");
  }
  if (id == "smoothstep") {
    LogisticStep st;
    st.scale = take(params, "scale", 1.0);
    st.y0 = take(params, "y0", 1.0);
    st.width = take(params, "width", 0.25);
    if (st.width <= 0.0) throw ConfigError("smoothstep preset: width must be positive");
    require_consumed(params, id);
    HalfLineModel m;
    m.step = st;
    return from_model(std::move(m), "smoothstep");
  }
  throw ConfigError("unknown half-line preset '" + id + "'");
}

HalfLineFunction half_line_from_table(const std::vector<double>& y,
                                      const std::vector<double>& u) {
  if (y.size() != u.size() || y.size() < 4)
    throw ConfigError("tabulated data: need at least 4 matching samples");
  for (std::size_t k = 1; k < y.size(); ++k)
    if (y[k] <= y[k - 1]) throw ConfigError("tabulated data: abscissae must increase");
  const std::size_t n = y.size();

  // natural cubic spline second derivatives
  std::vector<double> m2(n, 0.0), rhs(n, 0.0), diag(n, 2.0), sub(n, 0.0), sup(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = y[i] - y[i - 1], h1 = y[i + 1] - y[i];
    sub[i] = h0 / (h0 + h1);
    sup[i] = h1 / (h0 + h1);
    rhs[i] = 6.0 / (h0 + h1) * ((u[i + 1] - u[i]) / h1 - (u[i] - u[i - 1]) / h0);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) m2[i] = (rhs[i] - sup[i] * m2[i + 1]) / diag[i];

  auto ydata = y;
  auto udata = u;
  HalfLineFunction out;
  out.fn = [ydata, udata, m2](double x) {
    if (x <= ydata.front()) return udata.front();
    if (x >= ydata.back()) return 0.0;
    auto it = std::upper_bound(ydata.begin(), ydata.end(), x);
    const std::size_t i = std::size_t(it - ydata.begin()) - 1;
    const double h = ydata[i + 1] - ydata[i];
    const double a = (ydata[i + 1] - x) / h, b = (x - ydata[i]) / h;
    return a * udata[i] + b * udata[i + 1] +
           ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0;
  };
  out.derivs_at_zero.assign(kDerivOrder + 1, 0.0);
  {
    const double h = ydata[1] - ydata[0];
    out.derivs_at_zero[0] = udata[0];
    out.derivs_at_zero[1] = (udata[1] - udata[0]) / h - h / 6.0 * (2.0 * m2[0] + m2[1]);
    out.derivs_at_zero[2] = m2[0];
    out.derivs_at_zero[3] = (m2[1] - m2[0]) / h;
  }
  out.decay = DecayClass::compact_support;
  out.support_bound = ydata.back();
  out.scale = sample_scale(out.fn);
  out.reduced_accuracy = true;
  out.id = "tabulated";
  return out;
}

double half_line_truncation(const HalfLineFunction& u) {
  if (u.is_zero()) return 1.0;
  if (u.decay == DecayClass::compact_support) return u.support_bound;
  const double target = 1e-14 * u.scale;
  double X = 4.0;
  while (X < 1e6) {
    // check a few points past X, not just the endpoint
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      const double xx = X * (1.0 + 0.25 * k);
      if (std::abs(u(xx)) * xx >= target) {
        ok = false;
        break;
      }
    }
    if (ok) return X;
    X *= 1.5;
  }
  throw NonConvergent("half_line_truncation: no window satisfies the decay certificate");
}

// ----- space-time forcing ---------------------------------------------------

bool SpaceTimeFunction::empty() const {
  for (const auto& t : terms)
    if (!t.space.is_zero() && !t.time.is_zero()) return false;
  return true;
}

double SpaceTimeFunction::operator()(double x, double t) const {
  double acc = 0.0;
  for (const auto& term : terms) acc += term.space(x) * term.time(t);
  return acc;
}

// ----- problem payload ------------------------------------------------------

void ProblemData::validate() const {
  if (beta <= 0.0) throw DomainError("problem: beta must be positive");
  switch (family) {
    case Family::BIHARMONIC:
      if (alpha != 0.0) throw DomainError("problem: biharmonic requires alpha = 0");
      break;
    case Family::CH_PLUS:
      if (alpha < 0.0) throw DomainError("problem: ch_plus requires alpha >= 0");
      break;
    case Family::CH_MINUS:
      if (alpha <= 0.0) throw DomainError("problem: ch_minus requires alpha > 0");
      break;
  }
}

Dispersion ProblemData::dispersion() const {
  if (family == Family::BIHARMONIC) return Dispersion(Family::BIHARMONIC, 0.0, 1.0);
  return Dispersion(family, alpha, beta);
}

int ProblemData::compatibility_order(double tol) const {
  const double s = tol * std::max({1.0, u0.scale, std::abs(g0(0.0)), std::abs(g1(0.0))});
  auto zero = [&](double v) { return std::abs(v) <= s; };
  const auto& du = u0.derivs_at_zero;
  if (!(zero(du[0]) && zero(g0(0.0)))) return 0;
  if (!(zero(du[1]) && zero(g1(0.0)))) return 1;
  if (!zero(du[2])) return 2;
  if (!zero(du[3])) return 3;
  const double g0p = g0.derivs_at_zero.size() > 1 ? g0.derivs_at_zero[1] : 0.0;
  const double f00 = f.empty() ? 0.0 : f(0.0, 0.0);
  if (!(zero(g0p) && zero(beta * du[4] - f00))) return 4;
  return 5;
}

ProblemData zero_problem(Family family, double alpha, double beta) {
  ProblemData p;
  p.u0 = make_half_line("zero", {});
  p.g0 = make_time_signal("zero", {});
  p.g1 = make_time_signal("zero", {});
  p.alpha = alpha;
  p.beta = beta;
  p.family = family;
  p.validate();
  return p;
}

}  // namespace utmq
