#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "utmq/dispersion.hpp"
#include "utmq/errors.hpp"
#include "utmq/types.hpp"

namespace utmq {

enum class DecayClass { schwartz, exp_decay, compact_support };

// ----- time signals ---------------------------------------------------------

// Closed-form signal model: sum of A e^{s t} terms (complex-conjugate pairs
// for oscillatory parts, the total is real) plus a real polynomial.
struct TimeSignalModel {
  std::vector<std::pair<cx, cx>> exp_terms;  // (amplitude, exponent)
  std::vector<double> poly;                  // poly[k] t^k
};

struct TimeSignal {
  std::function<double(double)> fn;
  std::vector<double> derivs_at_zero;  // d^j g / dt^j at 0, j = 0..8
  std::optional<double> period_hint;
  std::optional<TimeSignalModel> model;
  std::string id = "custom";

  double operator()(double t) const { return fn(t); }
  bool is_zero() const;
  bool has_model() const { return model.has_value(); }

  // analytic derivative signal (model-backed presets only)
  TimeSignal derivative() const;

  // closed form of int_0^T e^{-omega (t - tau)} g(tau) dtau; pass T = t for
  // the plain stable transform
  cx stable_transform(cx omega, double t, double T) const;

  // int_t^T e^{omega (tau - t)} g(tau) dtau, the fixed-horizon correction;
  // bounded wherever Re omega <= 0
  cx horizon_tail(cx omega, double t, double T) const;
};

TimeSignal make_time_signal(const std::string& id, std::map<std::string, double> params);
TimeSignal time_signal_from_model(TimeSignalModel m, std::string id);

// ----- half-line functions --------------------------------------------------

struct PolyExpTerm {
  double coef = 0.0;
  int power = 0;
  double rate = 1.0;  // coef y^power e^{-rate y}
};
struct GaussTerm {
  double coef = 0.0;
  int power = 0;
  double rate = 1.0;  // coef y^power e^{-rate y^2}
};
struct LogisticStep {
  double scale = 1.0;
  double y0 = 1.0;
  double width = 0.25;  // scale / (1 + e^{(y - y0)/width})
};

struct HalfLineModel {
  std::vector<PolyExpTerm> poly_exp;
  std::vector<GaussTerm> gauss;
  std::optional<LogisticStep> step;
};

struct HalfLineFunction {
  std::function<double(double)> fn;
  std::vector<double> derivs_at_zero;  // d^j u / dy^j at 0+, j = 0..8
  DecayClass decay = DecayClass::schwartz;
  double decay_rate = 0.0;     // exp_decay
  double support_bound = 0.0;  // compact_support
  std::optional<HalfLineModel> model;
  double scale = 1.0;  // max sampled |u|
  bool reduced_accuracy = false;
  std::string id = "custom";

  double operator()(double y) const { return fn(y); }
  bool is_zero() const;

  // closed-form half-line Fourier transform, available when the model is a
  // pure poly_exp sum
  bool has_closed_hat() const;
  cx hat_closed(cx lambda) const;
};

HalfLineFunction make_half_line(const std::string& id, std::map<std::string, double> params);
HalfLineFunction half_line_from_poly_exp(std::vector<PolyExpTerm> terms, std::string id);
// secondary ingestion path, cubic interpolation of samples (reduced accuracy)
HalfLineFunction half_line_from_table(const std::vector<double>& y,
                                      const std::vector<double>& u);

// smallest X with |u(X)| X below 1e-14 * scale (integration window)
double half_line_truncation(const HalfLineFunction& u);

// ----- space-time forcing ---------------------------------------------------

struct SeparableTerm {
  HalfLineFunction space;
  TimeSignal time;
};

struct SpaceTimeFunction {
  std::vector<SeparableTerm> terms;
  bool empty() const;
  double operator()(double x, double t) const;
};

// ----- problem payload ------------------------------------------------------

struct ProblemData {
  HalfLineFunction u0;
  TimeSignal g0, g1;
  SpaceTimeFunction f;
  double alpha = 0.0;
  double beta = 1.0;
  Family family = Family::BIHARMONIC;

  void validate() const;
  Dispersion dispersion() const;  // normalized for the biharmonic family

  // largest k for which the corner conditions hold (0 when u0(0) = g0(0) = 0
  // already fails); ladder:
  //   1: u0(0) = g0(0) = 0
  //   2: + u0'(0) = g1(0) = 0
  //   3: + u0''(0) = 0
  //   4: + u0'''(0) = 0
  //   5: + g0'(0) = 0 and beta u0''''(0) = f(0,0)
  int compatibility_order(double tol = 1e-12) const;
};

ProblemData zero_problem(Family family, double alpha, double beta);

}  // namespace utmq
