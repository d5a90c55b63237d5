#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "utmq/contour.hpp"
#include "utmq/dispersion.hpp"
#include "utmq/types.hpp"

namespace utmq {

struct OscHint {
  double x_freq = 0.0;   // |d phase/d lambda| of an e^{i lambda x} factor
  double t_scale = 0.0;  // time scale of an e^{-omega t} factor (informational)
};

struct QuadOptions {
  double tol = 1e-9;               // absolute tolerance for the whole path
  std::size_t max_panels = 1000000;
  OscHint osc;
  double trunc_R = 0.0;            // required when the path contains rays
};

struct QuadratureReport {
  cx value{};
  double abs_error_est = 0.0;
  std::size_t panels = 0;
  double truncation_R = 0.0;
  std::vector<std::string> warnings;
};

using Integrand = std::function<cx(cx)>;

QuadratureReport integrate_path(const Integrand& f, const ContourPath& path,
                                const QuadOptions& opt);

// Integral over the real line with decay supplied by e^{-omega(lambda) t}.
// Truncates symmetrically where Re omega(R) * t_decay covers the tolerance,
// padded by the integrand's polynomial growth degree.
QuadratureReport integrate_real_line(const Integrand& f, double tol, double t_decay,
                                     const Dispersion& d, int growth_degree = 0,
                                     double x_freq = 0.0);

// Truncation radius R with e^{-x sigma R} R^deg below tol along a path whose
// only decay is the e^{i lambda x} factor.
double truncation_radius_x(double x, double sigma, int growth_degree, double tol);

// Truncation radius from the e^{-Re omega(R) t} factor on the real axis.
double truncation_radius_t(const Dispersion& d, double t, int growth_degree, double tol);

}  // namespace utmq
