#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "utmq/data.hpp"
#include "utmq/fd.hpp"
#include "utmq/quadrature.hpp"
#include "utmq/transforms.hpp"

namespace utmq {

struct EvalRequest {
  std::vector<std::pair<double, double>> points;           // (x, t), both > 0
  std::vector<std::pair<int, int>> deriv_orders = {{0, 0}}; // (n, m), n + 4m <= 8
  std::optional<double> ehrenpreis_T;                       // fixed-horizon form

  void validate() const;
};

enum class Representation { automatic, ray, boundary };

struct SolveOptions {
  double tol = 1e-9;          // absolute budget per field value
  Representation representation = Representation::automatic;
  bool exact_transforms = true;  // closed-form data transforms when available
  int threads = 0;               // 0 = hardware concurrency
  bool collect_reports = false;
};

struct SolutionField {
  std::size_t n_points = 0;
  std::size_t n_orders = 0;
  std::vector<cx> values;          // [point * n_orders + order]
  std::vector<double> error_ests;
  std::vector<QuadratureReport> reports;
  std::vector<std::string> warnings;

  cx at(std::size_t p, std::size_t o = 0) const { return values[p * n_orders + o]; }
  double err(std::size_t p, std::size_t o = 0) const { return error_ests[p * n_orders + o]; }
};

SolutionField solve(const ProblemData& data, const EvalRequest& req,
                    const SolveOptions& opt = {});
SolutionField solve_biharmonic(const ProblemData& data, const EvalRequest& req,
                               const SolveOptions& opt = {});
SolutionField solve_ch(const ProblemData& data, const EvalRequest& req,
                       const SolveOptions& opt = {});

// ----- global relation ------------------------------------------------------

struct GlobalRelationOptions {
  double tol = 1e-9;
  double trace_eps = 1e-3;   // traces are read at x = trace_eps
  int field_panels = 48;     // spatial transform of the solved field
  int trace_panels = 96;     // time transforms of the solved traces
  int threads = 0;
};

// Normalized residual of the global relation at each lambda (Im lambda <= 0),
// using the solver's own field for the spatial transform and its own
// second/third derivative traces for the unknown boundary transforms.
std::vector<double> global_relation_residual(const ProblemData& data, double t,
                                             const std::vector<cx>& lambdas,
                                             const GlobalRelationOptions& opt = {});

// ----- half-value check -----------------------------------------------------

struct HalfValueResult {
  double t = 0.0;
  cx value{};
  std::optional<double> ratio;  // value / (2 pi g0(t)); empty for g0(t) = 0
  double R_used = 0.0;
};

// x = 0 evaluation of the boundary-kernel contour combination at horizon t,
// as a generalized integral (smooth cosine taper over [R, 2R], escalating R
// until two successive values agree within 1%).
std::vector<HalfValueResult> half_value_check(const ProblemData& data,
                                              const std::vector<double>& t_list,
                                              double tol = 1e-9);

// ----- non-uniqueness construction ------------------------------------------

struct NonUniquenessResult {
  SolutionField U;  // solution with u0 = 0, g0 = 1, g1 = 0
  SolutionField v;  // its time derivative, evaluated on the deformed contour
};

NonUniquenessResult nonuniqueness_pair(double alpha, double beta, double r,
                                       const EvalRequest& grid,
                                       const SolveOptions& opt = {});

// ----- interior-point Laplace expansion --------------------------------------

// phi_derivs = [phi(l0), phi'', phi''', phi''''], h_derivs = [h, h', h''];
// needs Re phi''(l0) < 0. Returns the t^{-1/2} leading term and the full
// t^{-3/2} correction term.
std::pair<cx, cx> laplace_expand(const std::array<cx, 4>& phi_derivs,
                                 const std::array<cx, 3>& h_derivs, double t);

// ----- eventual periodicity --------------------------------------------------

struct PeriodicityFit {
  double x0 = 0.0;
  double T = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, U(x0,t+T) - U(x0,t))
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;  // rms residual of the log-log fit
  double C1_fit = 0.0;        // coefficient of t^{-1/2} fitted from samples
  double C1_laplace = 0.0;    // same coefficient from the Laplace expansion
  cx laplace_leading{};
  cx laplace_correction{};
};

PeriodicityFit periodicity_analysis(const ProblemData& data, double x0, double T,
                                    const std::vector<double>& t_grid,
                                    const SolveOptions& opt = {});

}  // namespace utmq
