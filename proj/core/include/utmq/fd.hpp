#pragma once

#include <vector>

#include "utmq/data.hpp"

namespace utmq {

struct FDGrid {
  double L = 40.0;
  int nx = 1024;      // interior spacing h = L / nx
  double dt = 0.0;    // default 0.25 * h
  double t_end = 1.0;
  double theta = 0.5; // time weighting (0.5 = trapezoidal)

  double h() const { return L / nx; }
  void validate(const ProblemData& data) const;
};

// Space-time field on the grid: times t_k = k dt (store stride thins this),
// nodes x_i = i h, i = 0..nx.
struct FDField {
  double L = 0.0;
  double h = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> u;  // u[k][i]

  double at(std::size_t k, std::size_t i) const { return u[k][i]; }
  // bilinear interpolation; sets *interpolated when (x,t) is off the grid
  double value(double x, double t, bool* interpolated = nullptr) const;
  double l2_norm(std::size_t k) const;  // trapezoidal discrete L2
  std::size_t time_index(double t, bool* exact) const;
};

// Theta-weighted implicit finite differences for u_t = alpha u_xx
// - beta u_xxxx + f with u(0,t) = g0, u_x(0,t) = g1 (ghost point) and a
// clamped far end u(L) = u_x(L) = 0. CH_MINUS is rejected.
FDField fd_solve(const ProblemData& data, const FDGrid& grid);

struct CompareRow {
  double x = 0.0, t = 0.0;
  cx utm{};
  double fd = 0.0;
  double abs_err = 0.0, rel_err = 0.0;
  bool interpolated = false;
};

struct CompareTable {
  std::vector<CompareRow> rows;
  double linf_abs = 0.0;
  double linf_rel = 0.0;
  double l2_abs = 0.0;
  std::vector<std::string> warnings;  // InterpolationFlagged when off-grid
};

CompareTable compare(const std::vector<cx>& utm_values,
                     const std::vector<std::pair<double, double>>& points,
                     const FDField& fd);

}  // namespace utmq
