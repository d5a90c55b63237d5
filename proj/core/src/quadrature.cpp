#include "utmq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "utmq/errors.hpp"

namespace utmq {

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1]
constexpr double kron_x[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
constexpr double kron_w[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double gauss_w[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870};

struct Panel {
  std::size_t piece = 0;  // index into the flattened piece list
  double a = 0.0, b = 0.0;
  cx value{};
  double err = 0.0;
};

struct Piece {
  const PathSegment* seg = nullptr;
  double s0 = 0.0, s1 = 0.0;  // parameter window actually integrated
  double sign = 1.0;          // -1 for inward rays
};

// Gauss-Kronrod on one parameter panel of a piece.
Panel eval_panel(const Integrand& f, const Piece& pc, std::size_t piece_idx, double a,
                 double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  cx k15{}, g7{};
  for (int j = 0; j < 8; ++j) {
    for (int sgn = (j == 0 ? 1 : -1); sgn <= 1; sgn += 2) {
      const double s = mid + sgn * half * kron_x[j];
      const cx z = pc.seg->point(s);
      const cx dz = pc.seg->derivative(s);
      cx v = f(z) * dz;
      if (!is_finite(v)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "integrand not finite at lambda = (%.17g, %.17g)", z.real(),
                      z.imag());
        throw NaNEncountered(buf);
      }
      k15 += kron_w[j] * v;
      if (j % 2 == 0) g7 += gauss_w[j / 2] * v;
      if (j == 0) break;
    }
  }
  Panel p;
  p.piece = piece_idx;
  p.a = a;
  p.b = b;
  p.value = half * k15;
  // |K15 - G7| is a deliberate overestimate of the Kronrod error
  p.err = std::abs(half * (k15 - g7));
  return p;
}

struct PanelOrder {
  bool operator()(const Panel& a, const Panel& b) const { return a.err < b.err; }
};

}  // namespace

double truncation_radius_x(double x, double sigma, int growth_degree, double tol) {
  const double L = -std::log(std::max(1e-300, tol)) + 4.0;
  const double xs = std::max(1e-12, x * sigma);
  double R = L / xs;
  for (int it = 0; it < 8; ++it)
    R = (L + growth_degree * std::log1p(std::max(0.0, R))) / xs;
  return std::max(R, 2.0);
}

double truncation_radius_t(const Dispersion& d, double t, int growth_degree, double tol) {
  if (t <= 0.0) throw DomainError("truncation_radius_t: t must be positive");
  const double L = -std::log(std::max(1e-300, tol)) + 4.0;
  auto need = [&](double R) {
    return d.omega(cx(R, 0.0)).real() * t - growth_degree * std::log1p(R) - L;
  };
  double R = std::max(2.0, 2.0 * d.cut_start());
  while (need(R) < 0.0 && R < 1e8) R *= 1.5;
  double lo = R / 1.5, hi = R;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (need(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

QuadratureReport integrate_path(const Integrand& f, const ContourPath& path,
                                const QuadOptions& opt) {
  if (opt.tol <= 0.0) throw DomainError("integrate_path: tol must be positive");

  // flatten into parameter pieces; rays get a finite window from trunc_R
  std::vector<Piece> pieces;
  for (const auto& seg : path.segments) {
    Piece pc;
    pc.seg = &seg;
    if (seg.kind == SegKind::Ray) {
      if (opt.trunc_R <= 0.0)
        throw DomainError("integrate_path: path has rays, set trunc_R");
      const double base_r = std::abs(seg.base);
      const double span = std::max(0.0, opt.trunc_R - base_r);
      if (span <= 0.0) continue;
      pc.s0 = 0.0;
      pc.s1 = span;
      pc.sign = seg.orientation < 0 ? -1.0 : 1.0;
    } else {
      pc.s0 = 0.0;
      pc.s1 = 1.0;
      pc.sign = 1.0;
    }
    // nudge exact zero endpoints off the origin to dodge removable 0/0
    const cx p0 = pc.seg->point(pc.s0);
    const cx p1 = pc.seg->point(pc.s1);
    if (p0 == cx(0.0, 0.0)) pc.s0 += 1e-300;
    if (p1 == cx(0.0, 0.0)) pc.s1 -= 1e-300;
    if (pc.s1 > pc.s0) pieces.push_back(pc);
  }

  QuadratureReport rep;
  rep.truncation_R = opt.trunc_R;
  if (pieces.empty()) return rep;

  // initial panelization: cap panel width so the e^{i lambda x} phase swings
  // at most ~pi/4 per panel
  std::vector<Panel> done;
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> active;
  double err_sum = 0.0;
  double mag_sum = 0.0;  // sum of |panel value|, a floor for what is resolvable
  std::size_t panel_count = 0;

  auto push_panel = [&](std::size_t pi, double a, double b) {
    Panel p = eval_panel(f, pieces[pi], pi, a, b);
    err_sum += p.err;
    mag_sum += std::abs(p.value);
    ++panel_count;
    active.push(p);
  };

  for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
    const Piece& pc = pieces[pi];
    const double len = pc.s1 - pc.s0;
    const double mid_slope = std::abs(pc.seg->derivative(0.5 * (pc.s0 + pc.s1)));
    // enough panels that the e^{i lambda x} phase turns at most pi/4 per panel
    const double total_phase = opt.osc.x_freq * mid_slope * len;
    std::size_t n = std::max<std::size_t>(2, std::size_t(std::ceil(total_phase / (pi / 4.0))));
    n = std::min<std::size_t>(n, 16384);
    std::vector<double> cuts;
    cuts.push_back(pc.s0);
    for (std::size_t k = 1; k < n; ++k) cuts.push_back(pc.s0 + len * double(k) / double(n));
    cuts.push_back(pc.s1);
    // dyadic seeds from both ends so features living at a scale much smaller
    // than the window get panels of their own size; the error estimator
    // cannot flag structure that no initial node ever sampled
    for (int k = 1; k < 28; ++k) {
      const double off = len * std::pow(0.5, k);
      cuts.push_back(pc.s0 + off);
      cuts.push_back(pc.s1 - off);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      if (cuts[k + 1] > cuts[k]) push_panel(pi, cuts[k], cuts[k + 1]);
  }

  // below the rounding floor of the accumulated magnitudes there is nothing
  // left to resolve
  auto goal = [&] { return std::max(opt.tol, 5e-15 * mag_sum); };
  while (err_sum > goal() && !active.empty()) {
    if (panel_count > opt.max_panels)
      throw NonConvergent("integrate_path: panel budget exceeded");
    Panel worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // parameter interval exhausted at double precision
      done.push_back(worst);
      rep.warnings.push_back("panel at machine resolution, tolerance not certified");
      continue;
    }
    err_sum -= worst.err;
    mag_sum -= std::abs(worst.value);
    push_panel(worst.piece, worst.a, mid);
    push_panel(worst.piece, mid, worst.b);
  }

  while (!active.empty()) {
    done.push_back(active.top());
    active.pop();
  }

  // deterministic assembly: sum in (piece, position) order regardless of the
  // refinement history
  std::sort(done.begin(), done.end(), [](const Panel& a, const Panel& b) {
    if (a.piece != b.piece) return a.piece < b.piece;
    return a.a < b.a;
  });
  cx total{};
  double err_total = 0.0;
  for (const auto& p : done) {
    total += pieces[p.piece].sign * p.value;
    err_total += p.err;
  }
  rep.value = total;
  rep.abs_error_est = err_total;
  rep.panels = done.size();
  if (err_total > std::max(opt.tol, 1e-14 * mag_sum))
    rep.warnings.push_back("requested tolerance not certified");
  return rep;
}

QuadratureReport integrate_real_line(const Integrand& f, double tol, double t_decay,
                                     const Dispersion& d, int growth_degree,
                                     double x_freq) {
  const double R = truncation_radius_t(d, t_decay, growth_degree, tol);
  ContourPath line;
  line.label = "real_line";
  line.segments.push_back(make_segment(cx(-R, 0.0), cx(R, 0.0)));
  QuadOptions opt;
  opt.tol = tol;
  opt.osc.x_freq = x_freq;
  QuadratureReport rep = integrate_path(f, line, opt);
  rep.truncation_R = R;
  return rep;
}

}  // namespace utmq
