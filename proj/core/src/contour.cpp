#include "utmq/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "utmq/errors.hpp"

namespace utmq {

cx PathSegment::point(double s) const {
  switch (kind) {
    case SegKind::Ray:
      return base + s * dir;
    case SegKind::Segment:
      return base + s * (end - base);
    case SegKind::Arc: {
      const double th = theta0 + s * (theta1 - theta0);
      return base + radius * std::polar(1.0, th);
    }
    case SegKind::Curve: {
      const double xi = curve->xi0 + s * (curve->xi1 - curve->xi0);
      return {xi, boundary_eta(curve->disp, curve->branch, xi)};
    }
  }
  return {};
}

cx PathSegment::derivative(double s) const {
  switch (kind) {
    case SegKind::Ray:
      return dir;
    case SegKind::Segment:
      return end - base;
    case SegKind::Arc: {
      const double th = theta0 + s * (theta1 - theta0);
      return radius * (theta1 - theta0) * iu * std::polar(1.0, th);
    }
    case SegKind::Curve: {
      const double dxi = curve->xi1 - curve->xi0;
      const double xi = curve->xi0 + s * dxi;
      return dxi * cx(1.0, boundary_eta_prime(curve->disp, curve->branch, xi));
    }
  }
  return {};
}

double PathSegment::param_max() const { return 1.0; }

ContourPath ContourPath::reversed() const {
  ContourPath out;
  out.label = label + "_reversed";
  out.disjoint = disjoint;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    PathSegment s = *it;
    switch (s.kind) {
      case SegKind::Ray:
        s.orientation = -s.orientation;
        break;
      case SegKind::Segment:
        std::swap(s.base, s.end);
        break;
      case SegKind::Arc:
        std::swap(s.theta0, s.theta1);
        break;
      case SegKind::Curve:
        std::swap(s.curve->xi0, s.curve->xi1);
        break;
    }
    out.segments.push_back(s);
  }
  return out;
}

bool ContourPath::has_rays() const {
  return std::any_of(segments.begin(), segments.end(),
                     [](const PathSegment& s) { return s.kind == SegKind::Ray; });
}

double ContourPath::min_decay_sigma() const {
  double sigma = 1.0;
  for (const auto& s : segments) sigma = std::min(sigma, s.decay_sigma);
  return std::max(0.0, sigma);
}

namespace {

double sampled_sigma(const PathSegment& s, std::size_t n = 33) {
  double sigma = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    // stay off exact endpoints where |lambda| may vanish
    const double t = (k + 0.5) / (n + 1.0);
    const cx z = s.point(s.kind == SegKind::Ray ? 0.1 + 100.0 * t : t);
    const double a = std::abs(z);
    if (a < 1e-14) continue;
    sigma = std::min(sigma, z.imag() / a);
  }
  return std::max(0.0, sigma);
}

}  // namespace

PathSegment make_ray(cx base, cx dir, int orientation, double sigma) {
  PathSegment s;
  s.kind = SegKind::Ray;
  s.base = base;
  s.dir = dir / std::abs(dir);
  s.orientation = orientation;
  s.decay_sigma = sigma;
  return s;
}

PathSegment make_segment(cx a, cx b) {
  PathSegment s;
  s.kind = SegKind::Segment;
  s.base = a;
  s.end = b;
  s.decay_sigma = sampled_sigma(s);
  return s;
}

PathSegment make_arc(cx center, double radius, double theta0, double theta1) {
  PathSegment s;
  s.kind = SegKind::Arc;
  s.base = center;
  s.radius = radius;
  s.theta0 = theta0;
  s.theta1 = theta1;
  s.decay_sigma = sampled_sigma(s);
  return s;
}

PathSegment make_curve(const Dispersion& d, int branch, double xi0, double xi1) {
  PathSegment s;
  s.kind = SegKind::Curve;
  s.curve = BoundaryCurveRef{d, branch, xi0, xi1};
  s.decay_sigma = sampled_sigma(s);
  return s;
}

std::pair<ContourPath, ContourPath> gamma_biharmonic() {
  const double s18 = std::sin(pi / 8.0);
  const double s38 = std::sin(3.0 * pi / 8.0);
  ContourPath g1, g2;
  g1.label = "Gamma1";
  g1.segments.push_back(make_ray(0.0, std::polar(1.0, 7.0 * pi / 8.0), -1, s18));
  g1.segments.push_back(make_ray(0.0, std::polar(1.0, 5.0 * pi / 8.0), +1, s38));
  g2.label = "Gamma2";
  g2.segments.push_back(make_ray(0.0, std::polar(1.0, 3.0 * pi / 8.0), -1, s38));
  g2.segments.push_back(make_ray(0.0, std::polar(1.0, pi / 8.0), +1, s18));
  return {g1, g2};
}

std::pair<ContourPath, ContourPath> gamma_biharmonic_rotated() {
  ContourPath g1, g2;
  g1.label = "Gamma1_rotated";
  g1.segments.push_back(make_ray(0.0, std::polar(1.0, 15.0 * pi / 16.0), -1,
                                 std::sin(pi / 16.0)));
  g1.segments.push_back(make_ray(0.0, std::polar(1.0, 9.0 * pi / 16.0), +1,
                                 std::sin(9.0 * pi / 16.0)));
  g2.label = "Gamma2_rotated";
  g2.segments.push_back(make_ray(0.0, std::polar(1.0, 7.0 * pi / 16.0), -1,
                                 std::sin(7.0 * pi / 16.0)));
  g2.segments.push_back(make_ray(0.0, std::polar(1.0, pi / 16.0), +1, std::sin(pi / 16.0)));
  return {g1, g2};
}

ContourPath integration_boundary(const Dispersion& d) {
  ContourPath path;
  path.disjoint = true;
  const double c = d.cut_start();
  auto ray = [&](cx base, double ang, int orient) {
    path.segments.push_back(make_ray(base, std::polar(1.0, ang), orient, std::sin(ang)));
  };
  if (d.family == Family::CH_PLUS) {
    path.label = "dOmega_rotated";
    const cx top{0.0, c};
    // lower component left to right, upper component right to left
    ray(0.0, 15.0 * pi / 16.0, -1);
    ray(0.0, pi / 16.0, +1);
    ray(top, 7.0 * pi / 16.0, -1);
    ray(top, 9.0 * pi / 16.0, +1);
    return path;
  }
  if (d.family == Family::CH_MINUS) {
    path.label = "dOmega_rotated";
    // left lobe: outer tail in to -c, across the axis, inner tail out
    ray(cx(-c, 0.0), 15.0 * pi / 16.0, -1);
    path.segments.push_back(make_segment(cx(-c, 0.0), cx(0.0, 0.0)));
    ray(0.0, 9.0 * pi / 16.0, +1);
    // right lobe: inner tail in, across the axis, outer tail out
    ray(0.0, 7.0 * pi / 16.0, -1);
    path.segments.push_back(make_segment(cx(0.0, 0.0), cx(c, 0.0)));
    ray(cx(c, 0.0), pi / 16.0, +1);
    return path;
  }
  throw DomainError("integration_boundary: CH families only");
}

namespace {

// xi with |xi + i eta_branch(xi)| = R, bisection on [lo, hi]
double xi_at_radius(const Dispersion& d, int branch, double R) {
  auto radius = [&](double xi) {
    const double eta = boundary_eta(d, branch, xi);
    return std::hypot(xi, eta);
  };
  double lo = boundary_xi_min(d, branch);
  if (radius(lo) >= R) return lo;
  double hi = std::max(1.0, 2.0 * lo);
  while (radius(hi) < R) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (radius(mid) < R ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// split [x0, x1] into graded subsegments so high-curvature stretches near
// the endpoints of the curve get their own panels
void push_curve_split(ContourPath& path, const Dispersion& d, int branch, double x0,
                      double x1) {
  const double len = std::abs(x1 - x0);
  if (len <= 0.0) return;
  // geometric grading toward x0 (where the curve meets the axis or the corner)
  const int pieces = 6;
  double prev = x0;
  for (int k = 1; k <= pieces; ++k) {
    const double frac = std::pow(2.0, k - pieces);  // 2^-5 ... 1
    double next = x0 + (x1 - x0) * frac;
    if (k == pieces) next = x1;
    path.segments.push_back(make_curve(d, branch, prev, next));
    prev = next;
  }
}

}  // namespace

ContourPath domega_boundary(const Dispersion& d, double truncation_R) {
  if (d.family == Family::BIHARMONIC)
    throw DomainError("domega_boundary: biharmonic boundary is the pair of sector rays");
  if (truncation_R <= 2.0 * d.cut_start() + 1.0)
    truncation_R = 2.0 * d.cut_start() + 1.0;

  ContourPath path;
  path.label = "dOmega";
  const double c = d.cut_start();

  if (d.family == Family::CH_PLUS) {
    const double xl = xi_at_radius(d, -1, truncation_R);
    const double xu = xi_at_radius(d, +1, truncation_R);
    // lower component, left to right through the origin
    push_curve_split(path, d, -1, -xl, 0.0);
    // reuse the grading mirrored on the right half
    {
      ContourPath tmp;
      push_curve_split(tmp, d, -1, xl, 0.0);
      ContourPath rev = tmp.reversed();
      for (auto& s : rev.segments) path.segments.push_back(s);
    }
    // upper component, right to left through i sqrt(alpha/beta)
    {
      ContourPath tmp;
      push_curve_split(tmp, d, +1, xu, 0.0);
      for (auto& s : tmp.segments) path.segments.push_back(s);
      ContourPath tmp2;
      push_curve_split(tmp2, d, +1, -xu, 0.0);
      ContourPath rev = tmp2.reversed();
      for (auto& s : rev.segments) path.segments.push_back(s);
    }
    path.disjoint = true;  // two connected components
    return path;
  }

  // CH_MINUS: two lobes. Left lobe: in along the outer curve to -c, across
  // [-c, 0], out along the inner curve. Right lobe mirrored.
  const double xo = xi_at_radius(d, -1, truncation_R);
  const double xi_in = xi_at_radius(d, +1, truncation_R);

  // left lobe
  {
    ContourPath tmp;
    push_curve_split(tmp, d, -1, -c, -xo);
    ContourPath rev = tmp.reversed();
    for (auto& s : rev.segments) path.segments.push_back(s);
    path.segments.push_back(make_segment(cx(-c, 0.0), cx(0.0, 0.0)));
    push_curve_split(path, d, +1, 0.0, -xi_in);
  }
  // right lobe
  {
    ContourPath tmp;
    push_curve_split(tmp, d, +1, 0.0, xi_in);
    ContourPath rev = tmp.reversed();
    for (auto& s : rev.segments) path.segments.push_back(s);
    path.segments.push_back(make_segment(cx(0.0, 0.0), cx(c, 0.0)));
    push_curve_split(path, d, -1, c, xo);
  }
  path.disjoint = true;
  return path;
}

DeformedPaths deformed_paths_for_asymptotics(const Dispersion& d) {
  if (d.family != Family::CH_PLUS)
    throw DomainError("deformed_paths_for_asymptotics: ch_plus only");
  DeformedPaths out;
  const cx top{0.0, d.cut_start()};
  const double a1 = pi / 16.0, a2 = 7.0 * pi / 16.0, a3 = 9.0 * pi / 16.0,
               a4 = 15.0 * pi / 16.0;

  // orientations follow the boundary traversal they replace: the lower
  // component runs left to right (E4 in, E1 out), the upper component right
  // to left (E2 in, E3 out)
  auto one_ray = [](cx base, double ang, int orient, const char* name) {
    ContourPath p;
    p.label = name;
    p.segments.push_back(make_ray(base, std::polar(1.0, ang), orient, std::sin(ang)));
    return p;
  };
  out.E.push_back(one_ray(0.0, a1, +1, "E1"));
  out.E.push_back(one_ray(top, a2, -1, "E2"));
  out.E.push_back(one_ray(top, a3, +1, "E3"));
  out.E.push_back(one_ray(0.0, a4, -1, "E4"));

  // Z: tails of E4 and E1 beyond |Re lambda| = 1, bridged to -1 and +1.
  out.A = cx(-1.0, std::tan(pi - a4));  // E4 at Re lambda = -1
  out.B = cx(1.0, std::tan(a1));        // E1 at Re lambda = +1
  ContourPath z;
  z.label = "Z";
  z.disjoint = true;  // excludes the real interval (-1, 1)
  z.segments.push_back(make_ray(out.A, std::polar(1.0, a4), -1, std::sin(a4)));
  z.segments.push_back(make_segment(out.A, cx(-1.0, 0.0)));
  z.segments.push_back(make_segment(cx(1.0, 0.0), out.B));
  z.segments.push_back(make_ray(out.B, std::polar(1.0, a1), +1, std::sin(a1)));
  out.Z = z;
  return out;
}

ContourPath diagnostic_arc(double R, double theta0, double theta1) {
  if (R <= 0.0) throw DomainError("diagnostic_arc: R must be positive");
  if (theta0 > theta1) throw DomainError("diagnostic_arc: need theta0 <= theta1");
  ContourPath p;
  p.label = "arc";
  p.segments.push_back(make_arc(0.0, R, theta0, theta1));
  return p;
}

void dump_contour_csv(const ContourPath& path, const Dispersion& d,
                      std::size_t samples_per_segment, double ray_extent,
                      std::string& out) {
  char line[256];
  out += "segment_index,s,re_lambda,im_lambda,re_omega,im_omega\n";
  double arc_s = 0.0;
  for (std::size_t si = 0; si < path.segments.size(); ++si) {
    const auto& seg = path.segments[si];
    cx prev{};
    for (std::size_t k = 0; k <= samples_per_segment; ++k) {
      const double t = double(k) / double(samples_per_segment);
      const double sp = seg.kind == SegKind::Ray ? t * ray_extent : t;
      const cx z = seg.point(sp);
      if (k > 0) arc_s += std::abs(z - prev);
      prev = z;
      const cx w = d.omega(z);
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", si, arc_s,
                    z.real(), z.imag(), w.real(), w.imag());
      out += line;
    }
  }
}

}  // namespace utmq
