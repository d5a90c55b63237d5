#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "utmq/dispersion.hpp"
#include "utmq/types.hpp"

namespace utmq {

enum class SegKind { Ray, Segment, Arc, Curve };

// Exact reference to one branch of { Re omega = 0 } parametrized by xi.
struct BoundaryCurveRef {
  Dispersion disp;
  int branch = -1;     // -1 lower curve, +1 upper curve
  double xi0 = 0.0;    // traversal from xi0 to xi1 (either order)
  double xi1 = 0.0;
};

struct PathSegment {
  SegKind kind = SegKind::Segment;

  // Ray: base + s*dir, s in [0, inf); orientation -1 traverses inward
  cx base{};
  cx dir{};            // |dir| = 1 for rays
  int orientation = +1;

  cx end{};            // Segment: from base to end

  double radius = 0.0; // Arc: center=base, theta0 -> theta1 (signed sweep)
  double theta0 = 0.0;
  double theta1 = 0.0;

  std::optional<BoundaryCurveRef> curve;

  // lower bound sigma >= 0 with |e^{i lambda x}| <= e^{-sigma x |lambda|}
  double decay_sigma = 0.0;

  bool infinite() const { return kind == SegKind::Ray; }
  cx point(double s) const;       // s in [0,1] for finite kinds, s = |lambda distance| for rays
  cx derivative(double s) const;  // d lambda / d s at the same parameter
  double param_max() const;       // 1.0 for finite kinds (rays have none)
};

struct ContourPath {
  std::vector<PathSegment> segments;
  std::string label;
  bool disjoint = false;  // marks a disjoint union of pieces

  ContourPath reversed() const;
  bool has_rays() const;
  // conservative min over the path of Im(lambda/|lambda|), clamped at 0
  double min_decay_sigma() const;
};

PathSegment make_ray(cx base, cx dir, int orientation, double sigma);
PathSegment make_segment(cx a, cx b);
PathSegment make_arc(cx center, double radius, double theta0, double theta1);
PathSegment make_curve(const Dispersion& d, int branch, double xi0, double xi1);

// Sector boundaries for omega = lambda^4. Gamma1 wraps the sector
// [5pi/8, 7pi/8] (in along arg 7pi/8, out along 5pi/8), Gamma2 wraps
// [pi/8, 3pi/8] (in along 3pi/8, out along pi/8); the enclosed sector lies
// to the left of the traversal in both cases.
std::pair<ContourPath, ContourPath> gamma_biharmonic();

// The same sector integrals carried by rays rotated to the middle of the
// adjacent decay wedges (pi/16 off the boundary angles). Integrands that are
// analytic between the contours and tail off like e^{i lambda x} with at
// most quartic-law growth integrate identically, but Re omega > 0 away from
// the origin makes the e^{-omega t} factors decay instead of oscillating.
std::pair<ContourPath, ContourPath> gamma_biharmonic_rotated();

// Rotated stand-in for the spectral boundary of the CH families, equal for
// integrands analytic off the branch cuts with the usual tail laws:
// CH_PLUS gets the four deformed half-lines, CH_MINUS keeps its real
// segments and rotates the four curve tails into the decay wedges.
ContourPath integration_boundary(const Dispersion& d);

// Boundary of Omega for the CH families, truncated at |lambda| = truncation_R.
// CH_PLUS: lower component left to right through 0, then upper component
// right to left through sqrt(alpha/beta) i, so Omega stays on the left.
// CH_MINUS: the two lobes, each wrapped counterclockwise (curve in, real
// segment, curve out).
ContourPath domega_boundary(const Dispersion& d, double truncation_R);

// Deformed paths used by the long-time analysis. E1/E4 are rays from the
// origin, E2/E3 rays from the upper interior corner sqrt(alpha/beta) i of
// the region boundary; Re omega > 0 along each ray away from its base.
// Z replaces E4 + E1 outside the strip |Re lambda| <= 1.
struct DeformedPaths {
  std::vector<ContourPath> E;  // E1..E4
  ContourPath Z;
  cx A, B;                     // Z corner points on Re lambda = -1 / +1
};
DeformedPaths deformed_paths_for_asymptotics(const Dispersion& d);

ContourPath diagnostic_arc(double R, double theta0, double theta1);

// CSV dump: segment_index, s, re_lambda, im_lambda, re_omega, im_omega
void dump_contour_csv(const ContourPath& path, const Dispersion& d,
                      std::size_t samples_per_segment, double ray_extent,
                      std::string& out);

}  // namespace utmq
