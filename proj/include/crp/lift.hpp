#pragma once

// Level-2 rough path lifts: chord-concatenation (Marcus) lifts of sampled paths,
// modified lifts with extra area, Young pairing and translation.

#include "crp/algebra.hpp"
#include "crp/cadlag.hpp"
#include "crp/path_function.hpp"
#include "crp/time_change.hpp"

#include <vector>

namespace crp {

/// Running signature sampled at `times`. Between samples i-1 and i the path
/// moves continuously from points[i-1] to left[i], then jumps to points[i].
/// The increment points[i-1]^{-1} left[i] is atomic (no finer information).
struct RoughPath2 {
  std::vector<double> times;
  std::vector<G2Element> points;
  std::vector<G2Element> left;
  double horizon = 0.0;
  bool marcus_like = true;

  std::size_t size() const { return times.size(); }
  int dim() const { return points.empty() ? 0 : points.front().dim(); }
  bool is_jump(std::size_t i) const;
  /// Delta x_{t_i} = x_{t_i-}^{-1} x_{t_i}.
  G2Element jump(std::size_t i) const { return increment(left[i], points[i]); }
  /// Continuous increment x_{t_{i-1}}^{-1} x_{t_i -}.
  G2Element continuous_increment(std::size_t i) const { return increment(points[i - 1], left[i]); }
  /// x_{s,t} between samples i <= k.
  G2Element increment_between(std::size_t i, std::size_t k) const { return increment(points[i], points[k]); }

  /// Level-1 projection as a Path.
  Path level1() const;
  /// Scans jumps and reports whether every jump log has zero area (to tol).
  bool scan_marcus_like(double tol = 1e-12) const;
  void validate() const;
};

/// Chord concatenation over the vertices of x: each continuous part and each
/// jump contributes exp(increment). Marcus-like by construction.
RoughPath2 lift_piecewise_linear(const Path& x);

/// Discrete Marcus lift exp(X + A), A the area process; on a sample skeleton it
/// coincides with lift_piecewise_linear.
RoughPath2 marcus_lift(const Path& x);

/// Lift in which every skeleton increment dx (continuous or jump) is replaced
/// by phi's jump element exp(dx + a(dx)); i.e. the Marcus lift plus
/// B_t = sum_{s <= t} a(dX_s). Not Marcus-like when a is nonzero.
RoughPath2 modified_lift(const Path& x, const PathFunction& phi);

/// Lift of a path whose continuous parts carry prescribed extra area
/// (area[i] added to the log of the continuous increment into sample i).
RoughPath2 lift_with_area(const Path& x, const std::vector<Lie2Element>& extra_area);

struct YoungOptions {
  double p = 2.5;  // variation order of the rough path
  double q = 1.0;  // declared variation order of the perturbation
};

/// Joint lift S_2(x, h) in G^2(R^{d+d'}), blocks [x | h]. h's sample times must
/// be a subset of x's. Cross areas equal left-point Riemann-Stieltjes sums.
RoughPath2 young_pair(const RoughPath2& x, const Path& h, const YoungOptions& opts = {});

/// T_h(x) = plus(S_2(x, h)) for h with the same dimension as x.
RoughPath2 translate(const RoughPath2& x, const Path& h, const YoungOptions& opts = {});

/// x^{phi, delta} for a rough path on the stretched clock.
struct RoughInterpolation {
  std::vector<double> times;
  std::vector<G2Element> points;
  TimeChange tau;
  std::vector<std::size_t> index;
  double horizon = 0.0;
};

/// Throws std::domain_error naming the time of any jump outside phi's group domain.
RoughInterpolation interpolate(const RoughPath2& x, const PathFunction& phi,
                               const InterpolateOptions& opts = {});

}  // namespace crp
