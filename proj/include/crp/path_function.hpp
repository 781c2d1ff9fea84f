#pragma once

// Path functions: rules that fill a jump (x, y) with a continuous path on
// [0, 1] running from x to y. All built-in kinds are left-invariant, i.e.
// phi(x, y)_s = x + phi(y - x)_s.

#include "crp/algebra.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crp {

class PathFunction {
 public:
  enum class Kind { Linear, LogLinear, Hoff, Custom };

  using Sampler = std::function<Vec(const Vec& increment, double s)>;
  using Domain = std::function<bool(const Vec& before, const Vec& after)>;

  /// Straight chord; creates no area.
  static PathFunction linear();
  /// Geodesic e^{s log(x^{-1} y)} in G^2; on R^d it coincides with linear.
  static PathFunction log_linear();
  /// Axis-by-axis traversal. Empty order means 0, 1, ..., d-1.
  static PathFunction hoff(std::vector<int> axis_order = {});
  /// User supplied left-invariant rule phi(increment)_s. The area map is
  /// computed from `samples` chords of the sampled curve.
  static PathFunction custom(std::string name, Sampler sampler, double q, double eta,
                             int samples = 32, Domain domain = {});

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double q() const { return q_; }
  /// Declared q-variation modulus constant: ||phi(x, y)||_{q-var} <= eta |y - x|.
  double eta(int d) const;
  int default_samples() const { return samples_; }
  const std::vector<int>& axis_order() const { return order_; }

  bool in_domain(const Vec& before, const Vec& after) const;

  /// phi(before, after)_s on R^d.
  Vec sample(const Vec& before, const Vec& after, double s) const;

  /// Exact polyline vertices of phi(0, increment), including both endpoints, with
  /// their curve parameters. Custom kinds return `samples` + 1 points.
  std::vector<std::pair<double, Vec>> vertices(const Vec& increment) const;

  /// Area a(x) with S_2(phi(x))_{0,1} = exp(x + a(x)).
  Lie2Element area_map(const Vec& increment) const;
  /// psi(x) = exp(x + a(x)).
  G2Element jump_element(const Vec& increment) const;

  /// Canonical lift of the jump rule to G^2: path from g to h.
  /// For LogLinear: g exp(s log(g^{-1} h)); otherwise g S_2(phi(x)|[0,s]) with x the
  /// level-1 increment; requires g^{-1} h == psi(x).
  G2Element sample_group(const G2Element& g, const G2Element& h, double s) const;
  /// Whether the group jump g -> h is admissible (checks g^{-1} h = psi(x) to tol).
  bool in_group_domain(const G2Element& g, const G2Element& h, double tol = 1e-9) const;

 private:
  PathFunction(Kind kind, std::string name, double q, int samples)
      : kind_(kind), name_(std::move(name)), q_(q), samples_(samples) {}

  std::vector<int> resolved_order(int d) const;

  Kind kind_;
  std::string name_;
  double q_ = 1.0;
  double eta_custom_ = 1.0;
  int samples_ = 8;
  std::vector<int> order_;
  Sampler sampler_;
  Domain domain_;
};

/// Signature S_2 of the polyline through `points`, as a G2 element.
G2Element polyline_signature(const std::vector<Vec>& points);

}  // namespace crp
