#pragma once

// Driving vector fields V_1..V_d on R^e with user-supplied Jacobians.

#include "crp/algebra.hpp"

#include <functional>
#include <string>
#include <vector>

namespace crp {

class VectorFields {
 public:
  /// V(y) as an e x d matrix, column i is V_i(y).
  using Eval = std::function<Mat(const Vec& y)>;
  /// DV_i(y) (e x e) for i = 0..d-1.
  using Jacobian = std::function<std::vector<Mat>(const Vec& y)>;

  VectorFields() = default;
  VectorFields(int e, int d, Eval eval, Jacobian jacobian, std::string name = "custom", double gamma = 0.0);

  /// V_i(y) = A_i y.
  static VectorFields linear(std::vector<Mat> matrices);
  /// V_i(y) = b_i + A_i y + (y^T Q_{i,k} y)_k.
  static VectorFields quadratic(std::vector<Vec> b, std::vector<Mat> a, std::vector<std::vector<Mat>> q);
  /// V_i(y) = w_i x y on R^3 with w_i the unit axis i mod 3.
  static VectorFields rotation(int d);
  static VectorFields zero(int e, int d);

  int state_dim() const { return e_; }
  int driver_dim() const { return d_; }
  const std::string& name() const { return name_; }
  double gamma() const { return gamma_; }

  Mat eval(const Vec& y) const;
  std::vector<Mat> jacobian(const Vec& y) const;
  Vec field(const Vec& y, int i) const { return eval(y).col(i); }
  /// [V_i, V_j](y) = DV_j(y) V_i(y) - DV_i(y) V_j(y).
  Vec bracket(const Vec& y, int i, int j) const;

  /// sum_i u^i V_i(y) + sum_{i<j} area(i, j) [V_i, V_j](y).
  Vec log_field(const Vec& y, const Lie2Element& l) const;

 private:
  int e_ = 0, d_ = 0;
  Eval eval_;
  Jacobian jac_;
  std::string name_;
  double gamma_ = 0.0;
};

/// U_i(y, z) = (V_i(y), W(z) V_i(y)) on R^{e+n}; W has e driving directions.
VectorFields stack_drivers(const VectorFields& v, const VectorFields& w);

}  // namespace crp
