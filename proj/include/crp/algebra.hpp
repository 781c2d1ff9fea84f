#pragma once

// Step-2 truncated tensor algebra T^2(R^d), the free nilpotent group G^2(R^d)
// and its Lie algebra. Dimension d is a runtime parameter (d <= kMaxDim).

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace crp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int kMaxDim = 16;

/// Element (scalar, vec, mat) of T^2(R^d) with truncated product.
struct Tensor2 {
  double scalar = 0.0;
  Vec vec;
  Mat mat;

  static Tensor2 zero(int d);
  static Tensor2 one(int d);
  int dim() const { return static_cast<int>(vec.size()); }

  Tensor2 operator+(const Tensor2& other) const;
  Tensor2 operator-(const Tensor2& other) const;
  Tensor2 operator*(double s) const;
  /// Truncated tensor product; terms of degree > 2 are dropped.
  Tensor2 operator*(const Tensor2& other) const;
};

/// Antisymmetric element of g^2(R^d): level-1 vector plus area, the area
/// stored as its strict upper triangle so that antisymmetry is exact.
class Lie2Element {
 public:
  Lie2Element() = default;
  explicit Lie2Element(int d);
  Lie2Element(Vec vec, const Mat& antisym_area);

  static Lie2Element from_vec(Vec vec);

  int dim() const { return static_cast<int>(vec_.size()); }
  const Vec& vec() const { return vec_; }
  Vec& vec() { return vec_; }

  /// a^{ij}; a^{ji} = -a^{ij}, a^{ii} = 0.
  double area(int i, int j) const;
  void set_area(int i, int j, double value);
  const std::vector<double>& area_upper() const { return upper_; }
  std::vector<double>& area_upper() { return upper_; }
  Mat area_matrix() const;
  /// Frobenius norm of the strict upper triangle.
  double area_norm() const;

  Lie2Element operator+(const Lie2Element& o) const;
  Lie2Element operator-(const Lie2Element& o) const;
  Lie2Element operator-() const;
  Lie2Element operator*(double s) const;

 private:
  Vec vec_;
  std::vector<double> upper_;
};

/// Point of G^2(R^d): the symmetric part of mat equals vec (x) vec / 2.
struct G2Element {
  Vec vec;
  Mat mat;

  static G2Element identity(int d);
  int dim() const { return static_cast<int>(vec.size()); }
  Tensor2 as_tensor() const;
};

G2Element group_mul(const G2Element& g, const G2Element& h);
G2Element operator*(const G2Element& g, const G2Element& h);
G2Element group_inv(const G2Element& g);

/// Increment g^{-1} h.
G2Element increment(const G2Element& g, const G2Element& h);

G2Element exp2(const Lie2Element& l);
/// Throws std::domain_error on non-geometric input.
Lie2Element log2(const G2Element& g);

/// Campbell-Baker-Hausdorff at step 2: a + b + [a, b]/2.
Lie2Element cbh(const Lie2Element& a, const Lie2Element& b);

/// Dilation delta_lambda: level k scaled by lambda^k.
G2Element dilate(const G2Element& g, double lambda);

/// Homogeneous norm max(|vec|, sqrt(2 |area|)), |area| the Frobenius norm of
/// the strict upper triangle of the antisymmetric part of mat.
double hom_norm(const G2Element& g);
double hom_norm(const Lie2Element& l);
/// Left-invariant distance hom_norm(g^{-1} h).
double hom_dist(const G2Element& g, const G2Element& h);

/// Relative geometricity defect of the symmetric level-2 part.
double geometricity_defect(const G2Element& g);
bool is_geometric(const G2Element& g, double rel_tol = 1e-12);

/// Lie bracket of the level-1 parts, as a Lie2Element with zero vec.
Lie2Element bracket(const Vec& u, const Vec& v);

namespace detail {
void check_same_dim(int a, int b, const char* what);
}

}  // namespace crp
