#include "crp/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crp {

namespace detail {
void check_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

namespace {

std::size_t upper_index(int i, int j, int d) {
  // row-major strict upper triangle, i < j
  return static_cast<std::size_t>(i * d - i * (i + 1) / 2 + (j - i - 1));
}

Mat antisym(const Mat& m) { return 0.5 * (m - m.transpose()); }

}  // namespace

Tensor2 Tensor2::zero(int d) { return {0.0, Vec::Zero(d), Mat::Zero(d, d)}; }

Tensor2 Tensor2::one(int d) { return {1.0, Vec::Zero(d), Mat::Zero(d, d)}; }

Tensor2 Tensor2::operator+(const Tensor2& o) const {
  detail::check_same_dim(dim(), o.dim(), "Tensor2::+");
  return {scalar + o.scalar, vec + o.vec, mat + o.mat};
}

Tensor2 Tensor2::operator-(const Tensor2& o) const {
  detail::check_same_dim(dim(), o.dim(), "Tensor2::-");
  return {scalar - o.scalar, vec - o.vec, mat - o.mat};
}

Tensor2 Tensor2::operator*(double s) const { return {scalar * s, vec * s, mat * s}; }

Tensor2 Tensor2::operator*(const Tensor2& o) const {
  detail::check_same_dim(dim(), o.dim(), "Tensor2::*");
  Tensor2 r;
  r.scalar = scalar * o.scalar;
  r.vec = scalar * o.vec + o.scalar * vec;
  r.mat = scalar * o.mat + o.scalar * mat + vec * o.vec.transpose();
  return r;
}

Lie2Element::Lie2Element(int d)
    : vec_(Vec::Zero(d)), upper_(static_cast<std::size_t>(d * (d - 1) / 2), 0.0) {}

Lie2Element::Lie2Element(Vec vec, const Mat& a) : Lie2Element(static_cast<int>(vec.size())) {
  vec_ = std::move(vec);
  const int d = dim();
  if (a.rows() != d || a.cols() != d) {
    throw std::invalid_argument("Lie2Element: area must be d x d");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      upper_[upper_index(i, j, d)] = 0.5 * (a(i, j) - a(j, i));
    }
  }
}

Lie2Element Lie2Element::from_vec(Vec vec) {
  Lie2Element l(static_cast<int>(vec.size()));
  l.vec_ = std::move(vec);
  return l;
}

double Lie2Element::area(int i, int j) const {
  if (i == j) return 0.0;
  if (i < j) return upper_[upper_index(i, j, dim())];
  return -upper_[upper_index(j, i, dim())];
}

void Lie2Element::set_area(int i, int j, double value) {
  if (i == j) {
    throw std::invalid_argument("Lie2Element::set_area: diagonal entries are zero");
  }
  if (i < j) {
    upper_[upper_index(i, j, dim())] = value;
  } else {
    upper_[upper_index(j, i, dim())] = -value;
  }
}

Mat Lie2Element::area_matrix() const {
  const int d = dim();
  Mat a = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double v = upper_[upper_index(i, j, d)];
      a(i, j) = v;
      a(j, i) = -v;
    }
  }
  return a;
}

double Lie2Element::area_norm() const {
  double s = 0.0;
  for (double v : upper_) s += v * v;
  return std::sqrt(s);
}

Lie2Element Lie2Element::operator+(const Lie2Element& o) const {
  detail::check_same_dim(dim(), o.dim(), "Lie2Element::+");
  Lie2Element r = *this;
  r.vec_ += o.vec_;
  for (std::size_t k = 0; k < upper_.size(); ++k) r.upper_[k] += o.upper_[k];
  return r;
}

Lie2Element Lie2Element::operator-(const Lie2Element& o) const { return *this + (-o); }

Lie2Element Lie2Element::operator-() const { return *this * -1.0; }

Lie2Element Lie2Element::operator*(double s) const {
  Lie2Element r = *this;
  r.vec_ *= s;
  for (double& v : r.upper_) v *= s;
  return r;
}

G2Element G2Element::identity(int d) { return {Vec::Zero(d), Mat::Zero(d, d)}; }

Tensor2 G2Element::as_tensor() const { return {1.0, vec, mat}; }

G2Element group_mul(const G2Element& g, const G2Element& h) {
  detail::check_same_dim(g.dim(), h.dim(), "group_mul");
  return {g.vec + h.vec, g.mat + h.mat + g.vec * h.vec.transpose()};
}

G2Element operator*(const G2Element& g, const G2Element& h) { return group_mul(g, h); }

G2Element group_inv(const G2Element& g) {
  return {-g.vec, g.vec * g.vec.transpose() - g.mat};
}

G2Element increment(const G2Element& g, const G2Element& h) {
  detail::check_same_dim(g.dim(), h.dim(), "increment");
  // g^{-1} h = (h - g, (g g^T - G) + H - g h^T)
  return {h.vec - g.vec, g.vec * g.vec.transpose() - g.mat + h.mat - g.vec * h.vec.transpose()};
}

G2Element exp2(const Lie2Element& l) {
  return {l.vec(), 0.5 * l.vec() * l.vec().transpose() + l.area_matrix()};
}

double geometricity_defect(const G2Element& g) {
  const Mat sym = 0.5 * (g.mat + g.mat.transpose());
  const Mat target = 0.5 * g.vec * g.vec.transpose();
  const double scale = std::max(1.0, target.norm());
  return (sym - target).norm() / scale;
}

bool is_geometric(const G2Element& g, double rel_tol) {
  return geometricity_defect(g) <= rel_tol;
}

Lie2Element log2(const G2Element& g) {
  // generous tolerance: long products accumulate roundoff
  if (!is_geometric(g, 1e-9)) {
    throw std::domain_error("log2: level-2 symmetric part is not vec (x) vec / 2");
  }
  return Lie2Element(g.vec, antisym(g.mat));
}

Lie2Element bracket(const Vec& u, const Vec& v) {
  detail::check_same_dim(static_cast<int>(u.size()), static_cast<int>(v.size()), "bracket");
  const Mat m = u * v.transpose() - v * u.transpose();
  return Lie2Element(Vec::Zero(u.size()), m);
}

Lie2Element cbh(const Lie2Element& a, const Lie2Element& b) {
  detail::check_same_dim(a.dim(), b.dim(), "cbh");
  return a + b + bracket(a.vec(), b.vec()) * 0.5;
}

G2Element dilate(const G2Element& g, double lambda) {
  return {lambda * g.vec, lambda * lambda * g.mat};
}

double hom_norm(const Lie2Element& l) {
  return std::max(l.vec().norm(), std::sqrt(2.0 * l.area_norm()));
}

double hom_norm(const G2Element& g) {
  const int d = g.dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double a = 0.5 * (g.mat(i, j) - g.mat(j, i));
      s += a * a;
    }
  }
  return std::max(g.vec.norm(), std::sqrt(2.0 * std::sqrt(s)));
}

double hom_dist(const G2Element& g, const G2Element& h) { return hom_norm(increment(g, h)); }

}  // namespace crp
