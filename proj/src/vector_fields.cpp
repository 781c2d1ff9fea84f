#include "crp/vector_fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace crp {

VectorFields::VectorFields(int e, int d, Eval eval, Jacobian jacobian, std::string name, double gamma)
    : e_(e), d_(d), eval_(std::move(eval)), jac_(std::move(jacobian)), name_(std::move(name)), gamma_(gamma) {
  if (e < 1 || d < 1) throw std::invalid_argument("VectorFields: dimensions must be positive");
  if (!eval_ || !jac_) throw std::invalid_argument("VectorFields: eval and jacobian are required");
}

Mat VectorFields::eval(const Vec& y) const {
  if (y.size() != e_) throw std::invalid_argument("VectorFields: state dimension mismatch");
  return eval_(y);
}

std::vector<Mat> VectorFields::jacobian(const Vec& y) const {
  if (y.size() != e_) throw std::invalid_argument("VectorFields: state dimension mismatch");
  return jac_(y);
}

Vec VectorFields::bracket(const Vec& y, int i, int j) const {
  const Mat v = eval(y);
  const std::vector<Mat> dv = jacobian(y);
  return dv[j] * v.col(i) - dv[i] * v.col(j);
}

Vec VectorFields::log_field(const Vec& y, const Lie2Element& l) const {
  if (l.dim() != d_) throw std::invalid_argument("VectorFields: driver dimension mismatch");
  const Mat v = eval(y);
  Vec w = v * l.vec();
  bool any_area = false;
  for (int i = 0; i < d_ && !any_area; ++i) {
    for (int j = i + 1; j < d_; ++j) {
      if (l.area(i, j) != 0.0) {
        any_area = true;
        break;
      }
    }
  }
  if (!any_area) return w;
  const std::vector<Mat> dv = jacobian(y);
  for (int i = 0; i < d_; ++i) {
    for (int j = i + 1; j < d_; ++j) {
      const double a = l.area(i, j);
      if (a != 0.0) w += a * (dv[j] * v.col(i) - dv[i] * v.col(j));
    }
  }
  return w;
}

VectorFields VectorFields::linear(std::vector<Mat> matrices) {
  if (matrices.empty()) throw std::invalid_argument("linear fields: need at least one matrix");
  const int e = static_cast<int>(matrices.front().rows());
  for (const Mat& a : matrices) {
    if (a.rows() != e || a.cols() != e) throw std::invalid_argument("linear fields: matrices must be e x e");
  }
  const int d = static_cast<int>(matrices.size());
  auto eval = [matrices, e, d](const Vec& y) {
    Mat v(e, d);
    for (int i = 0; i < d; ++i) v.col(i) = matrices[i] * y;
    return v;
  };
  auto jac = [matrices](const Vec&) { return matrices; };
  return VectorFields(e, d, eval, jac, "linear", std::numeric_limits<double>::infinity());
}

VectorFields VectorFields::quadratic(std::vector<Vec> b, std::vector<Mat> a, std::vector<std::vector<Mat>> q) {
  const int d = static_cast<int>(a.size());
  if (d == 0 || b.size() != a.size() || q.size() != a.size()) {
    throw std::invalid_argument("quadratic fields: b, A, Q must have one entry per driver");
  }
  const int e = static_cast<int>(a.front().rows());
  for (int i = 0; i < d; ++i) {
    if (b[i].size() != e || a[i].rows() != e || a[i].cols() != e || static_cast<int>(q[i].size()) != e) {
      throw std::invalid_argument("quadratic fields: inconsistent shapes");
    }
    for (const Mat& m : q[i]) {
      if (m.rows() != e || m.cols() != e) throw std::invalid_argument("quadratic fields: Q blocks must be e x e");
    }
  }
  auto eval = [b, a, q, e, d](const Vec& y) {
    Mat v(e, d);
    for (int i = 0; i < d; ++i) {
      Vec c = b[i] + a[i] * y;
      for (int k = 0; k < e; ++k) c(k) += y.dot(q[i][k] * y);
      v.col(i) = c;
    }
    return v;
  };
  auto jac = [a, q, e, d](const Vec& y) {
    std::vector<Mat> out(d);
    for (int i = 0; i < d; ++i) {
      out[i] = a[i];
      for (int k = 0; k < e; ++k) out[i].row(k) += ((q[i][k] + q[i][k].transpose()) * y).transpose();
    }
    return out;
  };
  return VectorFields(e, d, eval, jac, "quadratic", std::numeric_limits<double>::infinity());
}

VectorFields VectorFields::rotation(int d) {
  if (d < 1) throw std::invalid_argument("rotation fields: d must be positive");
  std::vector<Mat> gens;
  for (int i = 0; i < d; ++i) {
    Mat w = Mat::Zero(3, 3);
    const int a = i % 3, b = (a + 1) % 3, c = (a + 2) % 3;
    w(c, b) = 1.0;
    w(b, c) = -1.0;
    gens.push_back(w);
  }
  VectorFields f = linear(gens);
  f.name_ = "rotation";
  return f;
}

VectorFields VectorFields::zero(int e, int d) {
  return VectorFields(
      e, d, [e, d](const Vec&) -> Mat { return Mat::Zero(e, d); },
      [e, d](const Vec&) { return std::vector<Mat>(d, Mat::Zero(e, e)); }, "zero",
      std::numeric_limits<double>::infinity());
}

VectorFields stack_drivers(const VectorFields& v, const VectorFields& w) {
  const int e = v.state_dim(), d = v.driver_dim(), n = w.state_dim();
  if (w.driver_dim() != e) throw std::invalid_argument("stack_drivers: W must have e driving directions");
  auto eval = [v, w, e, d, n](const Vec& yz) {
    const Vec y = yz.head(e), z = yz.tail(n);
    const Mat vy = v.eval(y);
    Mat u(e + n, d);
    u.topRows(e) = vy;
    u.bottomRows(n) = w.eval(z) * vy;
    return u;
  };
  auto jac = [v, w, e, d, n](const Vec& yz) {
    const Vec y = yz.head(e), z = yz.tail(n);
    const Mat vy = v.eval(y);
    const Mat wz = w.eval(z);
    const std::vector<Mat> dv = v.jacobian(y);
    const std::vector<Mat> dw = w.jacobian(z);
    std::vector<Mat> out(d, Mat::Zero(e + n, e + n));
    for (int i = 0; i < d; ++i) {
      out[i].topLeftCorner(e, e) = dv[i];
      out[i].bottomLeftCorner(n, e) = wz * dv[i];
      Mat dz = Mat::Zero(n, n);
      for (int k = 0; k < e; ++k) dz += vy(k, i) * dw[k];
      out[i].bottomRightCorner(n, n) = dz;
    }
    return out;
  };
  return VectorFields(e + n, d, eval, jac, "stacked(" + v.name() + "," + w.name() + ")",
                      std::min(v.gamma(), w.gamma()));
}

}  // namespace crp
