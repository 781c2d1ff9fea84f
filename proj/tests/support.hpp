#pragma once

// Test-side oracles, written independently of the library code paths.

#include "crp/algebra.hpp"
#include "crp/cadlag.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testsupport {

using crp::G2Element;
using crp::Mat;
using crp::Vec;

inline Vec randn(std::mt19937_64& rng, int d, double s = 1.0) {
  std::normal_distribution<double> n(0.0, s);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

/// Geometric element built directly: mat = v v^T / 2 + A, A antisymmetric.
inline G2Element random_group(std::mt19937_64& rng, int d, double s = 1.0) {
  G2Element g;
  g.vec = randn(rng, d, s);
  Mat a = Mat::Zero(d, d);
  std::normal_distribution<double> n(0.0, s * s);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      a(i, j) = n(rng);
      a(j, i) = -a(i, j);
    }
  }
  g.mat = 0.5 * g.vec * g.vec.transpose() + a;
  return g;
}

inline double max_abs(const G2Element& a, const G2Element& b) {
  return std::max((a.vec - b.vec).cwiseAbs().maxCoeff(), (a.mat - b.mat).cwiseAbs().maxCoeff());
}

/// Exhaustive sup over all partitions containing the first and last index.
inline double brute_pvar(std::size_t n, double p, const std::function<double(std::size_t, std::size_t)>& dist) {
  if (n < 2) return 0.0;
  const std::size_t inner = n - 2;
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << inner); ++mask) {
    std::size_t prev = 0;
    double s = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const bool take = k == n - 1 || (mask >> (k - 1)) & 1;
      if (!take) continue;
      s += std::pow(dist(prev, k), p);
      prev = k;
    }
    best = std::max(best, s);
  }
  return std::pow(best, 1.0 / p);
}

/// Matrix exponential by scaling and squaring with a Taylor series.
inline Mat expm(const Mat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (std::ldexp(norm, -s) > 0.25) ++s;
  const Mat b = a / std::ldexp(1.0, s);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Signed area of a closed polygon in the (i, j) plane (shoelace formula).
inline double shoelace(const std::vector<Vec>& pts, int i, int j) {
  double s = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec& a = pts[k];
    const Vec& b = pts[(k + 1) % pts.size()];
    s += a(i) * b(j) - b(i) * a(j);
  }
  return 0.5 * s;
}

/// Random path with jumps: continuous Gaussian moves and occasional jumps.
inline crp::Path random_jump_path(std::mt19937_64& rng, int d, std::size_t n, double jump_prob = 0.3,
                                  double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  crp::Path p;
  p.horizon = 1.0;
  p.times.push_back(0.0);
  p.values.push_back(Vec::Zero(d));
  p.left.push_back(Vec::Zero(d));
  for (std::size_t k = 1; k < n; ++k) {
    p.times.push_back(static_cast<double>(k) / static_cast<double>(n - 1));
    Vec l = p.values.back() + randn(rng, d, 0.3 * scale);
    Vec v = u(rng) < jump_prob ? Vec(l + randn(rng, d, scale)) : l;
    p.left.push_back(l);
    p.values.push_back(v);
  }
  p.validate();
  return p;
}

}  // namespace testsupport
