#pragma once

// p-variation functionals and Skorokhod-type distances on sampled paths.
//
// Infima over time changes are replaced by minima over monotone alignments of
// the two sample grids, so every sigma/alpha value reported here is an upper
// bound for the quantity it estimates.

#include "crp/algebra.hpp"
#include "crp/cadlag.hpp"
#include "crp/lift.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace crp {

/// Time-stamped samples; times are non-decreasing (a jump appears as two
/// samples with equal time: the left limit and the new value).
template <class P>
struct Trace {
  std::vector<double> times;
  std::vector<P> points;
  std::size_t size() const { return times.size(); }
};

/// Vertices of x, continuous segments subdivided into `densify` pieces.
Trace<Vec> trace_of(const Path& x, int densify = 1);
/// Continuous increments are subdivided along the geodesic g exp(s log(g^{-1} h)).
Trace<G2Element> trace_of(const RoughPath2& x, int densify = 1);
Trace<G2Element> trace_of(const RoughInterpolation& x, int densify = 1);

/// Exact sup over partitions of the sample grid: best[j] = max_{i<j} best[i] + d(i, j)^p.
template <class Dist>
double pvar_dp(std::size_t n, double p, Dist&& dist) {
  if (p < 1.0) throw std::invalid_argument("pvar: p must be >= 1");
  if (n < 2) return 0.0;
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double v = best[i] + std::pow(dist(i, j), p);
      if (v > b) b = v;
    }
    best[j] = b;
  }
  return std::pow(best[n - 1], 1.0 / p);
}

double pvar(const std::vector<Vec>& points, double p);
double pvar(const std::vector<G2Element>& points, double p);
double pvar(const Path& x, double p);
double pvar(const RoughPath2& x, double p);

/// Inhomogeneous metric: max over levels k of the DP-sup of
/// sum |x^k_{t_i,t_{i+1}} - y^k_{t_i,t_{i+1}}|^{p/k}, raised to k/p.
double rho_pvar(const std::vector<G2Element>& x, const std::vector<G2Element>& y, double p);
/// Level-1 version: p-variation of the difference increments.
double rho_pvar(const std::vector<Vec>& x, const std::vector<Vec>& y, double p);
double rho_pvar(const RoughPath2& x, const RoughPath2& y, double p);

/// Homogeneous p-variation distance sup_D (sum d(x_{t_i,t_{i+1}}, y_{t_i,t_{i+1}})^p)^{1/p}.
double d_pvar(const std::vector<G2Element>& x, const std::vector<G2Element>& y, double p);
double d_pvar(const std::vector<Vec>& x, const std::vector<Vec>& y, double p);
/// max(sup_k d(x_k, y_k), sup_{k<l} d(x_{k,l}, y_{k,l})).
double d_zero(const std::vector<G2Element>& x, const std::vector<G2Element>& y);
double d_zero(const std::vector<Vec>& x, const std::vector<Vec>& y);

/// Monotone index pairs covering both endpoints.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double lambda_sup = 0.0;  // max |t_i - s_j| over matched pairs
};

enum class MetricKind {
  Infinity,  // sigma_inf / alpha_inf
  PVar,      // sigma_{p-var} / alpha_{p-var} with rho_pvar
  Zero,      // alpha_0 with d_zero
  Beta       // beta_{p-var} with d_pvar
};

struct MetricReport {
  double value = 0.0;
  Alignment alignment;
  std::vector<double> deltas;
  std::vector<double> per_delta;
  bool monotone_trend = true;
  bool upper_bound = true;
};

/// min over monotone alignments of max(|t_i - s_j|, d(a_i, b_j)) (exact
/// bottleneck DP), ties broken towards smaller |lambda|.
Alignment bottleneck_alignment(const Trace<Vec>& a, const Trace<Vec>& b, double* value = nullptr);
Alignment bottleneck_alignment(const Trace<G2Element>& a, const Trace<G2Element>& b,
                               double* value = nullptr);

MetricReport sigma_estimate(const Trace<Vec>& a, const Trace<Vec>& b, MetricKind kind, double p = 2.0);
MetricReport sigma_estimate(const Trace<G2Element>& a, const Trace<G2Element>& b, MetricKind kind,
                            double p = 2.5);

struct AlphaOptions {
  int delta_levels = 4;  // delta in {1, 1/2, ..., 2^{-(levels-1)}}
  int densify = 16;
  int samples_per_jump = 0;
};

/// sigma-estimates between x^{phi,delta} and y^{psi,delta} (both rescaled onto
/// the common horizon) for the dyadic delta ladder, plus an extrapolated limit.
MetricReport alpha_estimate(const Path& x, const PathFunction& phi, const Path& y,
                            const PathFunction& psi, MetricKind kind, double p = 2.0,
                            const AlphaOptions& opts = {});
MetricReport alpha_estimate(const RoughPath2& x, const PathFunction& phi, const RoughPath2& y,
                            const PathFunction& psi, MetricKind kind, double p = 2.5,
                            const AlphaOptions& opts = {});

/// Greedy oscillation counting: (sum_k 2^{p(k+1)} nu(2^k))^{1/p}, with the
/// geometric tail below the smallest step summed in closed form.
double osc_count_bound(const std::vector<Vec>& points, double p);
double osc_count_bound(const std::vector<G2Element>& points, double p);
double osc_count_bound(const RoughPath2& x, double p);

/// nu(delta): number of stopping times where the running oscillation exceeds delta.
std::size_t oscillation_count(const std::vector<Vec>& points, double delta);
std::size_t oscillation_count(const std::vector<G2Element>& points, double delta);

}  // namespace crp
