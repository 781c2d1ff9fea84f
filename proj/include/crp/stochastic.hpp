#pragma once

// Driving semimartingales: Brownian motion, finite-activity Levy processes and
// the discrete approximation families (Donsker walks, null arrays, a martingale
// CLT array), plus bracket, jump truncation and partition approximations.

#include "crp/cadlag.hpp"
#include "crp/path_function.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crp {

struct SemimartingaleModel {
  enum class Kind { BrownianMotion, LevyFinite, RandomWalk, NullArray, MartingaleCLT };
  enum class StepLaw { Gaussian, Rademacher };

  Kind kind = Kind::BrownianMotion;
  int d = 1;
  double T = 1.0;
  Vec drift;        // b
  Mat diffusion;    // a, covariance per unit time
  double intensity = 0.0;
  Vec jump_mean;
  Mat jump_cov;     // jumps ~ N(jump_mean, jump_cov)
  bool compensated = false;  // subtract intensity * jump_mean from the drift
  StepLaw step_law = StepLaw::Gaussian;
  double scaling = 1.0;

  static SemimartingaleModel brownian(int d, double sigma, double T = 1.0);
  static SemimartingaleModel brownian(const Mat& covariance, double T = 1.0);
  static SemimartingaleModel levy(const Vec& drift, const Mat& diffusion, double intensity, const Vec& jump_mean,
                                  const Mat& jump_cov, double T = 1.0, bool compensated = false);
  static SemimartingaleModel random_walk(int d, StepLaw law = StepLaw::Gaussian, double scaling = 1.0,
                                         double T = 1.0);
  static SemimartingaleModel null_array(const Vec& drift, double intensity, const Vec& jump_mean, const Mat& jump_cov,
                                        double T = 1.0);
  static SemimartingaleModel martingale_clt(int d, double T = 1.0);

  /// Drift actually applied (after compensation).
  Vec effective_drift() const;
  std::string name() const;
  void validate() const;
};

struct SamplePath {
  Path path;
  std::vector<bool> jump_mask;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string model;
  std::size_t grid = 0;  // number of regular grid points
};

/// Regular grid t_k = T k / (n - 1), k < n; Levy jump times are inserted as extra samples.
SamplePath simulate(const SemimartingaleModel& model, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// The regular grid used by simulate.
std::vector<double> regular_grid(double T, std::size_t n);

/// Running sum of dX (x) dX over the skeleton, flattened row-major to d*d.
Path bracket(const Path& x);
Mat bracket_at_end(const Path& x);

/// X^delta: every jump dX replaced by min(1, delta/|dX|) dX.
Path jump_truncate(const Path& x, double delta);
SamplePath jump_truncate(const SamplePath& x, double delta);

struct ApproxScheme {
  enum class Kind { PiecewiseConstant, PhiInterp };
  Kind kind = Kind::PiecewiseConstant;
  std::vector<double> partition;
  std::optional<PathFunction> phi;

  static ApproxScheme piecewise_constant(std::vector<double> partition);
  static ApproxScheme phi_interp(std::vector<double> partition, PathFunction phi);
};

/// X^{[D]} (constant between partition points) or X^{D,phi} (phi across each cell).
/// Partition points must be sample times of x (matched to 1e-9 relative).
Path approximate(const Path& x, const ApproxScheme& scheme);

/// Every m-th point of regular_grid(T, n); n - 1 must be a multiple of `cells`.
std::vector<double> coarse_partition(double T, std::size_t n, std::size_t cells);

/// Monte Carlo surrogate sup_n E[tr [X]_T + |K|_{1-var}] over the given grid sizes.
double ucv_surrogate(const SemimartingaleModel& model, const std::vector<std::size_t>& grids, std::size_t samples,
                     std::uint64_t seed);

}  // namespace crp
