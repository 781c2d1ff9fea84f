#pragma once

// Sampled cadlag paths in R^d, the fictitious-time interpolation x^{phi, delta}
// and time changes.

#include "crp/algebra.hpp"
#include "crp/path_function.hpp"
#include "crp/time_change.hpp"

#include <cstddef>
#include <vector>

namespace crp {

/// Finite cadlag path. Between samples i-1 and i the path moves linearly from
/// values[i-1] to left[i] (the left limit at times[i]) and then jumps to
/// values[i]. Piecewise-constant paths have left[i] == values[i-1]; polylines
/// have left[i] == values[i]. After the last sample it is constant up to horizon.
struct Path {
  std::vector<double> times;
  std::vector<Vec> values;
  std::vector<Vec> left;
  double horizon = 0.0;

  static Path piecewise_constant(std::vector<double> times, std::vector<Vec> values,
                                 double horizon = -1.0);
  static Path polyline(std::vector<double> times, std::vector<Vec> values, double horizon = -1.0);
  static Path constant(const Vec& value, double horizon);

  std::size_t size() const { return times.size(); }
  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
  bool is_jump(std::size_t i) const { return i > 0 && left[i] != values[i]; }
  Vec jump(std::size_t i) const { return values[i] - left[i]; }
  std::size_t jump_count() const;
  /// Right-continuous evaluation.
  Vec value_at(double t) const;
  /// Left-limit evaluation x_{t-}.
  Vec left_at(double t) const;

  /// Vertex sequence v0, left1, v1, left2, v2, ... (left limits only where
  /// they differ from the neighbouring vertices) with their times.
  std::vector<std::pair<double, Vec>> vertices() const;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

Path operator+(const Path& a, const Path& b);
Path operator-(const Path& a);

/// Geometric fictitious-time series r_k = ratio^k, k = 1, 2, ...
struct FictitiousSeries {
  double ratio = 0.5;
  double term(std::size_t k) const;
};

/// Window lengths delta * r_rank per sample (0 where there is no jump). Jumps are
/// ranked by decreasing size, ties broken by earlier time.
std::vector<double> jump_windows(const std::vector<double>& sizes, double delta,
                                 const FictitiousSeries& series = {});

/// Stretched clock tau(t_i-) and tau(t_i) for every sample.
struct JumpClock {
  std::vector<double> window;
  std::vector<double> left_time;
  std::vector<double> time;
  double added = 0.0;
};
JumpClock build_jump_clock(const std::vector<double>& times, const std::vector<double>& sizes,
                           double delta, const FictitiousSeries& series = {});

struct InterpolateOptions {
  double delta = 1.0;
  int samples_per_jump = 0;  // 0: path function default
  FictitiousSeries series{};
};

/// x^{phi, delta} on the stretched clock [0, T + r], together with the time
/// change tau_x sending original sample times to stretched times.
struct Interpolation {
  Path path;
  TimeChange tau;
  std::vector<std::size_t> index;  // original sample i -> vertex index in path
  double original_horizon = 0.0;
  double added_time = 0.0;
};

/// Throws std::domain_error naming the offending time for jumps outside phi's domain.
Interpolation interpolate(const Path& x, const PathFunction& phi, const InterpolateOptions& opts = {});

/// Linear rescale of the clock onto [0, horizon].
Path rescale(const Path& y, double horizon);

enum class TimeDirection { Forward, Backward };

/// Forward: y o lambda (y lives on lambda's range). Backward: y o lambda^{-1}.
/// Samples are carried over exactly; lambda's breakpoints are added as samples.
Path apply_time_change(const Path& y, const TimeChange& lambda, TimeDirection direction);

}  // namespace crp
