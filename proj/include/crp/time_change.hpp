#pragma once

#include <utility>
#include <vector>

namespace crp {

/// Piecewise-linear strictly increasing bijection [0, domain_end] -> [0, range_end]
/// given by breakpoints (s_i, t_i).
class TimeChange {
 public:
  TimeChange() = default;
  /// Throws std::invalid_argument unless both coordinates are strictly increasing
  /// and the first breakpoint is (0, 0).
  TimeChange(std::vector<double> from, std::vector<double> to);

  static TimeChange identity(double horizon);

  double operator()(double t) const;
  double inverse(double t) const;
  TimeChange inverted() const;
  /// this o inner, i.e. t -> this(inner(t)).
  TimeChange compose(const TimeChange& inner) const;

  /// sup_t |lambda(t) - t| (attained at a breakpoint).
  double sup_deviation() const;

  double domain_end() const { return from_.back(); }
  double range_end() const { return to_.back(); }
  const std::vector<double>& from() const { return from_; }
  const std::vector<double>& to() const { return to_; }

 private:
  static double eval(const std::vector<double>& xs, const std::vector<double>& ys, double t);

  std::vector<double> from_{0.0, 1.0};
  std::vector<double> to_{0.0, 1.0};
};

}  // namespace crp
