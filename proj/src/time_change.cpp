#include "crp/time_change.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crp {

TimeChange::TimeChange(std::vector<double> from, std::vector<double> to)
    : from_(std::move(from)), to_(std::move(to)) {
  if (from_.size() != to_.size() || from_.size() < 2) {
    throw std::invalid_argument("TimeChange: need at least two matching breakpoints");
  }
  if (from_.front() != 0.0 || to_.front() != 0.0) {
    throw std::invalid_argument("TimeChange: must fix 0");
  }
  for (std::size_t i = 1; i < from_.size(); ++i) {
    if (!(from_[i] > from_[i - 1]) || !(to_[i] > to_[i - 1])) {
      throw std::invalid_argument("TimeChange: breakpoints must be strictly increasing");
    }
  }
}

TimeChange TimeChange::identity(double horizon) { return TimeChange({0.0, horizon}, {0.0, horizon}); }

double TimeChange::eval(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
  if (t <= xs.front()) return ys.front() + (t - xs.front());
  if (t >= xs.back()) return ys.back() + (t - xs.back());
  const auto it = std::upper_bound(xs.begin(), xs.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double x0 = xs[k - 1], x1 = xs[k];
  if (t == x0) return ys[k - 1];
  const double w = (t - x0) / (x1 - x0);
  return ys[k - 1] + w * (ys[k] - ys[k - 1]);
}

double TimeChange::operator()(double t) const { return eval(from_, to_, t); }

double TimeChange::inverse(double t) const { return eval(to_, from_, t); }

TimeChange TimeChange::inverted() const { return TimeChange(to_, from_); }

TimeChange TimeChange::compose(const TimeChange& inner) const {
  // breakpoints of the composition: inner's breakpoints plus preimages of ours
  std::vector<double> pts = inner.from_;
  for (double s : from_) {
    const double pre = inner.inverse(s);
    if (pre >= 0.0 && pre <= inner.domain_end()) pts.push_back(pre);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> from, to;
  for (double p : pts) {
    if (!from.empty() && p - from.back() <= 1e-15 * std::max(1.0, std::abs(p))) continue;
    from.push_back(p);
    to.push_back((*this)(inner(p)));
  }
  from.front() = 0.0;
  to.front() = 0.0;
  return TimeChange(std::move(from), std::move(to));
}

double TimeChange::sup_deviation() const {
  double m = 0.0;
  for (std::size_t i = 0; i < from_.size(); ++i) m = std::max(m, std::abs(to_[i] - from_[i]));
  return m;
}

}  // namespace crp
