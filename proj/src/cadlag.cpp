#include "crp/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crp {

Path Path::piecewise_constant(std::vector<double> times, std::vector<Vec> values, double horizon) {
  Path p;
  p.times = std::move(times);
  p.values = std::move(values);
  p.left.reserve(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) p.left.push_back(p.values[i == 0 ? 0 : i - 1]);
  p.horizon = horizon < 0.0 && !p.times.empty() ? p.times.back() : horizon;
  p.validate();
  return p;
}

Path Path::polyline(std::vector<double> times, std::vector<Vec> values, double horizon) {
  Path p;
  p.times = std::move(times);
  p.values = std::move(values);
  p.left = p.values;
  p.horizon = horizon < 0.0 && !p.times.empty() ? p.times.back() : horizon;
  p.validate();
  return p;
}

Path Path::constant(const Vec& value, double horizon) {
  return polyline({0.0, horizon}, {value, value}, horizon);
}

std::size_t Path::jump_count() const {
  std::size_t c = 0;
  for (std::size_t i = 1; i < size(); ++i) c += is_jump(i) ? 1 : 0;
  return c;
}

void Path::validate() const {
  if (times.empty()) throw std::invalid_argument("Path: no samples");
  if (values.size() != times.size() || left.size() != times.size()) {
    throw std::invalid_argument("Path: times/values/left size mismatch");
  }
  if (times.front() != 0.0) throw std::invalid_argument("Path: first time must be 0");
  const int d = dim();
  if (d < 1 || d > kMaxDim * kMaxDim) throw std::invalid_argument("Path: bad dimension");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i].size() != d || left[i].size() != d) {
      throw std::invalid_argument("Path: inconsistent dimension at sample " + std::to_string(i));
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("Path: times must be strictly increasing");
    }
    if (!values[i].allFinite() || !left[i].allFinite()) {
      throw std::invalid_argument("Path: non-finite value at sample " + std::to_string(i));
    }
  }
  if (left.front() != values.front()) throw std::invalid_argument("Path: no jump allowed at time 0");
  if (horizon < times.back()) throw std::invalid_argument("Path: horizon before last sample");
}

Vec Path::value_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  if (t == times[i] || i + 1 == times.size()) return values[i];
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return values[i] + w * (left[i + 1] - values[i]);
}

Vec Path::left_at(double t) const {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it != times.end() && *it == t) return left[static_cast<std::size_t>(it - times.begin())];
  return value_at(t);
}

std::vector<std::pair<double, Vec>> Path::vertices() const {
  std::vector<std::pair<double, Vec>> out;
  out.reserve(2 * size());
  out.emplace_back(times[0], values[0]);
  for (std::size_t i = 1; i < size(); ++i) {
    if (left[i] != values[i] && left[i] != values[i - 1]) out.emplace_back(times[i], left[i]);
    out.emplace_back(times[i], values[i]);
  }
  return out;
}

namespace {

Path combine(const Path& a, const Path& b, double sign) {
  detail::check_same_dim(a.dim(), b.dim(), "Path::+");
  std::vector<double> ts = a.times;
  ts.insert(ts.end(), b.times.begin(), b.times.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  Path r;
  r.times = ts;
  r.horizon = std::max(a.horizon, b.horizon);
  for (double t : ts) {
    r.values.push_back(a.value_at(t) + sign * b.value_at(t));
    r.left.push_back(a.left_at(t) + sign * b.left_at(t));
  }
  r.left.front() = r.values.front();
  r.validate();
  return r;
}

}  // namespace

Path operator+(const Path& a, const Path& b) { return combine(a, b, 1.0); }

Path operator-(const Path& a) {
  Path r = a;
  for (auto& v : r.values) v = -v;
  for (auto& v : r.left) v = -v;
  return r;
}

double FictitiousSeries::term(std::size_t k) const {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("FictitiousSeries: ratio in (0,1)");
  return std::pow(ratio, static_cast<double>(k));
}

std::vector<double> jump_windows(const std::vector<double>& sizes, double delta,
                                 const FictitiousSeries& series) {
  if (!(delta > 0.0)) throw std::invalid_argument("jump_windows: delta must be positive");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] > 0.0) idx.push_back(i);
  }
  // stable sort keeps earlier times first among equal sizes
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  std::vector<double> w(sizes.size(), 0.0);
  for (std::size_t rank = 0; rank < idx.size(); ++rank) w[idx[rank]] = delta * series.term(rank + 1);
  return w;
}

JumpClock build_jump_clock(const std::vector<double>& times, const std::vector<double>& sizes,
                           double delta, const FictitiousSeries& series) {
  JumpClock c;
  c.window = jump_windows(sizes, delta, series);
  c.left_time.resize(times.size());
  c.time.resize(times.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    c.left_time[i] = times[i] + shift;
    shift += c.window[i];
    c.time[i] = times[i] + shift;
  }
  c.added = shift;
  return c;
}

Interpolation interpolate(const Path& x, const PathFunction& phi, const InterpolateOptions& opts) {
  x.validate();
  const int samples = opts.samples_per_jump > 0 ? opts.samples_per_jump : phi.default_samples();
  if (samples < 2) throw std::invalid_argument("interpolate: need at least 2 samples per jump");

  std::vector<double> sizes(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!x.is_jump(i)) continue;
    if (!phi.in_domain(x.left[i], x.values[i])) {
      std::ostringstream os;
      os << "interpolate: jump at t=" << x.times[i] << " outside the domain of path function "
         << phi.name();
      throw std::domain_error(os.str());
    }
    sizes[i] = (x.values[i] - x.left[i]).norm();
  }
  const JumpClock clock = build_jump_clock(x.times, sizes, opts.delta, opts.series);

  Interpolation out;
  out.original_horizon = x.horizon;
  out.added_time = clock.added;
  Path& y = out.path;
  auto push = [&](double t, const Vec& v) {
    y.times.push_back(t);
    y.values.push_back(v);
    y.left.push_back(v);
  };
  push(0.0, x.values[0]);
  out.index.push_back(0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (clock.window[i] == 0.0) {
      push(clock.time[i], x.values[i]);
      out.index.push_back(y.size() - 1);
      continue;
    }
    push(clock.left_time[i], x.left[i]);
    std::set<double> params;
    for (int k = 1; k <= samples; ++k) params.insert(static_cast<double>(k) / samples);
    if (phi.kind() != PathFunction::Kind::Custom) {
      for (auto& [s, v] : phi.vertices(x.values[i] - x.left[i])) {
        if (s > 0.0) params.insert(s);
      }
    }
    for (double s : params) {
      const double t = s >= 1.0 ? clock.time[i] : clock.left_time[i] + s * clock.window[i];
      if (t <= y.times.back()) continue;
      push(t, s >= 1.0 ? x.values[i] : phi.sample(x.left[i], x.values[i], s));
    }
    out.index.push_back(y.size() - 1);
  }
  y.horizon = x.horizon + clock.added;

  std::vector<double> from = x.times, to = clock.time;
  if (x.horizon > x.times.back()) {
    from.push_back(x.horizon);
    to.push_back(y.horizon);
  }
  if (from.size() == 1) {
    from.push_back(1.0);
    to.push_back(1.0);
  }
  out.tau = TimeChange(std::move(from), std::move(to));
  return out;
}

Path rescale(const Path& y, double horizon) {
  if (!(horizon > 0.0) || !(y.horizon > 0.0)) throw std::invalid_argument("rescale: empty horizon");
  Path r = y;
  const double f = horizon / y.horizon;
  for (double& t : r.times) t *= f;
  r.horizon = horizon;
  return r;
}

Path apply_time_change(const Path& y, const TimeChange& lambda, TimeDirection direction) {
  y.validate();
  const bool fwd = direction == TimeDirection::Forward;
  auto map = [&](double t) { return fwd ? lambda.inverse(t) : lambda(t); };
  // breakpoints of lambda expressed on y's clock
  const std::vector<double>& own = fwd ? lambda.to() : lambda.from();
  const double own_end = fwd ? lambda.range_end() : lambda.domain_end();
  if (std::abs(own_end - y.horizon) > 1e-9 * std::max(1.0, y.horizon)) {
    throw std::invalid_argument("apply_time_change: time change does not cover the path horizon");
  }
  std::vector<double> extra;
  for (double s : own) {
    if (!std::binary_search(y.times.begin(), y.times.end(), s) && s > 0.0 && s < y.horizon) {
      extra.push_back(s);
    }
  }
  std::vector<double> all = y.times;
  all.insert(all.end(), extra.begin(), extra.end());
  std::sort(all.begin(), all.end());

  Path r;
  r.horizon = fwd ? lambda.domain_end() : lambda.range_end();
  std::size_t j = 0;
  for (double s : all) {
    while (j < y.size() && y.times[j] < s) ++j;
    const bool is_sample = j < y.size() && y.times[j] == s;
    const double t = map(s);
    if (!r.times.empty() && !(t > r.times.back())) {
      throw std::invalid_argument("apply_time_change: time change is not strictly increasing");
    }
    r.times.push_back(r.times.empty() ? 0.0 : t);
    if (is_sample) {
      r.values.push_back(y.values[j]);
      r.left.push_back(y.left[j]);
    } else {
      const Vec v = y.value_at(s);
      r.values.push_back(v);
      r.left.push_back(v);
    }
  }
  r.horizon = std::max(r.horizon, r.times.back());
  r.validate();
  return r;
}

}  // namespace crp
