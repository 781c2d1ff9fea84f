#include "crp/lift.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crp {

bool RoughPath2::is_jump(std::size_t i) const {
  return i > 0 && (left[i].vec != points[i].vec || left[i].mat != points[i].mat);
}

Path RoughPath2::level1() const {
  Path p;
  p.times = times;
  p.horizon = horizon;
  for (std::size_t i = 0; i < size(); ++i) {
    p.values.push_back(points[i].vec);
    p.left.push_back(left[i].vec);
  }
  return p;
}

bool RoughPath2::scan_marcus_like(double tol) const {
  for (std::size_t i = 1; i < size(); ++i) {
    if (!is_jump(i)) continue;
    const Lie2Element l = log2(jump(i));
    const double scale = std::max(1.0, l.vec().squaredNorm());
    if (l.area_norm() > tol * scale) return false;
  }
  return true;
}

void RoughPath2::validate() const {
  if (times.empty()) throw std::invalid_argument("RoughPath2: no samples");
  if (points.size() != times.size() || left.size() != times.size()) {
    throw std::invalid_argument("RoughPath2: size mismatch");
  }
  if (times.front() != 0.0) throw std::invalid_argument("RoughPath2: first time must be 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("RoughPath2: times not increasing");
    detail::check_same_dim(points[i].dim(), points[0].dim(), "RoughPath2");
  }
  if (horizon < times.back()) throw std::invalid_argument("RoughPath2: horizon before last sample");
}

namespace {

template <class IncrementFn>
RoughPath2 lift_by_increments(const Path& x, IncrementFn&& inc) {
  x.validate();
  const int d = x.dim();
  if (d > kMaxDim) throw std::invalid_argument("lift: dimension exceeds supported envelope");
  RoughPath2 r;
  r.times = x.times;
  r.horizon = x.horizon;
  r.points.reserve(x.size());
  r.left.reserve(x.size());
  r.points.push_back(G2Element::identity(d));
  r.left.push_back(G2Element::identity(d));
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Vec cont = x.left[i] - x.values[i - 1];
    G2Element l = cont.isZero(0.0) ? r.points.back() : r.points.back() * inc(i, cont, false);
    G2Element p = x.is_jump(i) ? l * inc(i, Vec(x.values[i] - x.left[i]), true) : l;
    r.left.push_back(std::move(l));
    r.points.push_back(std::move(p));
  }
  return r;
}

}  // namespace

RoughPath2 lift_piecewise_linear(const Path& x) {
  RoughPath2 r = lift_by_increments(
      x, [](std::size_t, const Vec& dx, bool) { return exp2(Lie2Element::from_vec(dx)); });
  r.marcus_like = true;
  return r;
}

RoughPath2 marcus_lift(const Path& x) { return lift_piecewise_linear(x); }

RoughPath2 modified_lift(const Path& x, const PathFunction& phi) {
  RoughPath2 r =
      lift_by_increments(x, [&](std::size_t, const Vec& dx, bool) { return phi.jump_element(dx); });
  r.marcus_like = r.scan_marcus_like();
  return r;
}

RoughPath2 lift_with_area(const Path& x, const std::vector<Lie2Element>& extra) {
  if (extra.size() != x.size()) throw std::invalid_argument("lift_with_area: one area per sample");
  x.validate();
  const int d = x.dim();
  RoughPath2 r;
  r.times = x.times;
  r.horizon = x.horizon;
  r.points.push_back(G2Element::identity(d));
  r.left.push_back(G2Element::identity(d));
  for (std::size_t i = 1; i < x.size(); ++i) {
    detail::check_same_dim(extra[i].dim(), d, "lift_with_area");
    Lie2Element l = extra[i];
    l.vec() = x.left[i] - x.values[i - 1];
    G2Element lp = r.points.back() * exp2(l);
    G2Element p = x.is_jump(i) ? lp * exp2(Lie2Element::from_vec(x.values[i] - x.left[i])) : lp;
    r.left.push_back(std::move(lp));
    r.points.push_back(std::move(p));
  }
  r.marcus_like = true;  // jumps carry no area
  return r;
}

namespace {

bool times_subset(const std::vector<double>& sub, const std::vector<double>& super) {
  for (double t : sub) {
    const auto it = std::lower_bound(super.begin(), super.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
    if (it == super.end() || std::abs(*it - t) > 1e-12 * std::max(1.0, std::abs(t))) return false;
  }
  return true;
}

Lie2Element joint_log(const Lie2Element& xl, const Vec& k) {
  const int d = xl.dim();
  const int dp = static_cast<int>(k.size());
  Lie2Element j(d + dp);
  j.vec().head(d) = xl.vec();
  j.vec().tail(dp) = k;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) j.set_area(a, b, xl.area(a, b));
  }
  return j;
}

}  // namespace

RoughPath2 young_pair(const RoughPath2& x, const Path& h, const YoungOptions& opts) {
  x.validate();
  h.validate();
  if (opts.p < 1.0 || opts.q < 1.0) throw std::invalid_argument("young_pair: p, q must be >= 1");
  if (1.0 / opts.p + 1.0 / opts.q <= 1.0) {
    throw std::invalid_argument("young_pair: q too large, need 1/p + 1/q > 1");
  }
  const int d = x.dim();
  const int dp = h.dim();
  if (d + dp > kMaxDim) throw std::invalid_argument("young_pair: joint dimension too large");
  if (!times_subset(h.times, x.times)) {
    throw std::invalid_argument("young_pair: perturbation sample times are not on the rough path grid");
  }
  RoughPath2 r;
  r.times = x.times;
  r.horizon = std::max(x.horizon, h.horizon);
  r.points.push_back(G2Element::identity(d + dp));
  r.left.push_back(G2Element::identity(d + dp));
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t0 = x.times[i - 1], t1 = x.times[i];
    const Vec kc = h.left_at(t1) - h.value_at(t0);
    const Vec kj = h.value_at(t1) - h.left_at(t1);
    const Lie2Element xc = log2(x.continuous_increment(i));
    G2Element l = r.points.back() * exp2(joint_log(xc, kc));
    G2Element p = l;
    if (x.is_jump(i) || !kj.isZero(0.0)) {
      p = l * exp2(joint_log(log2(x.jump(i)), kj));
    }
    r.left.push_back(std::move(l));
    r.points.push_back(std::move(p));
  }
  r.marcus_like = r.scan_marcus_like(1e-12);
  return r;
}

RoughPath2 translate(const RoughPath2& x, const Path& h, const YoungOptions& opts) {
  detail::check_same_dim(x.dim(), h.dim(), "translate");
  const RoughPath2 s = young_pair(x, h, opts);
  const int d = x.dim();
  auto plus = [d](const G2Element& g) {
    G2Element r;
    r.vec = g.vec.head(d) + g.vec.tail(d);
    r.mat = g.mat.topLeftCorner(d, d) + g.mat.topRightCorner(d, d) + g.mat.bottomLeftCorner(d, d) +
            g.mat.bottomRightCorner(d, d);
    return r;
  };
  RoughPath2 r;
  r.times = s.times;
  r.horizon = s.horizon;
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.points.push_back(plus(s.points[i]));
    r.left.push_back(plus(s.left[i]));
  }
  r.marcus_like = r.scan_marcus_like(1e-12);
  return r;
}

RoughInterpolation interpolate(const RoughPath2& x, const PathFunction& phi,
                               const InterpolateOptions& opts) {
  x.validate();
  const int samples = opts.samples_per_jump > 0 ? opts.samples_per_jump : phi.default_samples();
  if (samples < 2) throw std::invalid_argument("interpolate: need at least 2 samples per jump");
  std::vector<double> sizes(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!x.is_jump(i)) continue;
    if (!phi.in_group_domain(x.left[i], x.points[i])) {
      std::ostringstream os;
      os << "interpolate: jump at t=" << x.times[i] << " outside the domain of path function "
         << phi.name();
      throw std::domain_error(os.str());
    }
    sizes[i] = hom_dist(x.left[i], x.points[i]);
  }
  const JumpClock clock = build_jump_clock(x.times, sizes, opts.delta, opts.series);

  RoughInterpolation out;
  out.times.push_back(0.0);
  out.points.push_back(x.points[0]);
  out.index.push_back(0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (clock.window[i] == 0.0) {
      out.times.push_back(clock.time[i]);
      out.points.push_back(x.points[i]);
      out.index.push_back(out.times.size() - 1);
      continue;
    }
    out.times.push_back(clock.left_time[i]);
    out.points.push_back(x.left[i]);
    std::set<double> params;
    for (int k = 1; k <= samples; ++k) params.insert(static_cast<double>(k) / samples);
    if (phi.kind() != PathFunction::Kind::Custom && phi.kind() != PathFunction::Kind::LogLinear) {
      for (auto& [s, v] : phi.vertices(x.jump(i).vec)) {
        if (s > 0.0) params.insert(s);
      }
    }
    for (double s : params) {
      const double t = s >= 1.0 ? clock.time[i] : clock.left_time[i] + s * clock.window[i];
      if (t <= out.times.back()) continue;
      out.times.push_back(t);
      out.points.push_back(s >= 1.0 ? x.points[i] : phi.sample_group(x.left[i], x.points[i], s));
    }
    out.index.push_back(out.times.size() - 1);
  }
  out.horizon = x.horizon + clock.added;
  std::vector<double> from = x.times, to = clock.time;
  if (x.horizon > x.times.back()) {
    from.push_back(x.horizon);
    to.push_back(out.horizon);
  }
  if (from.size() == 1) {
    from.push_back(1.0);
    to.push_back(1.0);
  }
  out.tau = TimeChange(std::move(from), std::move(to));
  return out;
}

}  // namespace crp
