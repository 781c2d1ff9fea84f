#include "crp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace crp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Log coordinates (vec, strict-upper area) of a sequence of G2 points, stored
/// flat for the O(n^2) loops.
class LieSeq {
 public:
  explicit LieSeq(const std::vector<G2Element>& pts) {
    n_ = pts.size();
    d_ = pts.empty() ? 0 : pts.front().dim();
    m_ = d_ * (d_ - 1) / 2;
    stride_ = static_cast<std::size_t>(d_ + m_);
    data_.resize(n_ * stride_);
    for (std::size_t k = 0; k < n_; ++k) {
      double* row = &data_[k * stride_];
      for (int i = 0; i < d_; ++i) row[i] = pts[k].vec(i);
      int c = d_;
      for (int i = 0; i < d_; ++i) {
        for (int j = i + 1; j < d_; ++j) row[c++] = 0.5 * (pts[k].mat(i, j) - pts[k].mat(j, i));
      }
    }
  }
  std::size_t size() const { return n_; }
  int dim() const { return d_; }
  int area_size() const { return m_; }
  const double* row(std::size_t k) const { return &data_[k * stride_]; }

  /// Log coordinates of the increment x_{k,l}: (x_l - x_k, A_l - A_k - (x_k ^ x_l)/2).
  void increment(std::size_t k, std::size_t l, double* out) const {
    const double* a = row(k);
    const double* b = row(l);
    for (int i = 0; i < d_; ++i) out[i] = b[i] - a[i];
    int c = d_;
    for (int i = 0; i < d_; ++i) {
      for (int j = i + 1; j < d_; ++j, ++c) out[c] = b[c] - a[c] - 0.5 * (a[i] * b[j] - a[j] * b[i]);
    }
  }

 private:
  std::size_t n_ = 0;
  int d_ = 0, m_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

/// hom_norm of exp(-X) exp(Y) for X, Y in log coordinates.
double lie_gap_norm(const double* x, const double* y, int d) {
  double v = 0.0;
  for (int i = 0; i < d; ++i) v += (y[i] - x[i]) * (y[i] - x[i]);
  double a = 0.0;
  int c = d;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j, ++c) {
      const double w = y[c] - x[c] - 0.5 * (x[i] * y[j] - x[j] * y[i]);
      a += w * w;
    }
  }
  return std::max(std::sqrt(v), std::sqrt(2.0 * std::sqrt(a)));
}

/// |x^2 - y^2| (Frobenius, full tensor) for increments in log coordinates.
double level2_gap(const double* x, const double* y, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double ax = 0.0, ay = 0.0;
      if (i != j) {
        const int lo = std::min(i, j), hi = std::max(i, j);
        const int c = d + lo * d - lo * (lo + 1) / 2 + (hi - lo - 1);
        const double sign = i < j ? 1.0 : -1.0;
        ax = sign * x[c];
        ay = sign * y[c];
      }
      const double w = 0.5 * (x[i] * x[j] - y[i] * y[j]) + ax - ay;
      s += w * w;
    }
  }
  return std::sqrt(s);
}

double euclid(const Vec& a, const Vec& b) { return (a - b).norm(); }

template <class P>
void check_pair(const std::vector<P>& x, const std::vector<P>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("metric: grid mismatch (different lengths)");
}

/// Generic lexicographic bottleneck path over the n x m grid.
Alignment bottleneck(std::size_t n, std::size_t m, const std::function<double(std::size_t, std::size_t)>& primary,
                     const std::function<double(std::size_t, std::size_t)>& secondary, double* value) {
  if (n == 0 || m == 0) throw std::invalid_argument("alignment: empty trace");
  std::vector<double> prim(n * m), best(n * m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) prim[i * m + j] = primary(i, j);
  }
  // pass 1: optimal bottleneck value
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double pred = (i == 0 && j == 0) ? 0.0 : kInf;
      if (i > 0) pred = std::min(pred, best[(i - 1) * m + j]);
      if (j > 0) pred = std::min(pred, best[i * m + j - 1]);
      if (i > 0 && j > 0) pred = std::min(pred, best[(i - 1) * m + j - 1]);
      best[i * m + j] = std::max(pred, prim[i * m + j]);
    }
  }
  const double cstar = best[n * m - 1];
  if (value) *value = cstar;
  // pass 2: among optimal paths minimise the secondary bottleneck
  std::vector<double> sec(n * m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (prim[i * m + j] > cstar) continue;
      double pred = (i == 0 && j == 0) ? 0.0 : kInf;
      if (i > 0) pred = std::min(pred, sec[(i - 1) * m + j]);
      if (j > 0) pred = std::min(pred, sec[i * m + j - 1]);
      if (i > 0 && j > 0) pred = std::min(pred, sec[(i - 1) * m + j - 1]);
      if (pred < kInf) sec[i * m + j] = std::max(pred, secondary(i, j));
    }
  }
  Alignment al;
  std::size_t i = n - 1, j = m - 1;
  al.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    double bd = kInf, bi = kInf, bj = kInf;
    if (i > 0 && j > 0) bd = sec[(i - 1) * m + j - 1];
    if (i > 0) bi = sec[(i - 1) * m + j];
    if (j > 0) bj = sec[i * m + j - 1];
    if (bd <= bi && bd <= bj && bd < kInf) {
      --i;
      --j;
    } else if (bi <= bj && bi < kInf) {
      --i;
    } else if (bj < kInf) {
      --j;
    } else {
      throw std::logic_error("alignment: backtrack failed");
    }
    al.pairs.emplace_back(i, j);
  }
  std::reverse(al.pairs.begin(), al.pairs.end());
  return al;
}

template <class P>
double lambda_of(const Trace<P>& a, const Trace<P>& b, const Alignment& al) {
  double m = 0.0;
  for (auto [i, j] : al.pairs) m = std::max(m, std::abs(a.times[i] - b.times[j]));
  return m;
}

template <class P>
std::pair<std::vector<P>, std::vector<P>> aligned(const Trace<P>& a, const Trace<P>& b, const Alignment& al) {
  std::vector<P> x, y;
  x.reserve(al.pairs.size());
  y.reserve(al.pairs.size());
  for (auto [i, j] : al.pairs) {
    x.push_back(a.points[i]);
    y.push_back(b.points[j]);
  }
  return {std::move(x), std::move(y)};
}

template <class P, class DistFn>
MetricReport sigma_impl(const Trace<P>& a, const Trace<P>& b, MetricKind kind, double p, DistFn&& dist) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("sigma_estimate: empty trace");
  auto dt = [&](std::size_t i, std::size_t j) { return std::abs(a.times[i] - b.times[j]); };
  auto full = [&](std::size_t i, std::size_t j) { return std::max(dt(i, j), dist(a.points[i], b.points[j])); };
  auto space = [&](std::size_t i, std::size_t j) { return dist(a.points[i], b.points[j]); };

  MetricReport rep;
  double v = 0.0;
  Alignment best = bottleneck(a.size(), b.size(), full, dt, &v);
  best.lambda_sup = lambda_of(a, b, best);
  if (kind == MetricKind::Infinity) {
    rep.value = v;
    rep.alignment = std::move(best);
    return rep;
  }
  std::vector<Alignment> candidates;
  candidates.push_back(std::move(best));
  Alignment by_time = bottleneck(a.size(), b.size(), dt, space, nullptr);
  by_time.lambda_sup = lambda_of(a, b, by_time);
  candidates.push_back(std::move(by_time));

  rep.value = kInf;
  for (auto& al : candidates) {
    auto [x, y] = aligned(a, b, al);
    double f = 0.0;
    switch (kind) {
      case MetricKind::PVar: f = rho_pvar(x, y, p); break;
      case MetricKind::Zero: f = d_zero(x, y); break;
      case MetricKind::Beta: f = d_pvar(x, y, p); break;
      case MetricKind::Infinity: break;
    }
    const double c = std::max(al.lambda_sup, f);
    if (c < rep.value) {
      rep.value = c;
      rep.alignment = al;
    }
  }
  return rep;
}

void finish_alpha(MetricReport& rep) {
  const auto& s = rep.per_delta;
  rep.monotone_trend = true;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] > s[k - 1] * (1.0 + 1e-12) + 1e-15) rep.monotone_trend = false;
  }
  if (s.size() >= 2 && rep.monotone_trend) {
    const double last = s.back(), prev = s[s.size() - 2];
    rep.value = std::clamp(2.0 * last - prev, 0.0, last);
  } else {
    rep.value = s.empty() ? 0.0 : s.back();
  }
}

template <class DistFn>
std::size_t osc_count_impl(std::size_t n, double delta, DistFn&& dist) {
  std::size_t count = 0;
  std::size_t start = 0;
  double osc = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    double far = 0.0;
    for (std::size_t u = start; u < t; ++u) far = std::max(far, dist(u, t));
    osc = std::max(osc, far);
    if (osc > delta) {
      ++count;
      start = t;
      osc = 0.0;
    }
  }
  return count;
}

template <class DistFn>
double osc_bound_impl(std::size_t n, double p, DistFn&& dist) {
  if (p < 1.0) throw std::invalid_argument("osc_count_bound: p must be >= 1");
  if (n < 2) return 0.0;
  double min_step = kInf;
  std::size_t changes = 0;
  double spread = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double s = dist(t - 1, t);
    if (s > 0.0) {
      min_step = std::min(min_step, s);
      ++changes;
    }
    spread = std::max(spread, dist(0, t));
  }
  if (changes == 0) return 0.0;
  // oscillation of the whole path is at most twice the spread around x_0
  const int kmax = static_cast<int>(std::ceil(std::log2(2.0 * spread))) + 1;
  const int kmin = static_cast<int>(std::floor(std::log2(min_step)));
  double sum = static_cast<double>(changes) * std::pow(2.0, p * kmin) / (1.0 - std::pow(2.0, -p));
  for (int k = kmin; k <= kmax; ++k) {
    const std::size_t nu = osc_count_impl(n, std::ldexp(1.0, k), dist);
    sum += std::pow(2.0, p * (k + 1)) * static_cast<double>(nu);
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace

Trace<Vec> trace_of(const Path& x, int densify) {
  if (densify < 1) throw std::invalid_argument("trace_of: densify must be >= 1");
  Trace<Vec> tr;
  tr.times.push_back(x.times[0]);
  tr.points.push_back(x.values[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t0 = x.times[i - 1], t1 = x.times[i];
    const Vec& a = x.values[i - 1];
    const Vec& b = x.left[i];
    if (a != b) {
      for (int k = 1; k < densify; ++k) {
        const double w = static_cast<double>(k) / densify;
        tr.times.push_back(t0 + w * (t1 - t0));
        tr.points.push_back(a + w * (b - a));
      }
    }
    tr.times.push_back(t1);
    tr.points.push_back(b);
    if (x.is_jump(i)) {
      tr.times.push_back(t1);
      tr.points.push_back(x.values[i]);
    }
  }
  if (x.horizon > x.times.back()) {
    tr.times.push_back(x.horizon);
    tr.points.push_back(x.values.back());
  }
  return tr;
}

namespace {

void geodesic_fill(Trace<G2Element>& tr, double t0, const G2Element& g, double t1, const G2Element& h, int densify) {
  if (densify < 2) return;
  const Lie2Element l = log2(increment(g, h));
  if (hom_norm(l) == 0.0) return;
  for (int k = 1; k < densify; ++k) {
    const double w = static_cast<double>(k) / densify;
    tr.times.push_back(t0 + w * (t1 - t0));
    tr.points.push_back(g * exp2(l * w));
  }
}

}  // namespace

Trace<G2Element> trace_of(const RoughPath2& x, int densify) {
  if (densify < 1) throw std::invalid_argument("trace_of: densify must be >= 1");
  Trace<G2Element> tr;
  tr.times.push_back(x.times[0]);
  tr.points.push_back(x.points[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    geodesic_fill(tr, x.times[i - 1], x.points[i - 1], x.times[i], x.left[i], densify);
    tr.times.push_back(x.times[i]);
    tr.points.push_back(x.left[i]);
    if (x.is_jump(i)) {
      tr.times.push_back(x.times[i]);
      tr.points.push_back(x.points[i]);
    }
  }
  if (x.horizon > x.times.back()) {
    tr.times.push_back(x.horizon);
    tr.points.push_back(x.points.back());
  }
  return tr;
}

Trace<G2Element> trace_of(const RoughInterpolation& x, int densify) {
  if (densify < 1) throw std::invalid_argument("trace_of: densify must be >= 1");
  Trace<G2Element> tr;
  tr.times.push_back(x.times[0]);
  tr.points.push_back(x.points[0]);
  for (std::size_t i = 1; i < x.times.size(); ++i) {
    geodesic_fill(tr, x.times[i - 1], x.points[i - 1], x.times[i], x.points[i], densify);
    tr.times.push_back(x.times[i]);
    tr.points.push_back(x.points[i]);
  }
  if (x.horizon > x.times.back()) {
    tr.times.push_back(x.horizon);
    tr.points.push_back(x.points.back());
  }
  return tr;
}

double pvar(const std::vector<Vec>& pts, double p) {
  return pvar_dp(pts.size(), p, [&](std::size_t i, std::size_t j) { return euclid(pts[i], pts[j]); });
}

double pvar(const std::vector<G2Element>& pts, double p) {
  const LieSeq s(pts);
  const int d = s.dim();
  return pvar_dp(pts.size(), p, [&](std::size_t i, std::size_t j) {
    const double* a = s.row(i);
    const double* b = s.row(j);
    double v = 0.0;
    for (int k = 0; k < d; ++k) v += (b[k] - a[k]) * (b[k] - a[k]);
    double ar = 0.0;
    int c = d;
    for (int k = 0; k < d; ++k) {
      for (int l = k + 1; l < d; ++l, ++c) {
        const double w = b[c] - a[c] - 0.5 * (a[k] * b[l] - a[l] * b[k]);
        ar += w * w;
      }
    }
    return std::max(std::sqrt(v), std::sqrt(2.0 * std::sqrt(ar)));
  });
}

double pvar(const Path& x, double p) {
  std::vector<Vec> pts;
  for (auto& [t, v] : x.vertices()) pts.push_back(v);
  return pvar(pts, p);
}

double pvar(const RoughPath2& x, double p) { return pvar(trace_of(x).points, p); }

double rho_pvar(const std::vector<Vec>& x, const std::vector<Vec>& y, double p) {
  check_pair(x, y);
  return pvar_dp(x.size(), p, [&](std::size_t i, std::size_t j) {
    return ((x[j] - x[i]) - (y[j] - y[i])).norm();
  });
}

double rho_pvar(const std::vector<G2Element>& x, const std::vector<G2Element>& y, double p) {
  check_pair(x, y);
  if (!x.empty()) detail::check_same_dim(x.front().dim(), y.front().dim(), "rho_pvar");
  const LieSeq sx(x), sy(y);
  const int d = sx.dim();
  const std::size_t w = static_cast<std::size_t>(d + sx.area_size());
  std::vector<double> bx(w), by(w);
  const double lvl1 = pvar_dp(x.size(), p, [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double v = (sx.row(j)[k] - sx.row(i)[k]) - (sy.row(j)[k] - sy.row(i)[k]);
      s += v * v;
    }
    return std::sqrt(s);
  });
  // level 2 enters with exponent p/2: run the DP with p/2 on |.| and raise to 2/p
  const double half = p / 2.0;
  double lvl2 = 0.0;
  if (x.size() >= 2) {
    std::vector<double> best(x.size(), 0.0);
    for (std::size_t j = 1; j < x.size(); ++j) {
      double b = 0.0;
      for (std::size_t i = 0; i < j; ++i) {
        sx.increment(i, j, bx.data());
        sy.increment(i, j, by.data());
        b = std::max(b, best[i] + std::pow(level2_gap(bx.data(), by.data(), d), half));
      }
      best[j] = b;
    }
    lvl2 = std::pow(best.back(), 2.0 / p);
  }
  return std::max(lvl1, lvl2);
}

double rho_pvar(const RoughPath2& x, const RoughPath2& y, double p) {
  if (x.times != y.times) throw std::invalid_argument("rho_pvar: grid mismatch; resample first");
  return rho_pvar(trace_of(x).points, trace_of(y).points, p);
}

double d_pvar(const std::vector<Vec>& x, const std::vector<Vec>& y, double p) { return rho_pvar(x, y, p); }

double d_pvar(const std::vector<G2Element>& x, const std::vector<G2Element>& y, double p) {
  check_pair(x, y);
  const LieSeq sx(x), sy(y);
  const int d = sx.dim();
  const std::size_t w = static_cast<std::size_t>(d + sx.area_size());
  std::vector<double> bx(w), by(w);
  return pvar_dp(x.size(), p, [&](std::size_t i, std::size_t j) {
    sx.increment(i, j, bx.data());
    sy.increment(i, j, by.data());
    return lie_gap_norm(bx.data(), by.data(), d);
  });
}

double d_zero(const std::vector<Vec>& x, const std::vector<Vec>& y) {
  check_pair(x, y);
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    m = std::max(m, (x[k] - y[k]).norm());
    for (std::size_t l = k + 1; l < x.size(); ++l) m = std::max(m, ((x[l] - x[k]) - (y[l] - y[k])).norm());
  }
  return m;
}

double d_zero(const std::vector<G2Element>& x, const std::vector<G2Element>& y) {
  check_pair(x, y);
  const LieSeq sx(x), sy(y);
  const int d = sx.dim();
  const std::size_t w = static_cast<std::size_t>(d + sx.area_size());
  std::vector<double> bx(w), by(w);
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    m = std::max(m, lie_gap_norm(sx.row(k), sy.row(k), d));
    for (std::size_t l = k + 1; l < x.size(); ++l) {
      sx.increment(k, l, bx.data());
      sy.increment(k, l, by.data());
      m = std::max(m, lie_gap_norm(bx.data(), by.data(), d));
    }
  }
  return m;
}

Alignment bottleneck_alignment(const Trace<Vec>& a, const Trace<Vec>& b, double* value) {
  auto dt = [&](std::size_t i, std::size_t j) { return std::abs(a.times[i] - b.times[j]); };
  Alignment al = bottleneck(
      a.size(), b.size(),
      [&](std::size_t i, std::size_t j) { return std::max(dt(i, j), euclid(a.points[i], b.points[j])); },
      dt, value);
  al.lambda_sup = lambda_of(a, b, al);
  return al;
}

Alignment bottleneck_alignment(const Trace<G2Element>& a, const Trace<G2Element>& b, double* value) {
  auto dt = [&](std::size_t i, std::size_t j) { return std::abs(a.times[i] - b.times[j]); };
  Alignment al = bottleneck(
      a.size(), b.size(),
      [&](std::size_t i, std::size_t j) { return std::max(dt(i, j), hom_dist(a.points[i], b.points[j])); },
      dt, value);
  al.lambda_sup = lambda_of(a, b, al);
  return al;
}

MetricReport sigma_estimate(const Trace<Vec>& a, const Trace<Vec>& b, MetricKind kind, double p) {
  return sigma_impl(a, b, kind, p, euclid);
}

MetricReport sigma_estimate(const Trace<G2Element>& a, const Trace<G2Element>& b, MetricKind kind, double p) {
  return sigma_impl(a, b, kind, p, [](const G2Element& g, const G2Element& h) { return hom_dist(g, h); });
}

MetricReport alpha_estimate(const Path& x, const PathFunction& phi, const Path& y, const PathFunction& psi,
                            MetricKind kind, double p, const AlphaOptions& opts) {
  if (opts.delta_levels < 1) throw std::invalid_argument("alpha_estimate: need at least one delta level");
  const double horizon = std::max(x.horizon, y.horizon);
  MetricReport rep;
  for (int l = 0; l < opts.delta_levels; ++l) {
    InterpolateOptions io;
    io.delta = std::ldexp(1.0, -l);
    io.samples_per_jump = opts.samples_per_jump;
    Path xi = interpolate(x, phi, io).path;
    Path yi = interpolate(y, psi, io).path;
    xi = rescale(xi, horizon);
    yi = rescale(yi, horizon);
    MetricReport r = sigma_estimate(trace_of(xi, opts.densify), trace_of(yi, opts.densify), kind, p);
    rep.deltas.push_back(io.delta);
    rep.per_delta.push_back(r.value);
    rep.alignment = std::move(r.alignment);
  }
  finish_alpha(rep);
  return rep;
}

MetricReport alpha_estimate(const RoughPath2& x, const PathFunction& phi, const RoughPath2& y,
                            const PathFunction& psi, MetricKind kind, double p, const AlphaOptions& opts) {
  if (opts.delta_levels < 1) throw std::invalid_argument("alpha_estimate: need at least one delta level");
  const double horizon = std::max(x.horizon, y.horizon);
  MetricReport rep;
  auto scaled = [horizon, &opts](RoughInterpolation ri) {
    const double f = horizon / ri.horizon;
    for (double& t : ri.times) t *= f;
    ri.horizon = horizon;
    return trace_of(ri, opts.densify);
  };
  for (int l = 0; l < opts.delta_levels; ++l) {
    InterpolateOptions io;
    io.delta = std::ldexp(1.0, -l);
    io.samples_per_jump = opts.samples_per_jump;
    MetricReport r = sigma_estimate(scaled(interpolate(x, phi, io)), scaled(interpolate(y, psi, io)), kind, p);
    rep.deltas.push_back(io.delta);
    rep.per_delta.push_back(r.value);
    rep.alignment = std::move(r.alignment);
  }
  finish_alpha(rep);
  return rep;
}

std::size_t oscillation_count(const std::vector<Vec>& pts, double delta) {
  return osc_count_impl(pts.size(), delta, [&](std::size_t i, std::size_t j) { return euclid(pts[i], pts[j]); });
}

std::size_t oscillation_count(const std::vector<G2Element>& pts, double delta) {
  const LieSeq s(pts);
  const int d = s.dim();
  return osc_count_impl(pts.size(), delta,
                        [&](std::size_t i, std::size_t j) { return lie_gap_norm(s.row(i), s.row(j), d); });
}

double osc_count_bound(const std::vector<Vec>& pts, double p) {
  return osc_bound_impl(pts.size(), p, [&](std::size_t i, std::size_t j) { return euclid(pts[i], pts[j]); });
}

double osc_count_bound(const std::vector<G2Element>& pts, double p) {
  const LieSeq s(pts);
  const int d = s.dim();
  return osc_bound_impl(pts.size(), p,
                        [&](std::size_t i, std::size_t j) { return lie_gap_norm(s.row(i), s.row(j), d); });
}

double osc_count_bound(const RoughPath2& x, double p) { return osc_count_bound(trace_of(x).points, p); }

}  // namespace crp
