#include "crp/path_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crp {

G2Element polyline_signature(const std::vector<Vec>& points) {
  if (points.empty()) throw std::invalid_argument("polyline_signature: no points");
  const int d = static_cast<int>(points.front().size());
  G2Element sig = G2Element::identity(d);
  for (std::size_t k = 1; k < points.size(); ++k) {
    sig = sig * exp2(Lie2Element::from_vec(points[k] - points[k - 1]));
  }
  return sig;
}

PathFunction PathFunction::linear() { return PathFunction(Kind::Linear, "linear", 1.0, 8); }

PathFunction PathFunction::log_linear() {
  return PathFunction(Kind::LogLinear, "loglinear", 1.0, 8);
}

PathFunction PathFunction::hoff(std::vector<int> axis_order) {
  std::string name = "hoff";
  if (!axis_order.empty()) {
    std::vector<int> sorted = axis_order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i)) {
        throw std::invalid_argument("PathFunction::hoff: axis order must be a permutation");
      }
    }
    for (int a : axis_order) name += "_" + std::to_string(a + 1);
  }
  PathFunction f(Kind::Hoff, name, 1.0, 8);
  f.order_ = std::move(axis_order);
  return f;
}

PathFunction PathFunction::custom(std::string name, Sampler sampler, double q, double eta,
                                  int samples, Domain domain) {
  if (!sampler) throw std::invalid_argument("PathFunction::custom: empty sampler");
  if (samples < 2) throw std::invalid_argument("PathFunction::custom: need >= 2 samples");
  PathFunction f(Kind::Custom, std::move(name), q, samples);
  f.eta_custom_ = eta;
  f.sampler_ = std::move(sampler);
  f.domain_ = std::move(domain);
  return f;
}

double PathFunction::eta(int d) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::LogLinear:
      return 1.0;
    case Kind::Hoff:
      return std::sqrt(static_cast<double>(d));
    case Kind::Custom:
      return eta_custom_;
  }
  return 1.0;
}

std::vector<int> PathFunction::resolved_order(int d) const {
  if (order_.empty()) {
    std::vector<int> o(static_cast<std::size_t>(d));
    std::iota(o.begin(), o.end(), 0);
    return o;
  }
  if (static_cast<int>(order_.size()) != d) {
    throw std::invalid_argument("PathFunction: Hoff axis order does not match dimension");
  }
  return order_;
}

bool PathFunction::in_domain(const Vec& before, const Vec& after) const {
  if (kind_ == Kind::Custom && domain_) return domain_(before, after);
  return true;
}

std::vector<std::pair<double, Vec>> PathFunction::vertices(const Vec& x) const {
  const int d = static_cast<int>(x.size());
  std::vector<std::pair<double, Vec>> out;
  switch (kind_) {
    case Kind::Linear:
    case Kind::LogLinear:
      out.emplace_back(0.0, Vec::Zero(d));
      out.emplace_back(1.0, x);
      break;
    case Kind::Hoff: {
      const auto order = resolved_order(d);
      Vec p = Vec::Zero(d);
      out.emplace_back(0.0, p);
      for (int k = 0; k < d; ++k) {
        p(order[static_cast<std::size_t>(k)]) = x(order[static_cast<std::size_t>(k)]);
        out.emplace_back(static_cast<double>(k + 1) / d, p);
      }
      break;
    }
    case Kind::Custom:
      for (int k = 0; k <= samples_; ++k) {
        const double s = static_cast<double>(k) / samples_;
        out.emplace_back(s, sampler_(x, s));
      }
      out.front().second = Vec::Zero(d);
      out.back().second = x;
      break;
  }
  return out;
}

Vec PathFunction::sample(const Vec& before, const Vec& after, double s) const {
  detail::check_same_dim(static_cast<int>(before.size()), static_cast<int>(after.size()),
                         "PathFunction::sample");
  if (s <= 0.0) return before;
  if (s >= 1.0) return after;
  const Vec x = after - before;
  if (kind_ == Kind::Custom) return before + sampler_(x, s);
  const auto vs = vertices(x);
  for (std::size_t k = 1; k < vs.size(); ++k) {
    if (s <= vs[k].first) {
      const double w = (s - vs[k - 1].first) / (vs[k].first - vs[k - 1].first);
      return before + vs[k - 1].second + w * (vs[k].second - vs[k - 1].second);
    }
  }
  return after;
}

Lie2Element PathFunction::area_map(const Vec& x) const {
  const int d = static_cast<int>(x.size());
  switch (kind_) {
    case Kind::Linear:
    case Kind::LogLinear:
      return Lie2Element(d);
    case Kind::Hoff: {
      // a^{ij} = x^i x^j / 2 when axis i is traversed before axis j
      const auto order = resolved_order(d);
      std::vector<int> rank(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
      Lie2Element a(d);
      for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
          const double v = 0.5 * x(i) * x(j);
          a.set_area(i, j, rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(j)] ? v : -v);
        }
      }
      return a;
    }
    case Kind::Custom: {
      std::vector<Vec> pts;
      for (auto& [s, p] : vertices(x)) pts.push_back(p);
      const Lie2Element l = log2(polyline_signature(pts));
      Lie2Element a = l;
      a.vec().setZero();
      return a;
    }
  }
  return Lie2Element(d);
}

G2Element PathFunction::jump_element(const Vec& x) const {
  Lie2Element l = area_map(x);
  l.vec() = x;
  return exp2(l);
}

bool PathFunction::in_group_domain(const G2Element& g, const G2Element& h, double tol) const {
  if (kind_ == Kind::LogLinear) return true;
  const G2Element inc = increment(g, h);
  if (!in_domain(g.vec, h.vec)) return false;
  const Lie2Element got = log2(inc);
  const Lie2Element want = area_map(inc.vec);
  double diff = 0.0;
  for (std::size_t k = 0; k < got.area_upper().size(); ++k) {
    diff = std::max(diff, std::abs(got.area_upper()[k] - want.area_upper()[k]));
  }
  const double scale = std::max(1.0, inc.vec.squaredNorm());
  return diff <= tol * scale;
}

G2Element PathFunction::sample_group(const G2Element& g, const G2Element& h, double s) const {
  if (s <= 0.0) return g;
  if (s >= 1.0) return h;
  const G2Element inc = increment(g, h);
  if (kind_ == Kind::LogLinear) return g * exp2(log2(inc) * s);
  const auto vs = vertices(inc.vec);
  std::vector<Vec> pts{vs.front().second};
  for (std::size_t k = 1; k < vs.size(); ++k) {
    if (s >= vs[k].first) {
      pts.push_back(vs[k].second);
      continue;
    }
    const double w = (s - vs[k - 1].first) / (vs[k].first - vs[k - 1].first);
    pts.push_back(vs[k - 1].second + w * (vs[k].second - vs[k - 1].second));
    break;
  }
  return g * polyline_signature(pts);
}

}  // namespace crp
