// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include "crp/harness.hpp"
#include "crp/lift.hpp"
#include "crp/metrics.hpp"
#include "crp/rde.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace crp;
using testsupport::max_abs;
using testsupport::randn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double lie_gap(const Lie2Element& a, const Lie2Element& b) {
  double g = (a.vec() - b.vec()).cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < a.area_upper().size(); ++k) g = std::max(g, std::abs(a.area_upper()[k] - b.area_upper()[k]));
  return g;
}

Lie2Element random_lie(std::mt19937_64& rng, int d) {
  Lie2Element l = Lie2Element::from_vec(randn(rng, d));
  for (double& a : l.area_upper()) a = randn(rng, 1)(0);
  return l;
}

std::vector<double> grid(std::size_t n) {
  std::vector<double> ts;
  for (std::size_t k = 0; k < n; ++k) ts.push_back(static_cast<double>(k) / static_cast<double>(n - 1));
  return ts;
}

std::vector<Vec> walk(std::mt19937_64& rng, int d, std::size_t n, double s) {
  std::vector<Vec> vs{Vec::Zero(d)};
  for (std::size_t k = 1; k < n; ++k) vs.push_back(vs.back() + randn(rng, d, s));
  return vs;
}

double rp_gap(const RoughPath2& a, const RoughPath2& b) {
  if (a.size() != b.size()) return INFINITY;
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    g = std::max({g, max_abs(a.points[i], b.points[i]), max_abs(a.left[i], b.left[i])});
  }
  return g;
}

Outcome rules_of(const Report& r) {
  Outcome o{r.all_pass(), ""};
  for (const Rule& rule : r.rules) o.detail += (rule.pass ? "" : "FAILED ") + rule.name + ": " + rule.detail + "; ";
  o.detail += "runtime " + num(r.runtime_seconds) + " s";
  return o;
}

// 1 -------------------------------------------------------------------------
Outcome algebra_suite() {
  std::mt19937_64 rng(101);
  double chen = 0.0, roundtrip = 0.0, cbh_gap = 0.0, left = 0.0, homog = 0.0;
  const int cases = 1000;
  for (int c = 0; c < cases; ++c) {
    const int d = 2 + c % 3;
    // Chen: the group product of segment exponentials equals the iterated integrals of the polyline
    const std::vector<Vec> pts = walk(rng, d, 6, 1.0);
    G2Element prod = G2Element::identity(d);
    Mat it = Mat::Zero(d, d);
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const Vec dx = pts[k] - pts[k - 1];
      prod = prod * exp2(Lie2Element::from_vec(dx));
      it += (pts[k - 1] - pts[0]) * dx.transpose() + 0.5 * dx * dx.transpose();
    }
    chen = std::max({chen, (prod.vec - (pts.back() - pts[0])).cwiseAbs().maxCoeff(), (prod.mat - it).cwiseAbs().maxCoeff()});
    const Path poly = Path::polyline(grid(pts.size()), pts);
    const RoughPath2 lift = lift_piecewise_linear(poly);
    chen = std::max(chen, max_abs(lift.increment_between(0, 2) * lift.increment_between(2, 5), lift.increment_between(0, 5)));

    const Lie2Element a = random_lie(rng, d), b = random_lie(rng, d);
    const G2Element g = exp2(a), h = exp2(b), k = exp2(random_lie(rng, d));
    roundtrip = std::max({roundtrip, lie_gap(log2(g), a), max_abs(exp2(log2(h)), h)});
    cbh_gap = std::max(cbh_gap, lie_gap(cbh(a, b), log2(g * h)));
    const double dhk = hom_dist(h, k);
    left = std::max(left, std::abs(hom_dist(g * h, g * k) - dhk) / std::max(1.0, dhk));
    const double lambda = 0.1 + 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    homog = std::max(homog, std::abs(hom_dist(dilate(h, lambda), dilate(k, lambda)) - lambda * dhk) / std::max(1.0, lambda * dhk));
  }
  const double worst = std::max({chen, roundtrip, cbh_gap, left, homog});
  return {worst <= 1e-10, std::to_string(cases) + " cases; chen " + num(chen) + ", exp/log " + num(roundtrip) + ", cbh " +
                              num(cbh_gap) + ", left-invariance " + num(left) + ", homogeneity " + num(homog)};
}

// 2 -------------------------------------------------------------------------
Outcome pvar_oracle() {
  std::mt19937_64 rng(102);
  double worst = 0.0;
  bool osc_ok = true;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + c % 11;
    const double p = 1.0 + 0.25 * (c % 9);
    if (c % 2 == 0) {
      const std::vector<Vec> v = walk(rng, 1 + c % 3, n, 1.0);
      const double dp = pvar(v, p);
      const double bf = testsupport::brute_pvar(n, p, [&](std::size_t i, std::size_t j) { return (v[j] - v[i]).norm(); });
      worst = std::max(worst, std::abs(dp - bf));
      osc_ok = osc_ok && osc_count_bound(v, p) >= dp * (1 - 1e-12);
    } else {
      std::vector<G2Element> g{G2Element::identity(2)};
      for (std::size_t k = 1; k < n; ++k) g.push_back(g.back() * testsupport::random_group(rng, 2));
      const double dp = pvar(g, p);
      const double bf = testsupport::brute_pvar(n, p, [&](std::size_t i, std::size_t j) { return hom_dist(g[i], g[j]); });
      worst = std::max(worst, std::abs(dp - bf));
      osc_ok = osc_ok && osc_count_bound(g, p) >= dp * (1 - 1e-12);
    }
  }
  return {worst <= 1e-12 && osc_ok, "200 cases, max |DP - exhaustive| " + num(worst) + ", osc bound >= pvar " + (osc_ok ? "yes" : "no")};
}

// 3 -------------------------------------------------------------------------
Outcome interpolation_bounds() {
  std::mt19937_64 rng(103);
  int bad_lower = 0, bad_upper = 0, total = 0;
  for (double p : {1.0, 2.5}) {
    const double r = 1.0 + std::pow(2.0, p) + std::pow(3.0, p - 1.0);
    for (int c = 0; c < 200; ++c) {
      const PathFunction phi = c % 2 ? PathFunction::hoff() : PathFunction::linear();
      const Path x = testsupport::random_jump_path(rng, 2, 8, 0.4);
      const double xp = std::pow(pvar(x, p), p);
      double jumps = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (!x.is_jump(i)) continue;
        std::vector<Vec> curve;
        for (auto& [s, v] : phi.vertices(x.jump(i))) curve.push_back(v);
        jumps += std::pow(pvar(curve, p), p);
      }
      const double ip = std::pow(pvar(interpolate(x, phi).path, p), p);
      bad_lower += std::max(xp, jumps) > ip * (1 + 1e-12);
      bad_upper += ip > r * xp + (r + std::pow(3.0, p - 1.0)) * jumps + 1e-12;
      ++total;
    }
  }
  return {bad_lower == 0 && bad_upper == 0, std::to_string(total) + " pairs; lower-bound violations " +
                                                std::to_string(bad_lower) + ", upper-bound violations " + std::to_string(bad_upper)};
}

// 4 -------------------------------------------------------------------------
Outcome hoff_area() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double x = -2.0 + 4.0 * i / 9.0, y = -1.5 + 3.7 * j / 9.0;
      const Vec inc = (Vec(2) << x, y).finished();
      const RoughPath2 cell = modified_lift(Path::polyline({0.0, 1.0}, {Vec::Zero(2), inc}), PathFunction::hoff());
      const RoughPath2 jump =
          modified_lift(Path::piecewise_constant({0.0, 0.5, 1.0}, {Vec::Zero(2), inc, inc}), PathFunction::hoff());
      worst = std::max({worst, std::abs(log2(cell.points.back()).area(0, 1) - 0.5 * x * y),
                        std::abs(log2(jump.points.back()).area(0, 1) - 0.5 * x * y)});
    }
  }
  return {worst <= 1e-12, "10x10 grid, max |area - xy/2| " + num(worst)};
}

// 5 -------------------------------------------------------------------------
Outcome marcus_consistency() {
  const Report r = run_experiment(ExperimentSpec::defaults("marcus_consistency"));
  const Rule* gap = r.rule("marcus_vs_canonical_sup_gap");
  const bool ok = gap && gap->pass && r.runtime_seconds < 60.0;
  return {ok, "50 samples, n=512: sup gap " + (gap ? gap->detail : "missing") + ", runtime " + num(r.runtime_seconds) + " s"};
}

// 6 -------------------------------------------------------------------------
Outcome piecewise_constant() {
  std::mt19937_64 rng(106);
  std::vector<Mat> ms(2, Mat::Zero(2, 2));
  ms[0] << 0.0, 1.0, -0.5, 0.2;
  ms[1] << 0.3, 0.0, 1.0, -0.1;
  const VectorFields v = VectorFields::linear(ms);
  const Vec y0 = (Vec(2) << 1.0, -0.5).finished();
  SolveOptions opts;
  opts.substeps = 16;
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const std::size_t n = 5 + c % 12;
    const std::vector<Vec> vs = walk(rng, 2, n, 0.6);
    const Path x = Path::piecewise_constant(grid(n), vs);
    const Vec y = solve_canonical_rde(marcus_lift(x), PathFunction::log_linear(), v, y0, opts).final_state();
    // the ODE along the connecting polyline of linear fields is a product of matrix exponentials
    Vec z = y0;
    for (std::size_t k = 1; k < n; ++k) {
      const Vec dx = vs[k] - vs[k - 1];
      z = testsupport::expm(ms[0] * dx(0) + ms[1] * dx(1)) * z;
    }
    worst = std::max(worst, (y - z).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8, "20 drivers, max endpoint gap " + num(worst)};
}

// 7-10, 12 -------------------------------------------------------------------
Outcome wong_zakai_linear() {
  const Report r = run_experiment(ExperimentSpec::defaults("wong_zakai"));
  Outcome o = rules_of(r);
  o.pass = o.pass && r.runtime_seconds < 600.0;
  return o;
}

Outcome wong_zakai_hoff() { return rules_of(run_experiment(ExperimentSpec::defaults("wong_zakai_hoff"))); }

Outcome bdg() {
  const Report r = run_experiment(ExperimentSpec::defaults("bdg_ratio"));
  Outcome o = rules_of(r);
  const Rule* h = r.rule("ratio_invariant_under_doubling");
  const Rule* b = r.rule("ratio_band");
  o.pass = h && b && h->pass && b->pass;
  return o;
}

Outcome area_vanish() { return rules_of(run_experiment(ExperimentSpec::defaults("area_vanish"))); }

// 11 ------------------------------------------------------------------------
Outcome translation() {
  std::mt19937_64 rng(111);
  double sum_gap = 0.0, cancel_gap = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 10 + c % 31;
    const Path y = Path::polyline(grid(n), walk(rng, 2, n, 0.5));
    const Path k = Path::piecewise_constant(grid(n), walk(rng, 2, n, 0.5));
    sum_gap = std::max(sum_gap, rp_gap(translate(marcus_lift(y), k), marcus_lift(y + k)));

    const Path x = c % 2 ? y : k;
    const RoughPath2 trivial = marcus_lift(Path::polyline(grid(n), std::vector<Vec>(n, Vec::Zero(2))));
    cancel_gap = std::max(cancel_gap, rp_gap(translate(marcus_lift(x), -x), trivial));
  }
  return {sum_gap <= 1e-9 && cancel_gap <= 1e-9,
          "100 pairs; T_K lift(Y) vs lift(Y+K) " + num(sum_gap) + ", T_{-X} lift(X) vs trivial " + num(cancel_gap)};
}

// 12 ------------------------------------------------------------------------
// Minimal max-cost over monotone alignments, by plain recursion with memo.
double bottleneck_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> memo(n * m, -1.0);
  std::function<double(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) {
    double& slot = memo[i * m + j];
    if (slot >= 0.0) return slot;
    const double here = std::abs(a[i] - b[j]);
    double rest = INFINITY;
    if (i + 1 == n && j + 1 == m) rest = 0.0;
    if (i + 1 < n) rest = std::min(rest, go(i + 1, j));
    if (j + 1 < m) rest = std::min(rest, go(i, j + 1));
    if (i + 1 < n && j + 1 < m) rest = std::min(rest, go(i + 1, j + 1));
    return slot = std::max(here, rest);
  };
  return go(0, 0);
}

Outcome metric_demo() {
  const Report r = run_experiment(ExperimentSpec::defaults("metric_demo"));
  Outcome o = rules_of(r);
  const Rule* a = r.rule("alpha_inf_decreasing");
  const Rule* s = r.rule("sigma_inf_bounded_below");
  o.pass = a && s && a->pass && s->pass;

  // explicit alignment at n = 1000: ramp of width 1/n against the unit jump, first coordinate
  const double w = 1e-3;
  const int densify = 128;
  Vec e1 = Vec::Zero(2);
  e1(0) = 1.0;
  const Path ramp = Path::polyline({0.0, 0.5, 0.5 + w, 1.0}, {Vec::Zero(2), Vec::Zero(2), e1, e1}, 1.0);
  const Path jump = Path::piecewise_constant({0.0, 0.5, 1.0}, {Vec::Zero(2), e1, e1}, 1.0);
  std::vector<double> ra, ja;
  for (int k = 0; k <= densify; ++k) ra.push_back(static_cast<double>(k) / densify);
  ja = {0.0, 0.0, 1.0, 1.0};
  const double oracle = bottleneck_oracle(ra, ja);
  const double lib = sigma_estimate(trace_of(ramp, densify), trace_of(jump), MetricKind::Infinity).value;
  const bool ok = oracle >= 0.4 && std::abs(lib - oracle) <= 1e-12;
  o.pass = o.pass && ok;
  o.detail += "; alignment oracle at n=1000 " + num(oracle) + " vs estimator " + num(lib);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"algebra suite", algebra_suite},
      {"p-variation oracle equivalence", pvar_oracle},
      {"interpolation p-variation inequalities", interpolation_bounds},
      {"Hoff area", hoff_area},
      {"Marcus consistency", marcus_consistency},
      {"piecewise-constant driver equivalence", piecewise_constant},
      {"Wong-Zakai linear interpolation", wong_zakai_linear},
      {"Wong-Zakai Hoff interpolation", wong_zakai_hoff},
      {"BDG homogeneity and band", bdg},
      {"area vanishing", area_vanish},
      {"translation identities", translation},
      {"metric demo", metric_demo},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (i == 0 && secs >= 5.0) {
      o.pass = false;
      o.detail += "; took " + num(secs) + " s";
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
