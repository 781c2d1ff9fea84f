#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crp/lift.hpp"
#include "crp/metrics.hpp"
#include "support.hpp"

using namespace crp;
using testsupport::max_abs;
using testsupport::randn;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

std::vector<double> grid(std::size_t n) {
  std::vector<double> ts;
  for (std::size_t k = 0; k < n; ++k) ts.push_back(static_cast<double>(k) / static_cast<double>(n - 1));
  return ts;
}

Path random_walk_path(std::mt19937_64& rng, int d, std::size_t n, bool steps) {
  std::vector<Vec> vs{Vec::Zero(d)};
  for (std::size_t k = 1; k < n; ++k) vs.push_back(vs.back() + randn(rng, d, 1.0 / std::sqrt(double(n))));
  return steps ? Path::piecewise_constant(grid(n), vs) : Path::polyline(grid(n), vs);
}

// Independent Ito-sum oracle: 1/2 sum_k (X_{k-1} - X_0) ^ dX_k over the vertex sequence.
Mat ito_area(const Path& x) {
  const auto vs = x.vertices();
  const int d = x.dim();
  Mat a = Mat::Zero(d, d);
  for (std::size_t k = 1; k < vs.size(); ++k) {
    const Vec y = vs[k - 1].second - vs[0].second;
    const Vec dy = vs[k].second - vs[k - 1].second;
    a += 0.5 * (y * dy.transpose() - dy * y.transpose());
  }
  return a;
}

double rp_gap(const RoughPath2& a, const RoughPath2& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, max_abs(a.points[i], b.points[i]));
  return g;
}

}  // namespace

TEST_CASE("piecewise-linear lift examples") {
  const RoughPath2 chord = lift_piecewise_linear(Path::polyline({0.0, 1.0}, {Vec::Zero(2), v2(1, 0)}));
  CHECK((chord.points.back().vec - v2(1, 0)).norm() == 0.0);
  CHECK(log2(chord.points.back()).area(0, 1) == 0.0);
  CHECK(chord.marcus_like);

  const RoughPath2 ell =
      lift_piecewise_linear(Path::polyline({0.0, 0.5, 1.0}, {Vec::Zero(2), v2(1, 0), v2(1, 1)}));
  CHECK(log2(ell.points.back()).area(0, 1) == doctest::Approx(0.5));

  const std::vector<Vec> tri{Vec::Zero(2), v2(1, 0), v2(0, 1), Vec::Zero(2)};
  const RoughPath2 loop = lift_piecewise_linear(Path::polyline({0.0, 1.0, 2.0, 3.0}, tri));
  CHECK(loop.points.back().vec.norm() < 1e-15);
  CHECK(log2(loop.points.back()).area(0, 1) == doctest::Approx(testsupport::shoelace(tri, 0, 1)));
  CHECK(log2(loop.points.back()).area(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("marcus lift: single jump and Ito-sum oracle") {
  const Path jump = Path::piecewise_constant({0.0, 0.5}, {Vec::Zero(2), v2(0.3, -0.7)}, 1.0);
  const RoughPath2 m = marcus_lift(jump);
  CHECK(max_abs(m.points.back(), exp2(Lie2Element::from_vec(v2(0.3, -0.7)))) < 1e-15);
  CHECK(m.is_jump(1));
  CHECK(m.marcus_like);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3;
    const Path x = trial % 2 ? random_walk_path(rng, d, 400, true) : testsupport::random_jump_path(rng, d, 100);
    const RoughPath2 r = marcus_lift(x);
    const Mat level2 = r.points.back().mat;
    CHECK((0.5 * (level2 - level2.transpose()) - ito_area(x)).norm() < 1e-12);
    CHECK((r.points.back().vec - (x.values.back() - x.values.front())).norm() < 1e-12);
    CHECK(r.scan_marcus_like());
    CHECK(rp_gap(r, lift_piecewise_linear(x)) == 0.0);
  }
}

TEST_CASE("Chen relation under recomputation") {
  std::mt19937_64 rng(22);
  const Path x = testsupport::random_jump_path(rng, 3, 60);
  const RoughPath2 r = modified_lift(x, PathFunction::hoff());
  for (std::size_t i = 0; i < r.size(); i += 7) {
    G2Element prod = G2Element::identity(3);
    for (std::size_t k = i + 1; k < r.size(); ++k) {
      prod = prod * r.continuous_increment(k) * r.jump(k);
      CHECK(max_abs(r.increment_between(i, k), prod) < 1e-12 * std::max(1.0, hom_norm(prod) * hom_norm(prod)));
    }
  }
}

TEST_CASE("modified lift adds the area map of every increment") {
  std::mt19937_64 rng(23);
  const PathFunction hoff = PathFunction::hoff();
  for (int trial = 0; trial < 20; ++trial) {
    const Path x = testsupport::random_jump_path(rng, 2, 40);
    const RoughPath2 m = modified_lift(x, hoff);
    const RoughPath2 plain = marcus_lift(x);
    // B_T = sum of 1/2 dx^1 dx^2 over the skeleton increments
    double b = 0.0;
    const auto vs = x.vertices();
    for (std::size_t k = 1; k < vs.size(); ++k) {
      const Vec dx = vs[k].second - vs[k - 1].second;
      b += 0.5 * dx(0) * dx(1);
    }
    CHECK(log2(m.points.back()).area(0, 1) - log2(plain.points.back()).area(0, 1) == doctest::Approx(b));
    CHECK((m.points.back().vec - plain.points.back().vec).norm() < 1e-12);
    if (x.jump_count() > 0) CHECK_FALSE(m.marcus_like);
  }
  const RoughPath2 cell = modified_lift(Path::polyline({0.0, 1.0}, {Vec::Zero(2), v2(1, 1)}), hoff);
  CHECK(log2(cell.points.back()).area(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("lift_with_area") {
  std::mt19937_64 rng(24);
  const Path x = random_walk_path(rng, 2, 50, false);
  std::vector<Lie2Element> extra(x.size(), Lie2Element(2));
  double total = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    extra[i].set_area(0, 1, 0.01 * static_cast<double>(i));
    total += 0.01 * static_cast<double>(i);
  }
  const RoughPath2 r = lift_with_area(x, extra);
  const double base = log2(marcus_lift(x).points.back()).area(0, 1);
  CHECK(log2(r.points.back()).area(0, 1) == doctest::Approx(base + total));
  CHECK(rp_gap(lift_with_area(x, std::vector<Lie2Element>(x.size(), Lie2Element(2))), marcus_lift(x)) < 1e-12);
}

TEST_CASE("young pairing examples") {
  const Path line1 = Path::polyline({0.0, 1.0}, {Vec::Zero(1), Vec::Ones(1)});
  const RoughPath2 x = marcus_lift(line1);
  const RoughPath2 s = young_pair(x, line1);
  const G2Element end = s.points.back();
  CHECK(end.mat(0, 1) == doctest::Approx(0.5));
  CHECK(log2(end).area(0, 1) == doctest::Approx(0.0));

  std::mt19937_64 rng(25);
  const RoughPath2 xr = marcus_lift(testsupport::random_jump_path(rng, 2, 30));
  const RoughPath2 padded = young_pair(xr, Path::constant(Vec::Zero(1), 1.0));
  for (std::size_t i = 0; i < xr.size(); ++i) {
    CHECK((padded.points[i].vec.head(2) - xr.points[i].vec).norm() < 1e-12);
    CHECK((padded.points[i].mat.topLeftCorner(2, 2) - xr.points[i].mat).norm() < 1e-12);
    CHECK(padded.points[i].mat.col(2).norm() + padded.points[i].mat.row(2).norm() < 1e-12);
  }

  const Path h = random_walk_path(rng, 2, 30, false);
  const RoughPath2 triv30 = marcus_lift(Path::polyline(grid(30), std::vector<Vec>(30, Vec::Zero(2))));
  const RoughPath2 hs = young_pair(triv30, h);
  const RoughPath2 hl = lift_piecewise_linear(h);
  for (std::size_t i = 0; i < h.size(); ++i) {
    CHECK((hs.points[i].mat.bottomRightCorner(2, 2) - hl.points[i].mat).norm() < 1e-12);
  }

  CHECK_THROWS_AS(young_pair(xr, h, YoungOptions{2.5, 2.0}), std::invalid_argument);
  const Path off = Path::polyline({0.0, 0.123456, 1.0}, {Vec::Zero(2), v2(1, 0), v2(0, 1)});
  CHECK_THROWS_AS(young_pair(xr, off), std::invalid_argument);
}

TEST_CASE("young pairing cross areas are left-point sums") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const Path xp = testsupport::random_jump_path(rng, 1, 40);
    const Path h = random_walk_path(rng, 1, 40, trial % 2 == 0);
    const RoughPath2 s = young_pair(marcus_lift(xp), h);
    // antisymmetric cross term 1/2 sum (x dh - h dx) over the merged vertex sequence
    std::vector<std::pair<Vec, Vec>> seq;
    seq.push_back({xp.values[0], h.values[0]});
    for (std::size_t i = 1; i < xp.size(); ++i) {
      seq.push_back({xp.left[i], h.left[i]});
      seq.push_back({xp.values[i], h.values[i]});
    }
    double area = 0.0;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const double x0 = seq[k - 1].first(0) - seq[0].first(0), h0 = seq[k - 1].second(0) - seq[0].second(0);
      const double dx = seq[k].first(0) - seq[k - 1].first(0), dh = seq[k].second(0) - seq[k - 1].second(0);
      area += 0.5 * (x0 * dh - h0 * dx);
    }
    CHECK(log2(s.points.back()).area(0, 1) == doctest::Approx(area).epsilon(1e-10));
  }
}

TEST_CASE("translation") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 30; ++trial) {
    const Path y = testsupport::random_jump_path(rng, 2, 40);
    const Path k = random_walk_path(rng, 2, 40, trial % 2 == 0);
    const RoughPath2 ly = marcus_lift(y);

    CHECK(rp_gap(translate(ly, Path::constant(Vec::Zero(2), 1.0)), ly) < 1e-12);
    const RoughPath2 sum = translate(ly, k);
    CHECK(rp_gap(sum, marcus_lift(y + k)) < 1e-9);
    CHECK(sum.marcus_like);

    const Path poly = random_walk_path(rng, 2, 40, false);
    const RoughPath2 cancel = translate(marcus_lift(poly), -poly);
    CHECK(rp_gap(cancel, marcus_lift(Path::polyline(grid(40), std::vector<Vec>(40, Vec::Zero(2))))) < 1e-9);
  }
  const Path h = random_walk_path(rng, 2, 20, false);
  const RoughPath2 zero = marcus_lift(Path::polyline(grid(20), std::vector<Vec>(20, Vec::Zero(2))));
  CHECK(rp_gap(translate(zero, h), lift_piecewise_linear(h)) < 1e-12);
}

TEST_CASE("joint lift is controlled by its parts") {
  // the implied constant is only monitored: the ratio must stay finite and moderate
  std::mt19937_64 rng(28);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Path x = testsupport::random_jump_path(rng, 1, 25);
    const Path h = random_walk_path(rng, 1, 25, false);
    const RoughPath2 lx = marcus_lift(x);
    const RoughPath2 s = young_pair(lx, h);
    const double ratio = pvar(s, 2.5) / (pvar(lx, 2.5) + pvar(h, 1.0));
    CHECK(std::isfinite(ratio));
    worst = std::max(worst, ratio);
  }
  MESSAGE("max ratio |S(x,h)| / (|x| + |h|) = " << worst);
  CHECK(worst < 10.0);
}

TEST_CASE("rough interpolation") {
  const Path x = Path::piecewise_constant({0.0, 0.5}, {Vec::Zero(2), v2(1, 1)}, 1.0);
  const RoughPath2 m = modified_lift(x, PathFunction::hoff());
  const RoughInterpolation ri = interpolate(m, PathFunction::hoff());
  CHECK(log2(ri.points.back()).area(0, 1) == doctest::Approx(0.5));
  CHECK(ri.horizon == doctest::Approx(1.5));
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(max_abs(ri.points[ri.index[i]], m.points[i]) < 1e-12);
  // a Marcus jump is not in the Hoff group domain
  try {
    interpolate(marcus_lift(x), PathFunction::hoff());
    FAIL("expected domain_error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("t=0.5") != std::string::npos);
  }
  const RoughInterpolation ll = interpolate(marcus_lift(x), PathFunction::log_linear());
  CHECK(log2(ll.points.back()).area(0, 1) == doctest::Approx(0.0));
}
