#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crp/harness.hpp"
#include "crp/io.hpp"
#include "crp/lift.hpp"
#include "support.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crp;
using testsupport::randn;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("crp_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("path csv round trip keeps jumps as two rows") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Path x = testsupport::random_jump_path(rng, 3, 25);
    std::size_t jumps = 0;
    for (std::size_t i = 0; i < x.size(); ++i) jumps += x.is_jump(i);
    std::stringstream ss;
    write_path_csv(ss, x);
    CHECK(count_lines(ss.str()) == 1 + x.size() + jumps);
    const Path y = read_path_csv(ss);
    REQUIRE(y.size() == x.size());
    CHECK(y.horizon == doctest::Approx(x.horizon));
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(y.times[i] == x.times[i]);
      CHECK((y.values[i] - x.values[i]).norm() == 0.0);
      CHECK((y.left[i] - x.left[i]).norm() == 0.0);
    }
  }
}

TEST_CASE("path csv rejects malformed input") {
  std::stringstream empty("t,v1,jump\n");
  CHECK_THROWS_AS(read_path_csv(empty), std::invalid_argument);
  std::stringstream header("x,v1,jump\n0,1,0\n");
  CHECK_THROWS_AS(read_path_csv(header), std::invalid_argument);
  std::stringstream width("t,v1,jump\n0,1\n");
  CHECK_THROWS_AS(read_path_csv(width), std::invalid_argument);
  std::stringstream junk("t,v1,jump\n0,abc,0\n");
  CHECK_THROWS_AS(read_path_csv(junk), std::invalid_argument);
}

TEST_CASE("path csv file round trip") {
  const auto dir = scratch("pathfile");
  std::filesystem::create_directories(dir);
  const Path x = Path::piecewise_constant({0.0, 0.5, 1.0}, {Vec::Zero(2), Vec::Ones(2), Vec::Ones(2)}, 1.0);
  const std::string f = (dir / "x.csv").string();
  write_path_csv_file(f, x);
  const Path y = read_path_csv_file(f);
  CHECK(y.size() == x.size());
  CHECK((y.value_at(0.75) - Vec::Ones(2)).norm() == 0.0);
  CHECK_THROWS(read_path_csv_file((dir / "missing.csv").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("rough csv round trip") {
  std::mt19937_64 rng(12);
  const Path x = testsupport::random_jump_path(rng, 2, 30);
  const RoughPath2 r = marcus_lift(x);
  std::stringstream ss;
  write_rough_csv(ss, r);
  const RoughPath2 back = read_rough_csv(ss);
  REQUIRE(back.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(back.times[i] == r.times[i]);
    CHECK(testsupport::max_abs(back.points[i], r.points[i]) == 0.0);
    CHECK(testsupport::max_abs(back.left[i], r.left[i]) == 0.0);
  }
  const json meta = rough_metadata(r);
  CHECK(meta.at("marcus_like").get<bool>());
}

TEST_CASE("rough csv rejects non-geometric rows") {
  std::stringstream ss("t,v1,v2,m11,m12,m21,m22,jump\n0,0,0,0,0,0,0,0\n1,1,0,5,0,0,0,0\n");
  CHECK_THROWS_AS(read_rough_csv(ss), std::invalid_argument);
}

TEST_CASE("model json round trip") {
  json j{{"kind", "levy"},       {"d", 2},          {"drift", {0.1, -0.2}},
         {"diffusion", {{1.0, 0.3}, {0.3, 2.0}}}, {"intensity", 2.5}, {"jump_mean", {0.5, 0.0}},
         {"jump_cov", {{0.2, 0.0}, {0.0, 0.1}}},  {"compensated", true}, {"T", 2.0}};
  const SemimartingaleModel m = model_from_json(j);
  CHECK(m.d == 2);
  CHECK(m.T == 2.0);
  CHECK(m.intensity == 2.5);
  CHECK(m.compensated);
  CHECK(m.diffusion(0, 1) == 0.3);
  const SemimartingaleModel m2 = model_from_json(model_to_json(m));
  CHECK(model_to_json(m2) == model_to_json(m));

  for (const char* kind : {"brownian", "random_walk", "null_array", "martingale_clt"}) {
    const SemimartingaleModel a = model_from_json({{"kind", kind}, {"d", 2}});
    CHECK(model_to_json(model_from_json(model_to_json(a))) == model_to_json(a));
  }
  CHECK_THROWS_AS(model_from_json({{"kind", "fractional"}}), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json({{"kind", "random_walk"}, {"step_law", "cauchy"}}), std::invalid_argument);
}

TEST_CASE("fields from json") {
  const json lin{{"builtin", "linear"}, {"matrices", {{{0.0, 1.0}, {0.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.0}}}}};
  const VectorFields v = fields_from_json(lin);
  CHECK(v.state_dim() == 2);
  CHECK(v.driver_dim() == 2);
  Vec y(2);
  y << 2.0, 3.0;
  const Mat f = v.eval(y);
  CHECK(f(0, 0) == 3.0);
  CHECK(f(1, 0) == 0.0);
  CHECK(f(0, 1) == 0.0);
  CHECK(f(1, 1) == 2.0);

  const VectorFields z = fields_from_json({{"builtin", "zero"}, {"e", 3}, {"d", 2}});
  CHECK(z.state_dim() == 3);
  CHECK(z.eval(Vec::Ones(3)).norm() == 0.0);

  const json quad{{"builtin", "quadratic"},
                  {"b", {{1.0, 0.0}}},
                  {"A", {{{0.0, 0.0}, {0.0, 0.0}}}},
                  {"Q", {{{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}}}}};
  const VectorFields q = fields_from_json(quad);
  CHECK(q.driver_dim() == 1);
  CHECK_THROWS_AS(fields_from_json({{"builtin", "cubic"}}), std::invalid_argument);

  CHECK(fields_from_arg("builtin:rotation", 3).state_dim() == 3);
  CHECK(fields_from_arg("builtin:linear", 2).driver_dim() == 2);
  CHECK(fields_from_arg("builtin:quadratic", 3).driver_dim() == 3);
  CHECK_THROWS(fields_from_arg("/nonexistent/fields.json", 2));
  CHECK_THROWS_AS(fields_from_arg("builtin:nope", 2), std::invalid_argument);

  const auto dir = scratch("fields");
  std::filesystem::create_directories(dir);
  const std::string file = (dir / "file.json").string();
  std::ofstream(file) << lin.dump();
  CHECK((fields_from_arg(file, 2).eval(y) - v.eval(y)).norm() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("path function names") {
  CHECK(phi_from_name("linear").kind() == PathFunction::Kind::Linear);
  CHECK(phi_from_name("loglinear").kind() == PathFunction::Kind::LogLinear);
  CHECK(phi_from_name("hoff").kind() == PathFunction::Kind::Hoff);
  CHECK(phi_from_name("hoff21").kind() == PathFunction::Kind::Hoff);
  CHECK_THROWS_AS(phi_from_name("spline"), std::invalid_argument);
}

TEST_CASE("vector parsing") {
  const Vec v = parse_vec("1,2.5,-3");
  REQUIRE(v.size() == 3);
  CHECK(v(1) == 2.5);
  CHECK(vec_from_json(to_json(v)) == v);
  Mat m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK(mat_from_json(to_json(m)) == m);
  CHECK_THROWS_AS(mat_from_json(json::parse("[[1,2],[3]]")), std::invalid_argument);
  CHECK_THROWS_AS(vec_from_json(json(3.0)), std::invalid_argument);
}

TEST_CASE("config hash") {
  const json a{{"name", "x"}, {"seed", 1}};
  const json b{{"seed", 1}, {"name", "x"}};
  const json c{{"name", "x"}, {"seed", 2}};
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(b) == h);
  CHECK(config_hash(c) != h);
  // FNV-1a of the empty object "{}"
  std::uint64_t x = 0xcbf29ce484222325ULL;
  for (unsigned char ch : std::string("{}")) {
    x ^= ch;
    x *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  CHECK(config_hash(json::object()) == std::string(buf));
}

TEST_CASE("experiment spec overlay and validation") {
  for (const auto& name : experiment_names()) {
    const ExperimentSpec d = ExperimentSpec::defaults(name);
    CHECK_NOTHROW(d.validate());
    const ExperimentSpec again = ExperimentSpec::from_json(d.to_json());
    CHECK(again.to_json() == d.to_json());
  }
  const ExperimentSpec s =
      ExperimentSpec::from_json({{"name", "wong_zakai"}, {"samples", 7}, {"seed", 99}, {"params", {{"substeps", 2}}}});
  CHECK(s.samples == 7);
  CHECK(s.seed == 99);
  CHECK(s.params.at("substeps") == 2);
  CHECK(s.params.at("phi") == "linear");
  CHECK(s.meshes == ExperimentSpec::defaults("wong_zakai").meshes);

  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "wong_zakai"}, {"version", 2}}), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "nonsense"}}), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "wong_zakai"}, {"meshes", {64, 32}}}), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "wong_zakai"}, {"meshes", {3}}}), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "wong_zakai"}, {"samples", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentSpec::from_json({{"name", "wong_zakai"}, {"p", 0.5}}), std::invalid_argument);
}

TEST_CASE("summarize") {
  const SampleStats s = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(s.median == 2.5);
  CHECK(s.mean == 2.5);
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
  const SampleStats odd = summarize({5.0, 1.0, 2.0});
  CHECK(odd.median == 2.0);
  CHECK(summarize({}).mean == 0.0);
  CHECK(summarize({3.0}).se == 0.0);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (unsigned threads : {1u, 2u, 7u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  std::atomic<int> calls{0};
  parallel_for(0, 4, [&](std::size_t) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("area partial sums") {
  // one skeleton step per partition cell: every left-point sum is empty
  const Vec z = Vec::Zero(2);
  Vec e(2);
  e << 1.0, 2.0;
  std::vector<double> grid;
  std::vector<Vec> vals;
  for (int k = 0; k <= 8; ++k) {
    grid.push_back(k / 8.0);
    vals.push_back(e * (k / 8.0));
  }
  const Path line = Path::polyline(grid, vals, 1.0);
  CHECK(area_partial_sum_max(line, grid, [](const Vec&) { return 1.0; }) == 0.0);

  // two cells of four steps each against a direct left-point sum
  std::mt19937_64 rng(13);
  const Path x = testsupport::random_jump_path(rng, 2, 9);
  const std::vector<double> part{0.0, 0.5, 1.0};
  auto y = [](const Vec& v) { return 1.0 + v(0); };
  Mat total = Mat::Zero(2, 2);
  double best = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t a = 4 * c;
    Mat ito = Mat::Zero(2, 2);
    std::vector<Vec> pts{x.values[a]};
    for (std::size_t k = a + 1; k <= a + 4; ++k) {
      pts.push_back(x.left[k]);
      pts.push_back(x.values[k]);
    }
    for (std::size_t i = 1; i < pts.size(); ++i) ito += (pts[i - 1] - pts[0]) * (pts[i] - pts[i - 1]).transpose();
    total += y(x.values[a]) * ito;
    best = std::max(best, total.norm());
  }
  CHECK(area_partial_sum_max(x, part, y) == doctest::Approx(best).epsilon(1e-12));
  CHECK_THROWS_AS(area_partial_sum_max(x, {0.0, 0.3, 1.0}, y), std::invalid_argument);
}

TEST_CASE("experiments are reproducible and independent of thread count") {
  json cfg{{"name", "marcus_consistency"}, {"samples", 4}, {"fine_cells", 64},
           {"params", {{"pc_drivers", 2}, {"pc_points", 6}}}};
  ExperimentSpec a = ExperimentSpec::from_json(cfg);
  ExperimentSpec b = a;
  b.threads = 3;
  const Report ra = run_experiment(a), rb = run_experiment(b);
  CHECK(ra.csv_rows == rb.csv_rows);
  CHECK(ra.config_hash == rb.config_hash);
  CHECK(ra.all_pass());
  REQUIRE(ra.rule("marcus_vs_canonical_sup_gap") != nullptr);
  CHECK(ra.rule("no_such_rule") == nullptr);

  ExperimentSpec c = a;
  c.seed = 2;
  const Report rc = run_experiment(c);
  CHECK(rc.csv_rows != ra.csv_rows);
  CHECK(rc.config_hash != ra.config_hash);
}

TEST_CASE("small wong_zakai and area runs produce their rules") {
  json wz{{"name", "wong_zakai"}, {"samples", 6}, {"fine_cells", 64}, {"meshes", {4, 8, 16}},
          {"params", {{"substeps", 2}}}};
  const Report r = run_experiment(ExperimentSpec::from_json(wz));
  CHECK(r.rule("median_error_strictly_decreasing") != nullptr);
  CHECK(r.rule("final_median_within_floor_factor") != nullptr);
  CHECK(r.csv_rows.size() == 6);
  CHECK(r.csv_header.size() == 1 + 3 + 1);

  json hz{{"name", "wong_zakai_hoff"}, {"samples", 5}, {"fine_cells", 32}, {"meshes", {4, 8}}};
  const Report h = run_experiment(ExperimentSpec::from_json(hz));
  CHECK(h.rule("gap_to_corrected_within_3se") != nullptr);
  CHECK(h.csv_header.size() == 1 + 2 * 4);

  json av{{"name", "area_vanish"}, {"samples", 5}, {"fine_cells", 64}, {"meshes", {4, 8, 16}}};
  const Report a = run_experiment(ExperimentSpec::from_json(av));
  CHECK(a.rules.size() == 2);
  CHECK(a.csv_rows.size() == 10);
}

TEST_CASE("report json and files") {
  json cfg{{"name", "bdg_ratio"}, {"samples", 10}, {"fine_cells", 16},
           {"params", {{"time_scales", {1.0}}, {"vol_scales", {1.0}}}}};
  const Report r = run_experiment(ExperimentSpec::from_json(cfg));
  const json j = r.to_json();
  CHECK(j.at("name") == "bdg_ratio");
  CHECK(j.at("config_hash") == r.config_hash);
  CHECK(j.at("all_pass").get<bool>() == r.all_pass());
  CHECK(j.at("rules").size() == r.rules.size());
  CHECK(r.rule("zero_process_both_sides_zero")->pass);

  const auto dir = scratch("report");
  r.write((dir / "nested").string());
  std::ifstream in(dir / "nested" / "report.json");
  REQUIRE(in);
  CHECK(json::parse(in) == j);
  std::ifstream csv(dir / "nested" / "samples.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "model,T,vol,sample,pvar,bracket_sqrt");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == r.csv_rows.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty report does not pass") {
  Report r;
  CHECK_FALSE(r.all_pass());
}
