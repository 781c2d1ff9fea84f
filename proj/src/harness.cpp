#include "crp/harness.hpp"

#include "crp/lift.hpp"
#include "crp/metrics.hpp"
#include "crp/rde.hpp"
#include "crp/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace crp {

namespace {

json eye(int d, double s) { return to_json(Mat(Mat::Identity(d, d) * s)); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

Report start(const ExperimentSpec& spec) {
  spec.validate();
  Report r;
  r.name = spec.name;
  r.config = spec.to_json();
  r.config_hash = config_hash(r.config);
  return r;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SemimartingaleModel scaled(SemimartingaleModel m, double vol, double T) {
  m.drift *= vol;
  m.diffusion *= vol * vol;
  m.jump_mean *= vol;
  m.jump_cov *= vol * vol;
  m.T = T;
  m.validate();
  return m;
}

Vec y0_param(const ExperimentSpec& spec, int e) {
  if (spec.params.contains("y0")) {
    Vec y = vec_from_json(spec.params["y0"]);
    if (y.size() != e) throw std::invalid_argument("experiment: y0 has wrong dimension");
    return y;
  }
  return Vec::Constant(e, 1.0);
}

SolveOptions solve_opts(const ExperimentSpec& spec) {
  SolveOptions o;
  o.substeps = spec.params.value("substeps", 4);
  return o;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"wong_zakai",  "wong_zakai_hoff", "bdg_ratio",
                                              "marcus_consistency", "metric_demo", "area_vanish"};
  return names;
}

ExperimentSpec ExperimentSpec::defaults(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  if (name == "wong_zakai") {
    s.model = {{"kind", "levy"}, {"d", 2}, {"diffusion", eye(2, 1.0)}, {"intensity", 3.0}, {"jump_cov", eye(2, 0.25)}};
    s.fields = "builtin:linear";
    s.meshes = {32, 64, 128, 256, 512, 1024};
    s.fine_cells = 4096;
    s.samples = 500;
    s.params = {{"phi", "linear"}, {"y0", {1.0, 1.0}}, {"floor_factor", 5.0}};
  } else if (name == "wong_zakai_hoff") {
    s.model = {{"kind", "brownian"}, {"d", 2}, {"diffusion", {{1.0, 0.8}, {0.8, 1.0}}}};
    s.fields = "builtin:linear";
    s.meshes = {64, 256, 1024};
    s.fine_cells = 4096;
    s.samples = 500;
    s.params = {{"phi", "hoff"}, {"y0", {1.0, 1.0}}};
  } else if (name == "bdg_ratio") {
    s.model = json::object();
    s.fine_cells = 128;
    s.samples = 2000;
    s.p = 2.5;
    s.params = {
        {"time_scales", {0.5, 1.0, 2.0}},
        {"vol_scales", {0.5, 1.0, 2.0}},
        {"band", 3.0},
        {"models",
         {{{"kind", "brownian"}, {"d", 2}, {"diffusion", eye(2, 1.0)}},
          {{"kind", "levy"},
           {"d", 2},
           {"intensity", 4.0},
           {"jump_mean", {0.3, 0.0}},
           {"jump_cov", eye(2, 0.25)},
           {"compensated", true}},
          {{"kind", "levy"},
           {"d", 2},
           {"diffusion", eye(2, 0.5)},
           {"intensity", 2.0},
           {"jump_cov", eye(2, 0.25)},
           {"compensated", true}}}}};
  } else if (name == "marcus_consistency") {
    s.model = {{"kind", "levy"}, {"d", 2}, {"diffusion", eye(2, 0.25)}, {"intensity", 5.0}, {"jump_cov", eye(2, 0.25)}};
    s.fields = "builtin:quadratic";
    s.fine_cells = 512;
    s.samples = 50;
    s.params = {{"tolerance", 1e-6}, {"pc_drivers", 20}, {"pc_points", 16},
                {"pc_tolerance", 1e-8}, {"substeps", 8}, {"y0", {0.5, 0.5}}};
  } else if (name == "area_vanish") {
    s.meshes = {16, 32, 64, 128, 256, 512};
    s.fine_cells = 4096;
    s.samples = 300;
    s.params = {{"drivers",
                 {{{"kind", "brownian"}, {"d", 2}, {"diffusion", eye(2, 1.0)}},
                  {{"kind", "levy"}, {"d", 2}, {"intensity", 50.0}, {"jump_cov", eye(2, 0.04)}}}}};
  } else if (name == "metric_demo") {
    s.samples = 1;
    s.params = {{"ns", {10, 100, 1000}}, {"delta_levels", 12}, {"densify", 128},
                {"sigma_floor", 0.4},    {"area_gap_floor", 0.25}};
  } else {
    throw std::invalid_argument("unknown experiment " + name);
  }
  return s;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  if (j.value("version", 1) != 1) throw std::invalid_argument("experiment config: unsupported version");
  ExperimentSpec s = defaults(j.at("name").get<std::string>());
  if (j.contains("model")) s.model = j["model"];
  if (j.contains("fields")) s.fields = j["fields"].get<std::string>();
  if (j.contains("meshes")) s.meshes = j["meshes"].get<std::vector<std::size_t>>();
  s.fine_cells = j.value("fine_cells", s.fine_cells);
  s.samples = j.value("samples", s.samples);
  s.p = j.value("p", s.p);
  s.seed = j.value("seed", s.seed);
  s.threads = j.value("threads", s.threads);
  s.out_dir = j.value("out_dir", s.out_dir);
  if (j.contains("params")) {
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it) s.params[it.key()] = it.value();
  }
  s.validate();
  return s;
}

json ExperimentSpec::to_json() const {
  return json{{"version", version}, {"name", name},           {"model", model},     {"fields", fields},
              {"meshes", meshes},   {"fine_cells", fine_cells}, {"samples", samples}, {"p", p},
              {"seed", seed},       {"params", params}};
}

void ExperimentSpec::validate() const {
  if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end()) {
    throw std::invalid_argument("unknown experiment " + name);
  }
  if (samples < 1) throw std::invalid_argument("experiment: samples must be >= 1");
  for (std::size_t i = 1; i < meshes.size(); ++i) {
    if (meshes[i] <= meshes[i - 1]) throw std::invalid_argument("experiment: mesh sequence must be strictly increasing");
  }
  for (std::size_t m : meshes) {
    if (m == 0 || fine_cells % m != 0) throw std::invalid_argument("experiment: meshes must divide fine_cells");
  }
  if (p < 1.0) throw std::invalid_argument("experiment: p must be >= 1");
}

bool Report::all_pass() const {
  return !rules.empty() && std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.pass; });
}

const Rule* Report::rule(const std::string& n) const {
  for (const Rule& r : rules) {
    if (r.name == n) return &r;
  }
  return nullptr;
}

json Report::to_json() const {
  json rs = json::array();
  for (const Rule& r : rules) rs.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  return json{{"name", name},          {"stats", stats},        {"rules", rs},
              {"all_pass", all_pass()}, {"runtime_seconds", runtime_seconds}, {"config", config},
              {"config_hash", config_hash}};
}

void Report::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(std::filesystem::path(dir) / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json in " + dir);
    out << to_json().dump(2) << '\n';
  }
  std::ofstream csv(std::filesystem::path(dir) / "samples.csv");
  if (!csv) throw std::runtime_error("cannot write samples.csv in " + dir);
  csv << std::setprecision(17);
  for (std::size_t i = 0; i < csv_header.size(); ++i) csv << (i ? "," : "") << csv_header[i];
  csv << '\n';
  for (const auto& row : csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << '\n';
  }
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SampleStats summarize(std::vector<double> xs) {
  SampleStats s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.se = xs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
  return s;
}

Report run_experiment(const ExperimentSpec& spec) {
  if (spec.name == "wong_zakai" || spec.name == "wong_zakai_hoff") return run_wong_zakai(spec);
  if (spec.name == "bdg_ratio") return run_bdg_ratio(spec);
  if (spec.name == "marcus_consistency") return run_marcus_consistency(spec);
  if (spec.name == "area_vanish") return run_area_vanish(spec);
  if (spec.name == "metric_demo") return run_metric_demo(spec);
  throw std::invalid_argument("unknown experiment " + spec.name);
}

// ---------------------------------------------------------------------------

namespace {

/// Corrected lift exp(X + A + B) with B the Hoff area of every skeleton increment,
/// assembled from the realised bracket.
RoughPath2 bracket_corrected_lift(const Path& x) {
  const int d = x.dim();
  const Path br = bracket(x);
  std::vector<Lie2Element> extra(x.size(), Lie2Element(d));
  for (std::size_t k = 1; k < x.size(); ++k) {
    const Vec db = br.values[k] - br.values[k - 1];
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) extra[k].set_area(i, j, 0.5 * db(i * d + j));
    }
  }
  return lift_with_area(x, extra);
}

Report wong_zakai_linear(const ExperimentSpec& spec, Report rep, const SemimartingaleModel& model,
                         const VectorFields& v, const PathFunction& phi) {
  const std::size_t n = spec.fine_cells + 1;
  const std::size_t last = spec.meshes.back();
  if (spec.fine_cells % (2 * last) != 0) throw std::invalid_argument("wong_zakai: fine_cells must be >= 2x the finest mesh");
  const Vec y0 = y0_param(spec, v.state_dim());
  const SolveOptions opts = solve_opts(spec);
  const std::size_t nm = spec.meshes.size();
  std::vector<std::vector<double>> rows(spec.samples);
  parallel_for(spec.samples, spec.threads, [&](std::size_t s) {
    const SamplePath sp = simulate(model, n, spec.seed, s);
    const Vec ref = solve_marcus_sde(sp.path, v, y0, opts).final_state();
    std::vector<double> row{static_cast<double>(s)};
    Vec at_last;
    for (std::size_t m : spec.meshes) {
      const Path xd = approximate(sp.path, ApproxScheme::phi_interp(coarse_partition(model.T, n, m), phi));
      const Vec y = solve_marcus_sde(xd, v, y0, opts).final_state();
      row.push_back((y - ref).norm());
      at_last = y;
    }
    const Path x2 = approximate(sp.path, ApproxScheme::phi_interp(coarse_partition(model.T, n, 2 * last), phi));
    row.push_back((solve_marcus_sde(x2, v, y0, opts).final_state() - at_last).norm());
    rows[s] = std::move(row);
  });
  rep.csv_header = {"sample"};
  for (std::size_t m : spec.meshes) rep.csv_header.push_back("err_" + std::to_string(m));
  rep.csv_header.push_back("floor_" + std::to_string(last));
  rep.csv_rows = rows;

  std::vector<double> medians;
  json per = json::array();
  for (std::size_t k = 0; k < nm; ++k) {
    std::vector<double> xs;
    for (const auto& r : rows) xs.push_back(r[1 + k]);
    const SampleStats st = summarize(xs);
    medians.push_back(st.median);
    per.push_back({{"cells", spec.meshes[k]}, {"median", st.median}, {"mean", st.mean}, {"se", st.se}});
  }
  std::vector<double> fl;
  for (const auto& r : rows) fl.push_back(r[1 + nm]);
  const SampleStats floor = summarize(fl);
  const double factor = spec.params.value("floor_factor", 5.0);
  rep.stats["per_mesh"] = per;
  rep.stats["self_convergence_floor"] = {{"median", floor.median}, {"mean", floor.mean}, {"se", floor.se}};
  rep.rules.push_back({"median_error_strictly_decreasing", strictly_decreasing(medians), "medians " + list(medians)});
  rep.rules.push_back({"final_median_within_floor_factor", medians.back() <= factor * floor.median,
                       "final median " + fmt(medians.back()) + " vs " + fmt(factor) + " x floor " + fmt(floor.median)});
  return rep;
}

Report wong_zakai_hoff(const ExperimentSpec& spec, Report rep, const SemimartingaleModel& model, const VectorFields& v,
                       const PathFunction& phi) {
  const std::size_t n = spec.fine_cells + 1;
  const Vec y0 = y0_param(spec, v.state_dim());
  const SolveOptions opts = solve_opts(spec);
  const int e = v.state_dim();
  const std::size_t nm = spec.meshes.size();
  // row: sample, then per mesh (gap to corrected, gap to Marcus) per component
  std::vector<std::vector<double>> rows(spec.samples);
  parallel_for(spec.samples, spec.threads, [&](std::size_t s) {
    const SamplePath sp = simulate(model, n, spec.seed, s);
    const Vec corrected = solve_canonical_rde(bracket_corrected_lift(sp.path), PathFunction::log_linear(), v, y0, opts)
                              .final_state();
    const Vec marcus = solve_marcus_sde(sp.path, v, y0, opts).final_state();
    std::vector<double> row{static_cast<double>(s)};
    for (std::size_t m : spec.meshes) {
      const Path xd = approximate(sp.path, ApproxScheme::phi_interp(coarse_partition(model.T, n, m), phi));
      const Vec y = solve_marcus_sde(xd, v, y0, opts).final_state();
      for (int i = 0; i < e; ++i) row.push_back(y(i) - corrected(i));
      for (int i = 0; i < e; ++i) row.push_back(y(i) - marcus(i));
    }
    rows[s] = std::move(row);
  });
  rep.csv_header = {"sample"};
  for (std::size_t m : spec.meshes) {
    for (int i = 0; i < e; ++i) rep.csv_header.push_back("gap_corrected_" + std::to_string(m) + "_y" + std::to_string(i + 1));
    for (int i = 0; i < e; ++i) rep.csv_header.push_back("gap_marcus_" + std::to_string(m) + "_y" + std::to_string(i + 1));
  }
  rep.csv_rows = rows;
  json per = json::array();
  bool corrected_zero = true, marcus_nonzero = false;
  std::string detail_c, detail_m;
  for (std::size_t k = 0; k < nm; ++k) {
    json entry{{"cells", spec.meshes[k]}};
    for (int which = 0; which < 2; ++which) {
      json comps = json::array();
      for (int i = 0; i < e; ++i) {
        std::vector<double> xs;
        for (const auto& r : rows) xs.push_back(r[1 + k * 2 * e + which * e + i]);
        const SampleStats st = summarize(xs);
        comps.push_back({{"mean", st.mean}, {"se", st.se}, {"median", st.median}});
        if (k + 1 == nm) {
          const double z = st.se > 0.0 ? std::abs(st.mean) / st.se : (st.mean == 0.0 ? 0.0 : INFINITY);
          if (which == 0) {
            corrected_zero = corrected_zero && z <= 3.0;
            detail_c += "y" + std::to_string(i + 1) + ": " + fmt(st.mean) + " +- " + fmt(st.se) + "; ";
          } else {
            marcus_nonzero = marcus_nonzero || z > 3.0;
            detail_m += "y" + std::to_string(i + 1) + ": " + fmt(st.mean) + " +- " + fmt(st.se) + "; ";
          }
        }
      }
      entry[which == 0 ? "gap_corrected" : "gap_marcus"] = comps;
    }
    per.push_back(entry);
  }
  rep.stats["per_mesh"] = per;
  rep.rules.push_back({"gap_to_corrected_within_3se", corrected_zero, detail_c});
  rep.rules.push_back({"gap_to_marcus_beyond_3se", marcus_nonzero, detail_m});
  return rep;
}

}  // namespace

Report run_wong_zakai(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  Report rep = start(spec);
  const SemimartingaleModel model = model_from_json(spec.model);
  const VectorFields v = fields_from_arg(spec.fields, model.d);
  const PathFunction phi =
      phi_from_name(spec.params.value("phi", std::string(spec.name == "wong_zakai_hoff" ? "hoff" : "linear")));
  rep = phi.kind() == PathFunction::Kind::Hoff ? wong_zakai_hoff(spec, rep, model, v, phi)
                                               : wong_zakai_linear(spec, rep, model, v, phi);
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

Report run_bdg_ratio(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  Report rep = start(spec);
  const auto ts = spec.params.value("time_scales", std::vector<double>{1.0});
  const auto vs = spec.params.value("vol_scales", std::vector<double>{1.0, 2.0});
  const double band = spec.params.value("band", 3.0);
  const std::size_t n = spec.fine_cells + 1;
  std::vector<SemimartingaleModel> models;
  for (const auto& m : spec.params.at("models")) models.push_back(model_from_json(m));
  for (const auto& m : models) {
    if ((m.effective_drift() + m.intensity * m.jump_mean).norm() > 1e-12) throw std::invalid_argument("bdg_ratio: models must be martingales");
  }
  rep.csv_header = {"model", "T", "vol", "sample", "pvar", "bracket_sqrt"};

  struct Cell {
    double ratio = 0.0, se = 0.0, num = 0.0, den = 0.0;
  };
  auto run_cell = [&](const SemimartingaleModel& m, std::size_t mi, double T, double vol) {
    const SemimartingaleModel sm = scaled(m, vol, T);
    std::vector<double> num(spec.samples), den(spec.samples);
    parallel_for(spec.samples, spec.threads, [&](std::size_t s) {
      // same stream for every scaling, so X -> cX is an exact coupling
      const SamplePath sp = simulate(sm, n, spec.seed, mi * 1000003ULL + s);
      num[s] = pvar(marcus_lift(sp.path), spec.p);
      den[s] = std::sqrt(std::max(0.0, bracket_at_end(sp.path).trace()));
    });
    for (std::size_t s = 0; s < spec.samples; ++s) {
      rep.csv_rows.push_back({static_cast<double>(mi), T, vol, static_cast<double>(s), num[s], den[s]});
    }
    const SampleStats a = summarize(num), b = summarize(den);
    Cell c;
    c.num = a.mean;
    c.den = b.mean;
    if (b.mean > 0.0) {
      c.ratio = a.mean / b.mean;
      double cov = 0.0;
      for (std::size_t s = 0; s < spec.samples; ++s) cov += (num[s] - a.mean) * (den[s] - b.mean);
      const double N = static_cast<double>(spec.samples);
      cov /= std::max(1.0, N - 1.0) * N;
      const double rel = a.se * a.se / (a.mean * a.mean) + b.se * b.se / (b.mean * b.mean) - 2.0 * cov / (a.mean * b.mean);
      c.se = c.ratio * std::sqrt(std::max(0.0, rel));
    }
    return c;
  };

  json table = json::array();
  std::vector<double> base_ratio(models.size(), 0.0);
  bool homogeneous = true;
  std::string hom_detail;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    Cell base;
    bool have_base = false;
    for (double T : ts) {
      for (double vol : vs) {
        const Cell c = run_cell(models[mi], mi, T, vol);
        table.push_back({{"model", models[mi].name()}, {"T", T}, {"vol", vol}, {"ratio", c.ratio}, {"se", c.se},
                         {"mean_pvar", c.num}, {"mean_bracket_sqrt", c.den}});
        if (T == 1.0 && vol == 1.0) {
          base = c;
          have_base = true;
          base_ratio[mi] = c.ratio;
        }
      }
    }
    if (!have_base) base = run_cell(models[mi], mi, 1.0, 1.0), base_ratio[mi] = base.ratio;
    const Cell twice = run_cell(models[mi], mi, 1.0, 2.0);
    const bool ok = std::abs(twice.ratio - base.ratio) <= 2.0 * base.se;
    homogeneous = homogeneous && ok;
    hom_detail += models[mi].name() + ": " + fmt(base.ratio) + " vs " + fmt(twice.ratio) + " (se " + fmt(base.se) + "); ";
  }
  const double lo = *std::min_element(base_ratio.begin(), base_ratio.end());
  const double hi = *std::max_element(base_ratio.begin(), base_ratio.end());

  // zero process
  SemimartingaleModel zero = SemimartingaleModel::brownian(2, 0.0);
  const SamplePath zp = simulate(zero, n, spec.seed, 0);
  const double zn = pvar(marcus_lift(zp.path), spec.p), zd = std::sqrt(bracket_at_end(zp.path).trace());

  rep.stats["table"] = table;
  rep.stats["ratio_spread"] = lo > 0.0 ? hi / lo : INFINITY;
  rep.rules.push_back({"ratio_invariant_under_doubling", homogeneous, hom_detail});
  rep.rules.push_back({"ratio_band", lo > 0.0 && hi / lo <= band,
                       "ratios " + list(base_ratio) + ", spread " + fmt(lo > 0.0 ? hi / lo : INFINITY)});
  rep.rules.push_back({"zero_process_both_sides_zero", zn == 0.0 && zd == 0.0, fmt(zn) + ", " + fmt(zd)});
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

Report run_marcus_consistency(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  Report rep = start(spec);
  const SemimartingaleModel model = model_from_json(spec.model);
  const VectorFields v = fields_from_arg(spec.fields, model.d);
  const Vec y0 = y0_param(spec, v.state_dim());
  const SolveOptions opts = solve_opts(spec);
  const double tol = spec.params.value("tolerance", 1e-6);
  const std::size_t n = spec.fine_cells + 1;

  std::vector<double> gaps(spec.samples), zero_gaps(spec.samples);
  const VectorFields zf = VectorFields::zero(v.state_dim(), v.driver_dim());
  parallel_for(spec.samples, spec.threads, [&](std::size_t s) {
    const SamplePath sp = simulate(model, n, spec.seed, s);
    const RdeSolution a = solve_marcus_sde(sp.path, v, y0, opts);
    const RdeSolution b = solve_canonical_rde(marcus_lift(sp.path), PathFunction::log_linear(), v, y0, opts);
    double g = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      g = std::max({g, (a.states[i] - b.states[i]).lpNorm<Eigen::Infinity>(),
                    (a.left_states[i] - b.left_states[i]).lpNorm<Eigen::Infinity>()});
    }
    gaps[s] = g;
    const RdeSolution za = solve_marcus_sde(sp.path, zf, y0, opts);
    const RdeSolution zb = solve_canonical_rde(marcus_lift(sp.path), PathFunction::log_linear(), zf, y0, opts);
    zero_gaps[s] = (za.final_state() - zb.final_state()).norm() + (za.final_state() - y0).norm();
  });

  // piecewise-constant drivers against the ODE along the connecting polyline
  const std::size_t drivers = spec.params.value("pc_drivers", 20);
  const std::size_t pts = spec.params.value("pc_points", 16);
  const double pc_tol = spec.params.value("pc_tolerance", 1e-8);
  std::vector<double> pc(drivers);
  const SemimartingaleModel walk = SemimartingaleModel::random_walk(model.d, SemimartingaleModel::StepLaw::Gaussian,
                                                                    1.0, model.T);
  parallel_for(drivers, spec.threads, [&](std::size_t s) {
    const SamplePath sp = simulate(walk, pts, spec.seed ^ 0x5bd1e995ULL, s);
    const Vec y = solve_canonical_rde(marcus_lift(sp.path), PathFunction::log_linear(), v, y0, opts).final_state();
    Vec z = y0;
    for (std::size_t i = 1; i < sp.path.size(); ++i) {
      const Vec dx = sp.path.values[i] - sp.path.values[i - 1];
      z = flow_exp([&](const Vec& q) { return Vec(v.eval(q) * dx); }, z, 1.0, 4096);
    }
    pc[s] = (y - z).lpNorm<Eigen::Infinity>();
  });

  rep.csv_header = {"sample", "sup_gap", "zero_field_gap"};
  for (std::size_t s = 0; s < spec.samples; ++s) rep.csv_rows.push_back({static_cast<double>(s), gaps[s], zero_gaps[s]});
  const double gmax = *std::max_element(gaps.begin(), gaps.end());
  const double zmax = *std::max_element(zero_gaps.begin(), zero_gaps.end());
  const double pmax = pc.empty() ? 0.0 : *std::max_element(pc.begin(), pc.end());
  rep.stats["max_gap"] = gmax;
  rep.stats["gap"] = {{"median", summarize(gaps).median}, {"mean", summarize(gaps).mean}};
  rep.stats["zero_fields_max_gap"] = zmax;
  rep.stats["piecewise_constant_max_gap"] = pmax;
  rep.rules.push_back({"marcus_vs_canonical_sup_gap", gmax <= tol, fmt(gmax) + " <= " + fmt(tol)});
  rep.rules.push_back({"zero_fields_gap_zero", zmax == 0.0, fmt(zmax)});
  rep.rules.push_back({"piecewise_constant_vs_polyline_ode", pmax <= pc_tol, fmt(pmax) + " <= " + fmt(pc_tol)});
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

double area_partial_sum_max(const Path& x, const std::vector<double>& partition,
                            const std::function<double(const Vec&)>& y) {
  x.validate();
  const int d = x.dim();
  const double tol = 1e-9 * std::max(1.0, x.horizon);
  std::vector<std::size_t> idx;
  for (double t : partition) {
    const auto it = std::lower_bound(x.times.begin(), x.times.end(), t - tol);
    if (it == x.times.end() || std::abs(*it - t) > tol) throw std::invalid_argument("area sums: partition not on grid");
    idx.push_back(static_cast<std::size_t>(it - x.times.begin()));
  }
  Mat partial = Mat::Zero(d, d);
  double best = 0.0;
  for (std::size_t c = 0; c + 1 < idx.size(); ++c) {
    const std::size_t a = idx[c], b = idx[c + 1];
    Mat ito = Mat::Zero(d, d);
    Vec rel = Vec::Zero(d);  // X_{s-} - X_{t_j}
    for (std::size_t k = a + 1; k <= b; ++k) {
      const Vec cont = x.left[k] - x.values[k - 1];
      ito += rel * cont.transpose();
      rel += cont;
      const Vec jump = x.values[k] - x.left[k];
      ito += rel * jump.transpose();
      rel += jump;
    }
    partial += y(x.values[a]) * ito;
    best = std::max(best, partial.norm());
  }
  return best;
}

Report run_area_vanish(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  Report rep = start(spec);
  const std::size_t n = spec.fine_cells + 1;
  std::vector<SemimartingaleModel> drivers;
  for (const auto& m : spec.params.at("drivers")) drivers.push_back(model_from_json(m));
  rep.csv_header = {"driver", "sample"};
  for (std::size_t m : spec.meshes) rep.csv_header.push_back("stat_" + std::to_string(m));
  json per = json::array();
  for (std::size_t di = 0; di < drivers.size(); ++di) {
    const SemimartingaleModel& model = drivers[di];
    // Y = 1 for continuous drivers; a bounded previsible integrand otherwise
    const bool constant_y = model.kind == SemimartingaleModel::Kind::BrownianMotion;
    auto y = [constant_y](const Vec& x) { return constant_y ? 1.0 : std::cos(x(0)); };
    std::vector<std::vector<double>> rows(spec.samples);
    parallel_for(spec.samples, spec.threads, [&](std::size_t s) {
      const SamplePath sp = simulate(model, n, spec.seed, di * 1000003ULL + s);
      std::vector<double> row{static_cast<double>(di), static_cast<double>(s)};
      for (std::size_t m : spec.meshes) row.push_back(area_partial_sum_max(sp.path, coarse_partition(model.T, n, m), y));
      rows[s] = std::move(row);
    });
    std::vector<double> medians;
    for (std::size_t k = 0; k < spec.meshes.size(); ++k) {
      std::vector<double> xs;
      for (const auto& r : rows) xs.push_back(r[2 + k]);
      medians.push_back(summarize(xs).median);
    }
    rep.csv_rows.insert(rep.csv_rows.end(), rows.begin(), rows.end());
    per.push_back({{"driver", model.name()}, {"medians", medians}});
    rep.rules.push_back({"median_decreasing_" + model.name(), strictly_decreasing(medians), "medians " + list(medians)});
  }
  rep.stats["per_driver"] = per;
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

namespace {

Path ramp(const Vec& to, double a, double b) {
  const Vec z = Vec::Zero(to.size());
  return Path::polyline({0.0, a, b, 1.0}, {z, z, to, to}, 1.0);
}

Path step(const Vec& to, double at) {
  const Vec z = Vec::Zero(to.size());
  return Path::piecewise_constant({0.0, at, 1.0}, {z, to, to}, 1.0);
}

}  // namespace

Report run_metric_demo(const ExperimentSpec& spec) {
  const auto t0 = Clock::now();
  Report rep = start(spec);
  const auto ns = spec.params.value("ns", std::vector<double>{10, 100, 1000});
  AlphaOptions ao;
  ao.delta_levels = spec.params.value("delta_levels", 12);
  ao.densify = spec.params.value("densify", 128);
  const double sigma_floor = spec.params.value("sigma_floor", 0.4);
  const double gap_floor = spec.params.value("area_gap_floor", 0.25);

  Vec e1 = Vec::Zero(2), e2 = Vec::Zero(2);
  e1(0) = 1.0;
  e2(1) = 1.0;
  const PathFunction lin = PathFunction::linear(), ll = PathFunction::log_linear();
  const PathFunction h12 = PathFunction::hoff({0, 1}), h21 = PathFunction::hoff({1, 0});
  const Path jx = step(e1, 0.5);
  const Path jsum = step(Vec(e1 + e2), 0.5);
  const RoughPath2 j21 = modified_lift(jsum, h21), j12 = modified_lift(jsum, h12);

  std::vector<double> alpha_x, sigma_x, self, a21, a12, b12, b21;
  json rows = json::array();
  for (double nd : ns) {
    const double w = 1.0 / nd;
    const Path x = ramp(e1, 0.5, 0.5 + w);
    const Path h = ramp(e2, 0.5 - w, 0.5);
    const Path hb = ramp(e2, 0.5 + w, 0.5 + 2 * w);
    alpha_x.push_back(alpha_estimate(x, lin, jx, lin, MetricKind::Infinity, 2.0, ao).value);
    sigma_x.push_back(sigma_estimate(trace_of(x, ao.densify), trace_of(jx), MetricKind::Infinity).value);
    self.push_back(alpha_estimate(x, lin, x, lin, MetricKind::Infinity, 2.0, ao).value);
    const RoughPath2 s = lift_piecewise_linear(x + h), sb = lift_piecewise_linear(x + hb);
    a21.push_back(alpha_estimate(s, ll, j21, h21, MetricKind::Infinity, 2.5, ao).value);
    a12.push_back(alpha_estimate(s, ll, j12, h12, MetricKind::Infinity, 2.5, ao).value);
    b12.push_back(alpha_estimate(sb, ll, j12, h12, MetricKind::Infinity, 2.5, ao).value);
    b21.push_back(alpha_estimate(sb, ll, j21, h21, MetricKind::Infinity, 2.5, ao).value);
    rows.push_back({{"n", nd}, {"alpha_inf_x_vs_jump", alpha_x.back()}, {"sigma_inf_x_vs_jump", sigma_x.back()},
                    {"alpha_inf_sum_vs_phi21", a21.back()}, {"alpha_inf_sum_vs_phi12", a12.back()},
                    {"alpha_inf_sumbar_vs_phi12", b12.back()}, {"alpha_inf_sumbar_vs_phi21", b21.back()},
                    {"alpha_inf_identical", self.back()}});
  }
  rep.csv_header = {"n", "alpha_x", "sigma_x", "alpha_sum_21", "alpha_sum_12", "alpha_sumbar_12", "alpha_sumbar_21"};
  for (std::size_t k = 0; k < ns.size(); ++k) {
    rep.csv_rows.push_back({ns[k], alpha_x[k], sigma_x[k], a21[k], a12[k], b12[k], b21[k]});
  }
  rep.stats["table"] = rows;
  const double smin = *std::min_element(sigma_x.begin(), sigma_x.end());
  const double smax_self = *std::max_element(self.begin(), self.end());
  rep.rules.push_back({"alpha_inf_decreasing", strictly_decreasing(alpha_x), list(alpha_x)});
  rep.rules.push_back({"sigma_inf_bounded_below", smin >= sigma_floor, "min " + fmt(smin) + " >= " + fmt(sigma_floor)});
  rep.rules.push_back({"sum_converges_to_hoff21", strictly_decreasing(a21), list(a21)});
  rep.rules.push_back({"sum_bar_converges_to_hoff12", strictly_decreasing(b12), list(b12)});
  rep.rules.push_back({"limits_differ_in_area", a12.back() >= gap_floor && b21.back() >= gap_floor,
                       fmt(a12.back()) + ", " + fmt(b21.back()) + " >= " + fmt(gap_floor)});
  rep.rules.push_back({"identical_sequences_zero", smax_self == 0.0, fmt(smax_self)});
  rep.runtime_seconds = seconds_since(t0);
  return rep;
}

}  // namespace crp
