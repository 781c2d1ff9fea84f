#include "crp/harness.hpp"
#include "crp/io.hpp"
#include "crp/lift.hpp"
#include "crp/metrics.hpp"
#include "crp/rde.hpp"
#include "crp/stochastic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

using namespace crp;

namespace {

json load_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open " + arg);
  return json::parse(in);
}

bool is_rough_csv(const std::string& file) {
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  return header.find(",m1_1") != std::string::npos;
}

RoughPath2 read_rough_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return read_rough_csv(in);
}

template <class F>
void with_out(const std::string& out, F&& f) {
  if (out.empty() || out == "-") {
    f(std::cout);
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  f(os);
}

RoughPath2 driver_lift(const Path& x, const PathFunction& phi) {
  return phi.kind() == PathFunction::Kind::Hoff ? modified_lift(x, phi) : marcus_lift(x);
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for rough paths with jumps"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir;
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--threads", threads, "Worker threads");
  app.add_option("--out-dir", out_dir, "Output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a driving semimartingale");
  std::string model_arg, sim_out;
  std::size_t grid = 1025;
  std::uint64_t stream = 0;
  sim->add_option("--model", model_arg, "Model JSON file or inline JSON")->required();
  sim->add_option("--n", grid, "Regular grid points");
  sim->add_option("--stream", stream, "Sample index");
  sim->add_option("--out", sim_out, "Output path CSV (default stdout)");

  // lift
  auto* lift = app.add_subcommand("lift", "Lift a sampled path to a level-2 rough path");
  std::string lift_in, lift_out, lift_phi = "loglinear";
  lift->add_option("--in", lift_in, "Input path CSV")->required();
  lift->add_option("--phi", lift_phi, "linear|loglinear (Marcus lift) or hoff (modified lift)");
  lift->add_option("--out", lift_out, "Output rough path CSV (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve the canonical RDE driven by a path");
  std::string driver, phi_name = "loglinear", fields = "builtin:rotation", y0s, solve_out;
  int substeps = 4;
  solve->add_option("--driver", driver, "Driver path CSV (level-1 or rough)")->required();
  solve->add_option("--phi", phi_name, "linear|loglinear|hoff");
  solve->add_option("--fields", fields, "builtin:<linear|rotation|quadratic|zero> or a JSON file");
  solve->add_option("--y0", y0s, "Initial state, comma separated")->required();
  solve->add_option("--substeps", substeps, "RK4 substeps per unit step");
  solve->add_option("--out", solve_out, "Output solution CSV (default stdout)");

  // metric
  auto* metric = app.add_subcommand("metric", "Evaluate p-variation functionals and distances");
  std::string which = "pvar", p_arg = "2.5", metric_out, metric_phi = "linear";
  int delta_levels = 4;
  std::vector<std::string> inputs;
  metric->add_option("--metric", which, "pvar|rho|sigma|alpha|beta|osc");
  metric->add_option("--p", p_arg, "Variation order, 'inf' for the uniform metric, 0 for alpha_0");
  metric->add_option("--delta-levels", delta_levels, "Number of dyadic delta levels");
  metric->add_option("--phi", metric_phi, "Path function for alpha/beta");
  metric->add_option("--in", inputs, "One or two path CSV files")->required()->expected(1, 2);
  metric->add_option("--out", metric_out, "Output report JSON (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
  std::string config, exp_name;
  exp->add_option("--config", config, "Experiment config JSON");
  exp->add_option("--name", exp_name, "Experiment name (uses defaults)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      json mj = load_json_arg(model_arg);
      const SamplePath sp = simulate(model_from_json(mj), grid, seed, stream);
      with_out(sim_out, [&](std::ostream& os) { write_path_csv(os, sp.path); });
      return 0;
    }
    if (*lift) {
      const Path x = read_path_csv_file(lift_in);
      const RoughPath2 r = driver_lift(x, phi_from_name(lift_phi));
      with_out(lift_out, [&](std::ostream& os) { write_rough_csv(os, r); });
      if (!lift_out.empty() && lift_out != "-") {
        std::ofstream meta(lift_out + ".json");
        meta << rough_metadata(r).dump(2) << '\n';
      }
      return 0;
    }
    if (*solve) {
      const PathFunction phi = phi_from_name(phi_name);
      const RoughPath2 x = is_rough_csv(driver) ? read_rough_file(driver) : driver_lift(read_path_csv_file(driver), phi);
      const VectorFields v = fields_from_arg(fields, x.dim());
      SolveOptions opts;
      opts.substeps = substeps;
      const RdeSolution sol = solve_canonical_rde(x, phi, v, parse_vec(y0s), opts);
      with_out(solve_out, [&](std::ostream& os) { write_solution_csv(os, sol); });
      return 0;
    }
    if (*metric) {
      const double p = parse_p(p_arg);
      const bool rough = is_rough_csv(inputs[0]);
      if (inputs.size() == 2 && is_rough_csv(inputs[1]) != rough) {
        throw std::invalid_argument("metric: inputs must both be level-1 or both rough");
      }
      const bool need_two = which != "pvar" && which != "osc";
      if (need_two && inputs.size() != 2) throw std::invalid_argument("metric: " + which + " needs two inputs");
      json out{{"metric", which}, {"p", p_arg}};
      const PathFunction phi = phi_from_name(metric_phi);
      auto kind_for = [&](bool beta) {
        if (beta) return MetricKind::Beta;
        if (std::isinf(p)) return MetricKind::Infinity;
        if (p == 0.0) return MetricKind::Zero;
        return MetricKind::PVar;
      };
      auto report = [&](const MetricReport& r) {
        out["value"] = r.value;
        out["upper_bound"] = r.upper_bound;
        out["lambda_sup"] = r.alignment.lambda_sup;
        out["deltas"] = r.deltas;
        out["per_delta"] = r.per_delta;
        out["monotone_trend"] = r.monotone_trend;
      };
      const double pp = (std::isinf(p) || p == 0.0) ? (rough ? 2.5 : 2.0) : p;
      AlphaOptions ao;
      ao.delta_levels = delta_levels;
      if (rough) {
        const RoughPath2 a = read_rough_file(inputs[0]);
        if (which == "pvar") out["value"] = pvar(a, p);
        else if (which == "osc") out["value"] = osc_count_bound(a, p);
        else {
          const RoughPath2 b = read_rough_file(inputs[1]);
          if (which == "rho") out["value"] = rho_pvar(a, b, p);
          else if (which == "sigma") report(sigma_estimate(trace_of(a), trace_of(b), kind_for(false), pp));
          else if (which == "alpha" || which == "beta") report(alpha_estimate(a, phi, b, phi, kind_for(which == "beta"), pp, ao));
          else throw std::invalid_argument("unknown metric " + which);
        }
      } else {
        const Path a = read_path_csv_file(inputs[0]);
        if (which == "pvar") out["value"] = pvar(a, p);
        else if (which == "osc") out["value"] = osc_count_bound(trace_of(a).points, p);
        else {
          const Path b = read_path_csv_file(inputs[1]);
          if (which == "rho") out["value"] = rho_pvar(trace_of(a).points, trace_of(b).points, p);
          else if (which == "sigma") report(sigma_estimate(trace_of(a), trace_of(b), kind_for(false), pp));
          else if (which == "alpha" || which == "beta") report(alpha_estimate(a, phi, b, phi, kind_for(which == "beta"), pp, ao));
          else throw std::invalid_argument("unknown metric " + which);
        }
      }
      with_out(metric_out, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
      return 0;
    }
    if (*exp) {
      json j;
      if (!config.empty()) j = load_json_arg(config);
      else if (!exp_name.empty()) j = json{{"name", exp_name}};
      else throw std::invalid_argument("experiment: give --config or --name");
      if (app.count("--seed")) j["seed"] = seed;
      if (app.count("--threads")) j["threads"] = threads;
      ExperimentSpec spec = ExperimentSpec::from_json(j);
      if (!out_dir.empty()) spec.out_dir = out_dir;
      const Report rep = run_experiment(spec);
      if (!spec.out_dir.empty()) rep.write(spec.out_dir);
      for (const Rule& r : rep.rules) std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
