#pragma once

// Monte Carlo experiments with machine-readable reports.

#include "crp/io.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace crp {

struct ExperimentSpec {
  int version = 1;
  std::string name;
  json model;                       // see model_from_json
  std::string fields;               // "builtin:<name>" or a JSON file
  std::vector<std::size_t> meshes;  // cells per partition, strictly increasing
  std::size_t fine_cells = 4096;    // cells of the simulated skeleton
  std::size_t samples = 1;
  double p = 2.5;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir;
  json params = json::object();     // experiment specific

  /// Defaults for `name` overlaid with the keys present in `j`.
  static ExperimentSpec from_json(const json& j);
  static ExperimentSpec defaults(const std::string& name);
  json to_json() const;
  void validate() const;
};

struct Rule {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string name;
  json stats = json::object();
  std::vector<Rule> rules;
  double runtime_seconds = 0.0;
  json config;
  std::string config_hash;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;

  bool all_pass() const;
  const Rule* rule(const std::string& name) const;
  json to_json() const;
  /// Writes report.json and samples.csv into `dir` (created if missing).
  void write(const std::string& dir) const;
};

/// Runs fn(0..n-1) on up to `threads` workers; fn must only write to its own slot.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

struct SampleStats {
  double median = 0.0, mean = 0.0, se = 0.0;
};
SampleStats summarize(std::vector<double> xs);

Report run_experiment(const ExperimentSpec& spec);
Report run_wong_zakai(const ExperimentSpec& spec);
Report run_bdg_ratio(const ExperimentSpec& spec);
Report run_marcus_consistency(const ExperimentSpec& spec);
Report run_area_vanish(const ExperimentSpec& spec);
Report run_metric_demo(const ExperimentSpec& spec);

/// max_n |sum_{j<n} Y_{t_j} X^{(2)}_{t_j,t_{j+1}}| with X^{(2)} the left-point (Ito) sums of x's
/// skeleton over the cells of `partition`; `y` gives Y at the left end of each cell.
double area_partial_sum_max(const Path& x, const std::vector<double>& partition,
                            const std::function<double(const Vec&)>& y);

const std::vector<std::string>& experiment_names();

}  // namespace crp
