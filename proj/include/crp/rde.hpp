#pragma once

// Canonical RDE solver (step-2 log-ODE on the phi-interpolated driver) and a
// direct Marcus SDE scheme on sample skeletons.

#include "crp/cadlag.hpp"
#include "crp/lift.hpp"
#include "crp/path_function.hpp"
#include "crp/time_change.hpp"
#include "crp/vector_fields.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crp {

/// Raised when the state leaves the finite range; `time` is on the solver's clock.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// z' = W(z) over [0, h] with `substeps` classical RK4 steps.
Vec flow_exp(const std::function<Vec(const Vec&)>& w, const Vec& y0, double h, int substeps,
             double time = 0.0);

struct SolveOptions {
  int substeps = 4;            // per unit of increment size `substep_scale`
  double substep_scale = 0.25;
  int samples_per_jump = 0;    // 0: path function default
  bool estimate_error = false; // re-run each step with doubled substeps
  double blowup = 1e12;
};

struct RdeDiagnostics {
  std::size_t steps = 0;
  std::size_t substeps = 0;
  double max_local_error = 0.0;
};

struct RdeSolution {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> left_states;  // y_{t-}
  TimeChange tau;
  RdeDiagnostics diagnostics;

  const Vec& final_state() const { return states.back(); }
  /// Solution as a sampled path (states between samples joined linearly).
  Path as_path(double horizon) const;
};

/// Solve dy = V(y) dx^phi and pull back to the original sample times of x.
RdeSolution solve_canonical_rde(const RoughPath2& x, const PathFunction& phi, const VectorFields& v,
                                const Vec& y0, const SolveOptions& opts = {});

/// Jump rule y <- e^{V dX}(y) applied to every continuous increment and jump of
/// the skeleton.
RdeSolution solve_marcus_sde(const Path& x, const VectorFields& v, const Vec& y0, const SolveOptions& opts = {});

/// Batch solve sharing one interpolation of the driver.
std::vector<RdeSolution> flow_map(const RoughPath2& x, const PathFunction& phi, const VectorFields& v,
                                  const std::vector<Vec>& initial, const SolveOptions& opts = {});

}  // namespace crp
