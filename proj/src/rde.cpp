#include "crp/rde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crp {

namespace {

void guard(const Vec& y, double limit, double time) {
  if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > limit) {
    std::ostringstream os;
    os << "solver blow-up at t=" << time;
    throw BlowUpError(os.str(), time);
  }
}

int substeps_for(double size, const SolveOptions& opts) {
  if (opts.substeps < 1) throw std::invalid_argument("solver: substeps must be >= 1");
  const double k = std::ceil(size / opts.substep_scale);
  return opts.substeps * static_cast<int>(std::max(1.0, k));
}

struct Stepper {
  const VectorFields& v;
  const SolveOptions& opts;
  RdeDiagnostics diag;

  Vec step(const Vec& y, const Lie2Element& l, double time) {
    const int n = substeps_for(hom_norm(l), opts);
    auto w = [&](const Vec& z) { return v.log_field(z, l); };
    Vec out = flow_exp(w, y, 1.0, n, time);
    if (opts.estimate_error) {
      const Vec fine = flow_exp(w, y, 1.0, 2 * n, time);
      diag.max_local_error = std::max(diag.max_local_error, (fine - out).norm());
    }
    guard(out, opts.blowup, time);
    ++diag.steps;
    diag.substeps += static_cast<std::size_t>(n);
    return out;
  }
};

RdeSolution solve_on(const RoughPath2& x, const RoughInterpolation& ri, const VectorFields& v, const Vec& y0,
                     const SolveOptions& opts) {
  if (y0.size() != v.state_dim()) throw std::invalid_argument("solver: initial state dimension mismatch");
  if (x.dim() != v.driver_dim()) throw std::invalid_argument("solver: driver dimension mismatch");
  Stepper st{v, opts, {}};
  std::vector<Vec> ys;
  ys.reserve(ri.times.size());
  ys.push_back(y0);
  for (std::size_t k = 1; k < ri.times.size(); ++k) {
    const Lie2Element l = log2(increment(ri.points[k - 1], ri.points[k]));
    ys.push_back(hom_norm(l) == 0.0 ? ys.back() : st.step(ys.back(), l, ri.times[k]));
  }
  RdeSolution sol;
  sol.times = x.times;
  sol.tau = ri.tau;
  sol.diagnostics = st.diag;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sol.states.push_back(ys[ri.index[i]]);
    const bool windowed = i > 0 && ri.index[i] > ri.index[i - 1] + 1 && x.is_jump(i);
    sol.left_states.push_back(windowed ? ys[ri.index[i - 1] + 1] : ys[ri.index[i]]);
  }
  return sol;
}

InterpolateOptions solver_interp(const SolveOptions& opts) {
  InterpolateOptions io;
  io.delta = 1.0;
  io.samples_per_jump = opts.samples_per_jump;
  return io;
}

}  // namespace

Vec flow_exp(const std::function<Vec(const Vec&)>& w, const Vec& y0, double h, int substeps, double time) {
  if (substeps < 1) throw std::invalid_argument("flow_exp: substeps must be >= 1");
  const double dt = h / substeps;
  Vec y = y0;
  for (int s = 0; s < substeps; ++s) {
    const Vec k1 = w(y);
    const Vec k2 = w(y + 0.5 * dt * k1);
    const Vec k3 = w(y + 0.5 * dt * k2);
    const Vec k4 = w(y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "flow_exp: non-finite state at t=" << time;
      throw BlowUpError(os.str(), time);
    }
  }
  return y;
}

Path RdeSolution::as_path(double horizon) const {
  Path p;
  p.times = times;
  p.values = states;
  p.left = left_states;
  p.horizon = std::max(horizon, times.back());
  p.validate();
  return p;
}

RdeSolution solve_canonical_rde(const RoughPath2& x, const PathFunction& phi, const VectorFields& v,
                                const Vec& y0, const SolveOptions& opts) {
  const RoughInterpolation ri = interpolate(x, phi, solver_interp(opts));
  return solve_on(x, ri, v, y0, opts);
}

std::vector<RdeSolution> flow_map(const RoughPath2& x, const PathFunction& phi, const VectorFields& v,
                                  const std::vector<Vec>& initial, const SolveOptions& opts) {
  const RoughInterpolation ri = interpolate(x, phi, solver_interp(opts));
  std::vector<RdeSolution> out;
  out.reserve(initial.size());
  for (const Vec& y0 : initial) out.push_back(solve_on(x, ri, v, y0, opts));
  return out;
}

RdeSolution solve_marcus_sde(const Path& x, const VectorFields& v, const Vec& y0, const SolveOptions& opts) {
  x.validate();
  if (y0.size() != v.state_dim()) throw std::invalid_argument("solver: initial state dimension mismatch");
  if (x.dim() != v.driver_dim()) throw std::invalid_argument("solver: driver dimension mismatch");
  Stepper st{v, opts, {}};
  RdeSolution sol;
  sol.times = x.times;
  sol.states.push_back(y0);
  sol.left_states.push_back(y0);
  Vec y = y0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Vec cont = x.left[i] - x.values[i - 1];
    if (!cont.isZero(0.0)) y = st.step(y, Lie2Element::from_vec(cont), x.times[i]);
    sol.left_states.push_back(y);
    if (x.is_jump(i)) y = st.step(y, Lie2Element::from_vec(x.values[i] - x.left[i]), x.times[i]);
    sol.states.push_back(y);
  }
  sol.tau = TimeChange::identity(std::max(x.horizon, x.times.back() > 0.0 ? x.times.back() : 1.0));
  sol.diagnostics = st.diag;
  return sol;
}

}  // namespace crp
