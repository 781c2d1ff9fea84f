#include "crp/stochastic.hpp"

#include "crp/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace crp {

namespace {

Mat psd_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  Vec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  return es.eigenvectors() * ev.asDiagonal();
}

bool is_psd(const Mat& a) {
  if (a.rows() != a.cols()) return false;
  if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  return es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, a.norm());
}

Vec gaussian(CounterRng& rng, int d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec z(d);
  for (int i = 0; i < d; ++i) z(i) = n01(rng);
  return z;
}

Vec rademacher(CounterRng& rng, int d) {
  Vec z(d);
  for (int i = 0; i < d; ++i) z(i) = (rng() >> 63) ? 1.0 : -1.0;
  return z;
}

std::size_t find_time(const std::vector<double>& times, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(times.back()));
  const auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    std::ostringstream os;
    os << "approximate: partition point " << t << " is not a sample time of the path";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(it - times.begin());
}

SamplePath finish(Path p, const SemimartingaleModel& m, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  SamplePath s;
  s.jump_mask.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) s.jump_mask[i] = p.is_jump(i);
  s.path = std::move(p);
  s.seed = seed;
  s.stream = stream;
  s.model = m.name();
  s.grid = n;
  return s;
}

}  // namespace

SemimartingaleModel SemimartingaleModel::brownian(int d, double sigma, double T) {
  return brownian(Mat::Identity(d, d) * sigma * sigma, T);
}

SemimartingaleModel SemimartingaleModel::brownian(const Mat& covariance, double T) {
  SemimartingaleModel m;
  m.kind = Kind::BrownianMotion;
  m.d = static_cast<int>(covariance.rows());
  m.T = T;
  m.diffusion = covariance;
  m.drift = Vec::Zero(m.d);
  m.jump_mean = Vec::Zero(m.d);
  m.jump_cov = Mat::Zero(m.d, m.d);
  m.validate();
  return m;
}

SemimartingaleModel SemimartingaleModel::levy(const Vec& drift, const Mat& diffusion, double intensity,
                                              const Vec& jump_mean, const Mat& jump_cov, double T, bool compensated) {
  SemimartingaleModel m;
  m.kind = Kind::LevyFinite;
  m.d = static_cast<int>(drift.size());
  m.T = T;
  m.drift = drift;
  m.diffusion = diffusion;
  m.intensity = intensity;
  m.jump_mean = jump_mean;
  m.jump_cov = jump_cov;
  m.compensated = compensated;
  m.validate();
  return m;
}

SemimartingaleModel SemimartingaleModel::random_walk(int d, StepLaw law, double scaling, double T) {
  SemimartingaleModel m = brownian(d, 0.0, T);
  m.kind = Kind::RandomWalk;
  m.step_law = law;
  m.scaling = scaling;
  m.validate();
  return m;
}

SemimartingaleModel SemimartingaleModel::null_array(const Vec& drift, double intensity, const Vec& jump_mean,
                                                    const Mat& jump_cov, double T) {
  SemimartingaleModel m = levy(drift, Mat::Zero(drift.size(), drift.size()), intensity, jump_mean, jump_cov, T);
  m.kind = Kind::NullArray;
  return m;
}

SemimartingaleModel SemimartingaleModel::martingale_clt(int d, double T) {
  SemimartingaleModel m = brownian(d, 0.0, T);
  m.kind = Kind::MartingaleCLT;
  m.step_law = StepLaw::Rademacher;
  return m;
}

Vec SemimartingaleModel::effective_drift() const {
  return compensated ? Vec(drift - intensity * jump_mean) : drift;
}

std::string SemimartingaleModel::name() const {
  switch (kind) {
    case Kind::BrownianMotion: return "brownian";
    case Kind::LevyFinite: return compensated ? "levy_compensated" : "levy";
    case Kind::RandomWalk: return "random_walk";
    case Kind::NullArray: return "null_array";
    case Kind::MartingaleCLT: return "martingale_clt";
  }
  return "unknown";
}

void SemimartingaleModel::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("model: dimension out of range");
  if (!(T > 0.0)) throw std::invalid_argument("model: horizon must be positive");
  if (drift.size() != d || jump_mean.size() != d) throw std::invalid_argument("model: drift/jump mean dimension");
  if (diffusion.rows() != d || !is_psd(diffusion)) {
    throw std::invalid_argument("model: diffusion matrix must be d x d positive semidefinite");
  }
  if (jump_cov.rows() != d || !is_psd(jump_cov)) {
    throw std::invalid_argument("model: jump covariance must be d x d positive semidefinite");
  }
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw std::invalid_argument("model: intensity must be >= 0");
  if (kind == Kind::NullArray && intensity * T > 1e12) throw std::invalid_argument("model: intensity too large");
  if (!(scaling >= 0.0)) throw std::invalid_argument("model: scaling must be >= 0");
}

std::vector<double> regular_grid(double T, std::size_t n) {
  if (n < 2) throw std::invalid_argument("regular_grid: need at least 2 points");
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(n - 1);
  t.back() = T;
  return t;
}

SamplePath simulate(const SemimartingaleModel& m, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  m.validate();
  const std::vector<double> grid = regular_grid(m.T, n);
  CounterRng rng(seed, stream);
  const int d = m.d;
  const Vec zero = Vec::Zero(d);
  const Mat jl = psd_sqrt(m.jump_cov);

  switch (m.kind) {
    case SemimartingaleModel::Kind::BrownianMotion:
    case SemimartingaleModel::Kind::LevyFinite: {
      std::vector<double> jump_times;
      std::vector<Vec> jumps;
      if (m.kind == SemimartingaleModel::Kind::LevyFinite && m.intensity > 0.0) {
        std::exponential_distribution<double> ex(m.intensity);
        for (double t = ex(rng); t < m.T; t += ex(rng)) {
          jump_times.push_back(t);
          jumps.push_back(m.jump_mean + jl * gaussian(rng, d));
        }
      }
      std::vector<double> times = grid;
      times.insert(times.end(), jump_times.begin(), jump_times.end());
      std::sort(times.begin(), times.end());
      times.erase(std::unique(times.begin(), times.end()), times.end());
      const Mat l = psd_sqrt(m.diffusion);
      const Vec b = m.effective_drift();
      Path p;
      p.times = times;
      p.horizon = m.T;
      p.values.push_back(zero);
      p.left.push_back(zero);
      std::size_t next = 0;
      for (std::size_t k = 1; k < times.size(); ++k) {
        const double dt = times[k] - times[k - 1];
        Vec left = p.values.back() + b * dt + l * gaussian(rng, d) * std::sqrt(dt);
        Vec value = left;
        if (next < jump_times.size() && jump_times[next] == times[k]) value += jumps[next++];
        p.left.push_back(std::move(left));
        p.values.push_back(std::move(value));
      }
      p.validate();
      return finish(std::move(p), m, n, seed, stream);
    }
    case SemimartingaleModel::Kind::RandomWalk:
    case SemimartingaleModel::Kind::NullArray:
    case SemimartingaleModel::Kind::MartingaleCLT: {
      std::vector<Vec> values{zero};
      std::bernoulli_distribution hit(std::min(1.0, m.intensity * m.T / static_cast<double>(n - 1)));
      const double pi = std::acos(-1.0);
      for (std::size_t k = 1; k < n; ++k) {
        const double dt = grid[k] - grid[k - 1];
        Vec step(d);
        if (m.kind == SemimartingaleModel::Kind::RandomWalk) {
          const Vec xi = m.step_law == SemimartingaleModel::StepLaw::Gaussian ? gaussian(rng, d) : rademacher(rng, d);
          step = m.scaling * std::sqrt(dt) * xi;
        } else if (m.kind == SemimartingaleModel::Kind::NullArray) {
          step = m.drift * dt;
          if (hit(rng)) step += m.jump_mean + jl * gaussian(rng, d);
        } else {
          // rotation angle is previsible, so steps stay martingale differences with covariance dt * Id
          step = std::sqrt(dt) * rademacher(rng, d);
          if (d >= 2) {
            const double th = values.back()(0) > 0.0 ? pi / 4.0 : 0.0;
            const double c = std::cos(th), s = std::sin(th);
            const double a = step(0), bb = step(1);
            step(0) = c * a - s * bb;
            step(1) = s * a + c * bb;
          }
        }
        values.push_back(values.back() + step);
      }
      Path p = Path::piecewise_constant(grid, std::move(values), m.T);
      return finish(std::move(p), m, n, seed, stream);
    }
  }
  throw std::logic_error("simulate: unknown model kind");
}

Path bracket(const Path& x) {
  x.validate();
  const int d = x.dim();
  Path b;
  b.times = x.times;
  b.horizon = x.horizon;
  Mat acc = Mat::Zero(d, d);
  auto flat = [d](const Mat& m) {
    Vec v(d * d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) v(i * d + j) = m(i, j);
    }
    return v;
  };
  b.values.push_back(flat(acc));
  b.left.push_back(flat(acc));
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Vec c = x.left[i] - x.values[i - 1];
    acc += c * c.transpose();
    b.left.push_back(flat(acc));
    const Vec j = x.values[i] - x.left[i];
    acc += j * j.transpose();
    b.values.push_back(flat(acc));
  }
  return b;
}

Mat bracket_at_end(const Path& x) {
  const Path b = bracket(x);
  const int d = x.dim();
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = b.values.back()(i * d + j);
  }
  return m;
}

Path jump_truncate(const Path& x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("jump_truncate: delta must be positive");
  x.validate();
  Path r = x;
  Vec shift = Vec::Zero(x.dim());
  for (std::size_t i = 1; i < x.size(); ++i) {
    r.left[i] = x.left[i] + shift;
    if (x.is_jump(i)) {
      const Vec j = x.values[i] - x.left[i];
      const double n = j.norm();
      if (n > delta) shift -= (1.0 - delta / n) * j;
    }
    r.values[i] = x.values[i] + shift;
  }
  return r;
}

SamplePath jump_truncate(const SamplePath& x, double delta) {
  SamplePath r = x;
  r.path = jump_truncate(x.path, delta);
  return r;
}

ApproxScheme ApproxScheme::piecewise_constant(std::vector<double> partition) {
  ApproxScheme s;
  s.kind = Kind::PiecewiseConstant;
  s.partition = std::move(partition);
  return s;
}

ApproxScheme ApproxScheme::phi_interp(std::vector<double> partition, PathFunction phi) {
  ApproxScheme s;
  s.kind = Kind::PhiInterp;
  s.partition = std::move(partition);
  s.phi = std::move(phi);
  return s;
}

Path approximate(const Path& x, const ApproxScheme& scheme) {
  x.validate();
  const auto& d = scheme.partition;
  if (d.empty() || d.front() != 0.0) throw std::invalid_argument("approximate: partition must start at 0");
  std::vector<double> times;
  std::vector<Vec> values;
  for (double t : d) {
    const std::size_t k = find_time(x.times, t);
    if (!times.empty() && !(x.times[k] > times.back())) {
      throw std::invalid_argument("approximate: partition must be strictly increasing");
    }
    times.push_back(x.times[k]);
    values.push_back(x.values[k]);
  }
  if (scheme.kind == ApproxScheme::Kind::PiecewiseConstant) {
    return Path::piecewise_constant(std::move(times), std::move(values), x.horizon);
  }
  if (!scheme.phi) throw std::invalid_argument("approximate: phi_interp needs a path function");
  const PathFunction& phi = *scheme.phi;
  std::vector<double> ts{times[0]};
  std::vector<Vec> vs{values[0]};
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double t0 = times[n - 1], h = times[n] - t0;
    if (!phi.in_domain(values[n - 1], values[n])) {
      std::ostringstream os;
      os << "approximate: cell ending at t=" << times[n] << " outside the domain of " << phi.name();
      throw std::domain_error(os.str());
    }
    for (auto& [s, v] : phi.vertices(values[n] - values[n - 1])) {
      const double t = s >= 1.0 ? times[n] : t0 + s * h;
      if (!(t > ts.back())) continue;
      ts.push_back(t);
      vs.push_back(s >= 1.0 ? values[n] : Vec(values[n - 1] + v));
    }
  }
  return Path::polyline(std::move(ts), std::move(vs), x.horizon);
}

std::vector<double> coarse_partition(double T, std::size_t n, std::size_t cells) {
  if (cells == 0 || (n - 1) % cells != 0) throw std::invalid_argument("coarse_partition: cells must divide n - 1");
  const std::vector<double> g = regular_grid(T, n);
  const std::size_t m = (n - 1) / cells;
  std::vector<double> out;
  for (std::size_t k = 0; k < n; k += m) out.push_back(g[k]);
  return out;
}

double ucv_surrogate(const SemimartingaleModel& model, const std::vector<std::size_t>& grids, std::size_t samples,
                     std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("ucv_surrogate: need samples");
  double sup = 0.0;
  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    double acc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const SamplePath sp = simulate(model, grids[gi], seed, gi * samples + s);
      acc += bracket_at_end(sp.path).trace();
    }
    const double k1 = model.effective_drift().norm() * model.T;
    sup = std::max(sup, acc / static_cast<double>(samples) + k1);
  }
  return sup;
}

}  // namespace crp
