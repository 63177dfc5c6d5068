#include "dnilab/ou_noise.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dnilab/detail/qubit_chain.hpp"
#include "dnilab/parallel.hpp"

namespace dnilab::models {

namespace {

/// SplitMix64 stream. The state of path `stream` is a hash of (seed, stream),
/// so paths can be generated in any order and setup costs nothing.
class PathRng {
 public:
  using result_type = std::uint64_t;

  PathRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

PathRng path_rng(std::uint64_t seed, std::uint64_t stream) { return {seed, stream}; }

/// Variance of int xi over an interval of length u.
double interval_variance(const OUNoiseParams& p, double u) {
  if (u <= 0.0) return 0.0;
  if (p.tau_c == 0.0) return p.gamma * u;
  return p.gamma * (u + p.tau_c * std::expm1(-u / p.tau_c));
}

/// Cov(int_a^b xi, int_c^d xi)
double interval_covariance(const OUNoiseParams& p, double a, double b, double c, double d) {
  return 0.5 * (interval_variance(p, std::abs(d - a)) + interval_variance(p, std::abs(c - b)) -
                interval_variance(p, std::abs(c - a)) - interval_variance(p, std::abs(d - b)));
}

void check_grid(std::span<const double> grid) {
  double last = 0.0;
  for (double t : grid) {
    if (!std::isfinite(t) || t < last) {
      throw std::invalid_argument("OU path: grid times must be finite, nonnegative, nondecreasing");
    }
    last = t;
  }
}

/// Precomputed substep layout for one grid.
class PathSampler {
 public:
  PathSampler(const OUNoiseParams& p, std::span<const double> grid) {
    validate(p);
    if (p.tau_c == 0.0) {
      throw std::invalid_argument(
          "OU path: tau_c = 0 has no sampled paths; use the Markov dephasing engine");
    }
    check_grid(grid);
    const double hmax = ou_substep(p);
    const double stationary = p.gamma / (2.0 * p.tau_c);
    sd0_ = std::sqrt(stationary);
    double prev = 0.0;
    for (double t : grid) {
      Interval iv;
      const double span = t - prev;
      if (span > 0.0) {
        iv.substeps = static_cast<std::size_t>(std::ceil(span / hmax));
        iv.h = span / static_cast<double>(iv.substeps);
        iv.decay = std::exp(-iv.h / p.tau_c);
        iv.kick = std::sqrt(stationary * -std::expm1(-2.0 * iv.h / p.tau_c));
      }
      total_substeps_ += iv.substeps;
      intervals_.push_back(iv);
      prev = t;
    }
  }

  /// Phase int_0^t xi at each grid time; optionally records the full path.
  void sample(PathRng& rng, std::span<double> phase, NoisePath* full = nullptr) const {
    std::normal_distribution<double> normal;
    double xi = sd0_ * normal(rng);
    double phi = 0.0;
    if (full) {
      full->times.reserve(total_substeps_ + 1);
      full->values.reserve(total_substeps_ + 1);
      full->phase.reserve(total_substeps_ + 1);
      full->times.push_back(0.0);
      full->values.push_back(xi);
      full->phase.push_back(0.0);
    }
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      const Interval& iv = intervals_[i];
      for (std::size_t s = 0; s < iv.substeps; ++s) {
        const double next = xi * iv.decay + iv.kick * normal(rng);
        phi += 0.5 * iv.h * (xi + next);
        xi = next;
        if (full) {
          full->times.push_back(full->times.back() + iv.h);
          full->values.push_back(xi);
          full->phase.push_back(phi);
        }
      }
      phase[i] = phi;
      if (full) full->marks.push_back(full->times.size() - 1);
    }
  }

 private:
  struct Interval {
    std::size_t substeps = 0;
    double h = 0.0;
    double decay = 1.0;
    double kick = 0.0;
  };
  std::vector<Interval> intervals_;
  std::size_t total_substeps_ = 0;
  double sd0_ = 0.0;
};

}  // namespace

double ou_substep(const OUNoiseParams& params) {
  validate(params);
  const double scale = params.tau_c > 0.0 ? std::min(params.tau_c, 1.0 / params.gamma)
                                          : 1.0 / params.gamma;
  return scale / 50.0;
}

NoisePath ou_sample_path(const OUNoiseParams& params, std::span<const double> grid,
                         std::uint64_t seed, std::uint64_t stream) {
  const PathSampler sampler(params, grid);
  NoisePath path;
  path.seed = seed;
  path.stream = stream;
  std::vector<double> phase(grid.size());
  auto rng = path_rng(seed, stream);
  sampler.sample(rng, phase, &path);
  return path;
}

GaussianMoments ou_gaussian_moments(const OUNoiseParams& params, double t, double tau) {
  validate(params);
  if (!(t >= 0.0) || !(tau >= 0.0)) {
    throw std::invalid_argument("ou_gaussian_moments: t and tau must be nonnegative");
  }
  GaussianMoments m;
  m.v1 = 4.0 * interval_variance(params, t);
  m.v2 = 4.0 * interval_variance(params, tau);
  m.c = 4.0 * interval_covariance(params, 0.0, t, t, t + tau);
  return m;
}

Eigen::MatrixXd ou_phase_covariance(const OUNoiseParams& params, std::span<const double> times) {
  validate(params);
  check_grid(times);
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = i == 0 ? 0.0 : times[static_cast<std::size_t>(i - 1)];
    const double b = times[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = j == 0 ? 0.0 : times[static_cast<std::size_t>(j - 1)];
      const double d = times[static_cast<std::size_t>(j)];
      cov(i, j) = cov(j, i) = 4.0 * interval_covariance(params, a, b, c, d);
    }
  }
  return cov;
}

// ---------------------------------------------------------------------------

OUMonteCarloEngine::OUMonteCarloEngine(OUNoiseParams params, std::size_t paths,
                                       std::uint64_t seed, unsigned threads)
    : params_(params), paths_(paths), seed_(seed), threads_(threads) {
  validate(params_);
  if (params_.tau_c == 0.0) {
    throw std::invalid_argument("OU Monte Carlo: tau_c must be positive");
  }
  if (paths_ < 2) throw std::invalid_argument("OU Monte Carlo: at least two paths required");
}

std::string OUMonteCarloEngine::describe() const {
  std::ostringstream os;
  os << "ou_monte_carlo(gamma=" << params_.gamma << ", tau_c=" << params_.tau_c
     << ", paths=" << paths_ << ", seed=" << seed_ << ")";
  return os.str();
}

std::optional<double> OUMonteCarloEngine::analytic_coherence(double t) const {
  return analytic_d(params_, t);
}

ComplexMatrix OUMonteCarloEngine::propagate_path(const ComplexMatrix& rho, double t,
                                                 std::uint64_t stream) const {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("propagate_path: 2x2 operator expected");
  }
  const double grid[] = {t};
  const PathSampler sampler(params_, grid);
  double phase[1];
  auto rng = path_rng(seed_, stream);
  sampler.sample(rng, phase);
  const double big_phi = 2.0 * phase[0];
  return detail::rotate_coherence(rho, {std::cos(big_phi), -std::sin(big_phi)});
}

namespace {

/// Sums of f(path) and f(path)^2 over all paths, chunked for a deterministic
/// reduction. f writes `width` values per path.
template <class PerPath>
void chunked_moments(std::size_t paths, unsigned threads, std::size_t width, std::size_t chunk,
                     PerPath&& per_path, std::vector<double>& mean, std::vector<double>& se) {
  const std::size_t chunks = (paths + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::vector<double> acc(2 * width, 0.0);
    std::vector<double> values(width);
    const std::size_t end = std::min(paths, (c + 1) * chunk);
    for (std::size_t path = c * chunk; path < end; ++path) {
      std::fill(values.begin(), values.end(), 0.0);
      per_path(path, values);
      for (std::size_t i = 0; i < width; ++i) {
        acc[i] += values[i];
        acc[width + i] += values[i] * values[i];
      }
    }
    partial[c] = std::move(acc);
  });
  std::vector<double> total(2 * width, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += acc[i];
  }
  const auto n = static_cast<double>(paths);
  mean.assign(width, 0.0);
  se.assign(width, 0.0);
  for (std::size_t i = 0; i < width; ++i) {
    mean[i] = total[i] / n;
    const double var = std::max(0.0, (total[width + i] / n - mean[i] * mean[i]) * n / (n - 1.0));
    se[i] = std::sqrt(var / n);
  }
}

}  // namespace

std::vector<CoherenceEstimate> OUMonteCarloEngine::coherence(std::span<const double> times) const {
  const PathSampler sampler(params_, times);
  std::vector<double> mean;
  std::vector<double> se;
  chunked_moments(
      paths_, threads_, times.size(), kChunk,
      [&](std::size_t path, std::vector<double>& out) {
        auto rng = path_rng(seed_, path);
        sampler.sample(rng, out);
        for (double& phi : out) phi = std::cos(2.0 * phi);
      },
      mean, se);
  std::vector<CoherenceEstimate> result(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) result[i] = {mean[i], se[i]};
  return result;
}

ComplexMatrix OUMonteCarloEngine::evolve_system(const ComplexMatrix& rho, double t) const {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("evolve_system: 2x2 operator expected");
  }
  const double grid[] = {t};
  const PathSampler sampler(params_, grid);
  std::vector<double> mean;
  std::vector<double> se;
  chunked_moments(
      paths_, threads_, 2, kChunk,
      [&](std::size_t path, std::vector<double>& out) {
        double phase[1];
        auto rng = path_rng(seed_, path);
        sampler.sample(rng, phase);
        out[0] = std::cos(2.0 * phase[0]);
        out[1] = -std::sin(2.0 * phase[0]);
      },
      mean, se);
  return detail::rotate_coherence(rho, {mean[0], mean[1]});
}

OutcomeTable OUMonteCarloEngine::measure_sequence(const ComplexMatrix& rho0,
                                                  std::span<const MeasurementStep> steps) const {
  validate_sequence(rho0, steps);
  OutcomeTable table;
  table.steps = steps.size();
  const std::size_t width = std::size_t{1} << steps.size();
  if (steps.empty()) {
    table.probability = {rho0.trace().real()};
    table.standard_error = {0.0};
    return table;
  }
  std::vector<double> times;
  for (const auto& s : steps) times.push_back(s.time);
  const PathSampler sampler(params_, times);
  chunked_moments(
      paths_, threads_, width, kChunk,
      [&](std::size_t path, std::vector<double>& out) {
        std::vector<double> phase(steps.size());
        auto rng = path_rng(seed_, path);
        sampler.sample(rng, phase);
        double prev = 0.0;
        for (double& phi : phase) {
          const double cumulative = phi;
          phi = 2.0 * (cumulative - prev);
          prev = cumulative;
        }
        detail::accumulate_dephased_chain(rho0, steps, phase, 1.0, out);
      },
      table.probability, table.standard_error);
  return table;
}

// ---------------------------------------------------------------------------

OUGaussianEngine::OUGaussianEngine(OUNoiseParams params) : params_(params) { validate(params_); }

std::string OUGaussianEngine::describe() const {
  std::ostringstream os;
  os << "ou_gaussian_exact(gamma=" << params_.gamma << ", tau_c=" << params_.tau_c << ")";
  return os.str();
}

std::optional<double> OUGaussianEngine::analytic_coherence(double t) const {
  return analytic_d(params_, t);
}

ComplexMatrix OUGaussianEngine::evolve_system(const ComplexMatrix& rho, double t) const {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("evolve_system: 2x2 operator expected");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_system: t must be nonnegative");
  return detail::rotate_coherence(rho, std::exp(-2.0 * interval_variance(params_, t)));
}

OutcomeTable OUGaussianEngine::measure_sequence(const ComplexMatrix& rho0,
                                                std::span<const MeasurementStep> steps) const {
  validate_sequence(rho0, steps);
  if (steps.size() > kMaxSteps) {
    throw std::invalid_argument("OU Gaussian engine: at most " + std::to_string(kMaxSteps) +
                                " measurements per sequence");
  }
  const std::size_t L = steps.size();
  OutcomeTable table;
  table.steps = L;
  table.probability.assign(std::size_t{1} << L, 0.0);
  table.standard_error.assign(table.probability.size(), 0.0);
  if (L == 0) {
    table.probability[0] = rho0.trace().real();
    return table;
  }
  std::vector<double> times;
  for (const auto& s : steps) times.push_back(s.time);
  const Eigen::MatrixXd cov = ou_phase_covariance(params_, times);

  // Characteristic function exp(-k^T Sigma k / 2) for every k in {-1,0,1}^L,
  // k encoded in base 3 with digit 0 -> 0, 1 -> -1 (e^{-i Phi}), 2 -> +1.
  std::size_t terms = 1;
  for (std::size_t i = 0; i < L; ++i) terms *= 3;
  std::vector<double> characteristic(terms);
  Eigen::VectorXd k(static_cast<Eigen::Index>(L));
  for (std::size_t code = 0; code < terms; ++code) {
    std::size_t rest = code;
    for (std::size_t i = 0; i < L; ++i) {
      const std::size_t digit = rest % 3;
      rest /= 3;
      k(static_cast<Eigen::Index>(i)) = digit == 0 ? 0.0 : (digit == 1 ? 1.0 : -1.0);
    }
    characteristic[code] = std::exp(-0.5 * k.dot(cov * k));
  }

  std::vector<detail::PhaseFactor> factors(L);
  for (std::size_t index = 0; index < table.probability.size(); ++index) {
    const ComplexMatrix* prev = &rho0;
    for (std::size_t i = 0; i < L; ++i) {
      const auto o = ((index >> i) & 1U) ? meas::Outcome::minus : meas::Outcome::plus;
      const ComplexMatrix& e = steps[i].observable.projector(o);
      factors[i] = detail::phase_factor(e, *prev);
      prev = &e;
    }
    qmath::Complex sum = 0.0;
    for (std::size_t code = 0; code < terms; ++code) {
      qmath::Complex coef = 1.0;
      std::size_t rest = code;
      for (std::size_t i = 0; i < L && coef != 0.0; ++i) {
        const std::size_t digit = rest % 3;
        rest /= 3;
        coef *= digit == 0 ? factors[i].constant
                           : (digit == 1 ? factors[i].minus : factors[i].plus);
      }
      sum += coef * characteristic[code];
    }
    table.probability[index] = sum.real();
  }
  return table;
}

}  // namespace dnilab::models
