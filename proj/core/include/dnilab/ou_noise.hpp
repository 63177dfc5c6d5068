#pragma once

// Ornstein-Uhlenbeck dephasing: H(t) = xi(t) sigma_z, so the coherence
// <0|rho|1> picks up exp(-i Phi) with Phi = 2 int xi.

#include <cstdint>
#include <span>
#include <vector>

#include "dnilab/engine.hpp"
#include "dnilab/model_params.hpp"

namespace dnilab::models {

/// One noise realization on the refined substep grid.
struct NoisePath {
  std::vector<double> times;   ///< strictly increasing, starts at 0
  std::vector<double> values;  ///< xi(times[i])
  std::vector<double> phase;   ///< int_0^times[i] xi (trapezoidal)
  std::vector<std::size_t> marks;  ///< index in `times` of each requested grid time
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Substep bound min(tau_c, 1/gamma) / 50.
double ou_substep(const OUNoiseParams& params);

/// Samples xi on [0, max(grid)]. Every interval between consecutive requested
/// times is split into equal substeps no longer than ou_substep(), so the
/// draws on [0, t] do not depend on requested times beyond t. Deterministic in
/// (params, grid, seed, stream). Throws std::invalid_argument for tau_c = 0 or
/// a decreasing / negative grid.
NoisePath ou_sample_path(const OUNoiseParams& params, std::span<const double> grid,
                         std::uint64_t seed, std::uint64_t stream = 0);

struct GaussianMoments {
  double v1 = 0.0;  ///< Var 2 int_0^t xi
  double v2 = 0.0;  ///< Var 2 int_t^{t+tau} xi
  double c = 0.0;   ///< covariance of the two
};

GaussianMoments ou_gaussian_moments(const OUNoiseParams& params, double t, double tau);

/// Covariance matrix of Phi_k = 2 int_{t_{k-1}}^{t_k} xi for consecutive
/// intervals of the sequence 0 = t_0 <= t_1 <= ... (times excludes t_0).
Eigen::MatrixXd ou_phase_covariance(const OUNoiseParams& params, std::span<const double> times);

struct CoherenceEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Averages per-path unitary dephasing over sampled noise paths. Paths are
/// reduced in fixed chunks, so results do not depend on the thread count.
class OUMonteCarloEngine final : public EvolutionEngine {
 public:
  OUMonteCarloEngine(OUNoiseParams params, std::size_t paths = 100000, std::uint64_t seed = 0,
                     unsigned threads = 0);

  EngineKind kind() const override { return EngineKind::ou_monte_carlo; }
  std::string describe() const override;
  bool is_stochastic() const override { return true; }
  ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const override;
  OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                std::span<const MeasurementStep> steps) const override;
  std::optional<double> analytic_coherence(double t) const override;

  /// Re E[exp(-i Phi(t))] at each requested time, from one set of paths.
  std::vector<CoherenceEstimate> coherence(std::span<const double> times) const;
  /// Single-path propagation of a 2x2 operator.
  ComplexMatrix propagate_path(const ComplexMatrix& rho, double t, std::uint64_t stream) const;

  const OUNoiseParams& params() const { return params_; }
  std::size_t paths() const { return paths_; }
  std::uint64_t seed() const { return seed_; }

  static constexpr std::size_t kChunk = 1024;

 private:
  OUNoiseParams params_;
  std::size_t paths_;
  std::uint64_t seed_;
  unsigned threads_;
};

/// Exact Gaussian average: each interval factor is a trigonometric polynomial
/// in its phase, so a sequence probability is a finite sum of
/// exp(-k^T Sigma k / 2) with k in {-1, 0, 1}^steps.
class OUGaussianEngine final : public EvolutionEngine {
 public:
  explicit OUGaussianEngine(OUNoiseParams params);

  EngineKind kind() const override { return EngineKind::ou_gaussian_exact; }
  std::string describe() const override;
  ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const override;
  OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                std::span<const MeasurementStep> steps) const override;
  std::optional<double> analytic_coherence(double t) const override;

  const OUNoiseParams& params() const { return params_; }

  static constexpr std::size_t kMaxSteps = 10;

 private:
  OUNoiseParams params_;
};

}  // namespace dnilab::models
