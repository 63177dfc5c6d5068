#pragma once

// Concrete deterministic engines: Markov dephasing, spin bath, the
// non-diagonal dissipative model and a generic bipartite Lindblad engine.

#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "dnilab/engine.hpp"
#include "dnilab/model_params.hpp"

namespace dnilab::models {

/// Single-qubit dephasing semigroup; the environment is trivial (dimension 1).
class MarkovDephasingEngine final : public BipartiteEngine {
 public:
  explicit MarkovDephasingEngine(MarkovDephasingParams params);

  EngineKind kind() const override { return EngineKind::markov_dephasing; }
  std::string describe() const override;
  std::size_t env_dim() const override { return 1; }
  ComplexMatrix env_initial_state() const override;
  ComplexMatrix propagate(const ComplexMatrix& joint, double dt) const override;
  std::optional<double> analytic_coherence(double t) const override;

  const MarkovDephasingParams& params() const { return params_; }

 private:
  MarkovDephasingParams params_;
};

enum class SpinBathPath { structured, dense };

/// H = g sigma_z kron sum_j sigma_z^(j). The structured path uses that H is
/// diagonal in the computational basis: measurement sequences are a mixture
/// over environment magnetization sectors of pure system dephasing, and joint
/// propagation is an element-wise phase. The dense path exponentiates H.
class SpinBathEngine final : public BipartiteEngine {
 public:
  /// Environment spins start maximally mixed.
  explicit SpinBathEngine(SpinBathParams params, SpinBathPath path = SpinBathPath::structured);
  /// Explicit environment state (2^n x 2^n). The structured path requires it
  /// to be diagonal.
  SpinBathEngine(SpinBathParams params, ComplexMatrix env_state, SpinBathPath path);

  EngineKind kind() const override;
  std::string describe() const override;
  std::size_t env_dim() const override { return std::size_t{1} << params_.n; }
  ComplexMatrix env_initial_state() const override;
  ComplexMatrix propagate(const ComplexMatrix& joint, double dt) const override;
  ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const override;
  OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                std::span<const MeasurementStep> steps) const override;
  std::optional<double> analytic_coherence(double t) const override;

  const SpinBathParams& params() const { return params_; }
  SpinBathPath path() const { return path_; }
  /// Environment weight of each magnetization n - 2k, indexed by k.
  const std::vector<double>& sector_weights() const { return sector_weights_; }

 private:
  ComplexMatrix hamiltonian() const;
  ComplexMatrix unitary(double dt) const;

  SpinBathParams params_;
  SpinBathPath path_;
  bool default_env_ = true;
  std::optional<ComplexMatrix> env_state_;
  std::vector<double> sector_weights_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, ComplexMatrix> unitary_cache_;
};

enum class DissipativePath { structured, dense };

/// Lindblad generator sum_jk Gamma_jk (A_j X A_k^dagger - 1/2 {A_k^dagger A_j, X})
/// plus -i[H, X], as a superoperator on column-stacked operators.
qmath::Superoperator lindbladian(const ComplexMatrix& hamiltonian,
                                 std::span<const ComplexMatrix> operators,
                                 const ComplexMatrix& rates);

/// Non-diagonal multipartite dephasing. Environment qubits start maximally
/// mixed. The structured path multiplies each joint matrix element by
/// exp(rate_ab dt), rates derived once from Gamma and the sigma_z bitstrings;
/// the dense path exponentiates the full Liouvillian (n <= 4). Since the
/// environment stays diagonal under system measurements, structured
/// measurement sequences are a uniform mixture over environment bitstrings of
/// single-qubit coherence decay.
class DissipativeEngine final : public BipartiteEngine {
 public:
  explicit DissipativeEngine(DissipativeParams params,
                             DissipativePath path = DissipativePath::structured);

  EngineKind kind() const override;
  std::string describe() const override;
  std::size_t env_dim() const override { return std::size_t{1} << (params_.n - 1); }
  ComplexMatrix env_initial_state() const override;
  ComplexMatrix propagate(const ComplexMatrix& joint, double dt) const override;
  ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const override;
  OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                std::span<const MeasurementStep> steps) const override;
  std::optional<double> analytic_coherence(double t) const override;

  const DissipativeParams& params() const { return params_; }
  /// Element-wise decay rates of the joint state in the sigma_z basis.
  const ComplexMatrix& element_rates() const { return rates_; }
  qmath::Superoperator liouvillian() const;

 private:
  ComplexMatrix propagator(double dt) const;

  DissipativeParams params_;
  DissipativePath path_;
  ComplexMatrix rates_;
  std::vector<qmath::Complex> coherence_rates_;  ///< rate of <0,e|X|1,e> per env bitstring e
  ComplexMatrix liouvillian_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, ComplexMatrix> propagator_cache_;
};

struct JumpOperator {
  double rate = 0.0;
  ComplexMatrix op;
};

/// H_se and jump operators on the joint system kron environment space.
struct GeneralLindbladSpec {
  ComplexMatrix hamiltonian;
  std::vector<JumpOperator> jump_operators;
};

/// Dense engine for an arbitrary bipartite Lindblad generator.
class GeneralLindbladEngine final : public BipartiteEngine {
 public:
  GeneralLindbladEngine(GeneralLindbladSpec spec, ComplexMatrix env_state);

  EngineKind kind() const override { return EngineKind::general_lindblad; }
  std::string describe() const override;
  std::size_t env_dim() const override { return static_cast<std::size_t>(env_state_.rows()); }
  ComplexMatrix env_initial_state() const override { return env_state_; }
  ComplexMatrix propagate(const ComplexMatrix& joint, double dt) const override;

  static constexpr std::size_t kMaxJointDim = 32;

 private:
  ComplexMatrix propagator(double dt) const;

  GeneralLindbladSpec spec_;
  ComplexMatrix env_state_;
  ComplexMatrix liouvillian_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, ComplexMatrix> propagator_cache_;
};

}  // namespace dnilab::models
