#pragma once

// Evolution engines: propagate a measured qubit (and, where present, its
// environment) between projective measurements.
//
// Every engine evaluates full measurement sequences. A sequence is a list of
// (time, observable) steps applied to an initial system state at time 0; the
// result holds the joint probability of every outcome string. Between steps
// the underlying dynamics is the same semigroup whatever was measured before.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnilab/measurement.hpp"
#include "dnilab/model_params.hpp"
#include "dnilab/qmath.hpp"

namespace dnilab::models {

using qmath::ComplexMatrix;

enum class EngineKind {
  ou_monte_carlo,
  ou_gaussian_exact,
  spin_bath,
  spin_bath_dense,
  dissipative_structured,
  dissipative_dense,
  general_lindblad,
  markov_dephasing,
};

std::string to_string(EngineKind kind);

struct MeasurementStep {
  double time = 0.0;
  meas::DichotomicObservable observable;
};

/// Joint outcome probabilities of a measurement sequence. Entry `index` has bit
/// k set when step k returned -1 (step 0 is the least significant bit).
struct OutcomeTable {
  std::size_t steps = 0;
  std::vector<double> probability;
  std::vector<double> standard_error;  ///< zero for deterministic engines

  double at(std::span<const meas::Outcome> outcomes) const;
  double total() const;
};

std::size_t outcome_index(std::span<const meas::Outcome> outcomes);

class EvolutionEngine {
 public:
  virtual ~EvolutionEngine() = default;

  virtual EngineKind kind() const = 0;
  virtual std::string describe() const = 0;
  virtual bool is_stochastic() const { return false; }
  virtual bool is_bipartite() const { return false; }

  /// Reduced system propagator Lambda_{t,0} applied to a 2x2 operator. Linear,
  /// so it accepts non-Hermitian inputs (used for tomography).
  virtual ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const = 0;

  /// Joint outcome distribution of the sequence; step times must be
  /// nondecreasing and nonnegative.
  virtual OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                        std::span<const MeasurementStep> steps) const = 0;

  /// Closed-form coherence decay d(t), when the model has one.
  virtual std::optional<double> analytic_coherence(double t) const;

 protected:
  static void validate_sequence(const ComplexMatrix& rho0, std::span<const MeasurementStep> steps);
};

/// System (qubit) coupled to an explicit environment with a time-homogeneous
/// bipartite propagator G_dt.
class BipartiteEngine : public EvolutionEngine {
 public:
  bool is_bipartite() const override { return true; }

  virtual std::size_t env_dim() const = 0;
  virtual ComplexMatrix env_initial_state() const = 0;

  /// G_dt applied to a joint (system kron environment) operator. Linear in the
  /// input and a semigroup in dt. Throws std::invalid_argument on dimension
  /// mismatch or dt < 0.
  virtual ComplexMatrix propagate(const ComplexMatrix& joint, double dt) const = 0;

  /// propagate() on a validated joint state.
  qmath::DensityMatrix propagate(const qmath::DensityMatrix& joint, double dt) const;

  ComplexMatrix evolve_system(const ComplexMatrix& rho, double t) const override;
  OutcomeTable measure_sequence(const ComplexMatrix& rho0,
                                std::span<const MeasurementStep> steps) const override;

  std::size_t joint_dim() const { return 2 * env_dim(); }
  /// Tr_e
  ComplexMatrix reduce_to_system(const ComplexMatrix& joint) const;
  /// Tr_s
  ComplexMatrix reduce_to_env(const ComplexMatrix& joint) const;
  /// (a kron I_e) X (b kron I_e)
  ComplexMatrix apply_system_sandwich(const ComplexMatrix& a, const ComplexMatrix& joint,
                                      const ComplexMatrix& b) const;

 protected:
  void check_joint(const ComplexMatrix& joint, double dt) const;
};

/// Tomographic reconstruction of Lambda_{t,0} for any engine.
qmath::Superoperator system_propagator(const EvolutionEngine& engine, double t);

/// Reduced system state of a bipartite state (factor 0 kept).
qmath::DensityMatrix reduced_state(const qmath::DensityMatrix& bipartite, std::size_t system_dim,
                                   std::size_t env_dim);

}  // namespace dnilab::models
