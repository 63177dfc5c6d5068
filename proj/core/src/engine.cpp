#include "dnilab/engine.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace dnilab::models {

std::string to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::ou_monte_carlo: return "ou_monte_carlo";
    case EngineKind::ou_gaussian_exact: return "ou_gaussian_exact";
    case EngineKind::spin_bath: return "spin_bath";
    case EngineKind::spin_bath_dense: return "spin_bath_dense";
    case EngineKind::dissipative_structured: return "dissipative_structured";
    case EngineKind::dissipative_dense: return "dissipative_dense";
    case EngineKind::general_lindblad: return "general_lindblad";
    case EngineKind::markov_dephasing: return "markov_dephasing";
  }
  return "unknown";
}

std::size_t outcome_index(std::span<const meas::Outcome> outcomes) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) index |= meas::bit(outcomes[k]) << k;
  return index;
}

double OutcomeTable::at(std::span<const meas::Outcome> outcomes) const {
  if (outcomes.size() != steps) throw std::invalid_argument("OutcomeTable::at: wrong arity");
  return probability.at(outcome_index(outcomes));
}

double OutcomeTable::total() const {
  return std::accumulate(probability.begin(), probability.end(), 0.0);
}

std::optional<double> EvolutionEngine::analytic_coherence(double) const { return std::nullopt; }

void EvolutionEngine::validate_sequence(const ComplexMatrix& rho0,
                                        std::span<const MeasurementStep> steps) {
  if (rho0.rows() != 2 || rho0.cols() != 2) {
    throw std::invalid_argument("measure_sequence: initial system state must be 2x2");
  }
  double last = 0.0;
  for (const auto& s : steps) {
    if (!std::isfinite(s.time) || s.time < last) {
      throw std::invalid_argument("measure_sequence: step times must be nondecreasing and >= 0");
    }
    last = s.time;
  }
}

void BipartiteEngine::check_joint(const ComplexMatrix& joint, double dt) const {
  const auto d = static_cast<Eigen::Index>(joint_dim());
  if (joint.rows() != d || joint.cols() != d) {
    throw std::invalid_argument("propagate: joint operator has dimension " +
                                std::to_string(joint.rows()) + ", engine expects " +
                                std::to_string(d));
  }
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("propagate: dt must be finite and nonnegative");
  }
}

qmath::DensityMatrix BipartiteEngine::propagate(const qmath::DensityMatrix& joint,
                                                double dt) const {
  qmath::Tolerances loose;
  loose.herm = loose.trace = 1e-8;
  return qmath::DensityMatrix::from_matrix(propagate(joint.matrix(), dt), loose);
}

ComplexMatrix BipartiteEngine::reduce_to_system(const ComplexMatrix& joint) const {
  const auto de = static_cast<Eigen::Index>(env_dim());
  ComplexMatrix out(2, 2);
  for (Eigen::Index s = 0; s < 2; ++s)
    for (Eigen::Index t = 0; t < 2; ++t) out(s, t) = joint.block(s * de, t * de, de, de).trace();
  return out;
}

ComplexMatrix BipartiteEngine::reduce_to_env(const ComplexMatrix& joint) const {
  const auto de = static_cast<Eigen::Index>(env_dim());
  return joint.block(0, 0, de, de) + joint.block(de, de, de, de);
}

ComplexMatrix BipartiteEngine::apply_system_sandwich(const ComplexMatrix& a,
                                                     const ComplexMatrix& joint,
                                                     const ComplexMatrix& b) const {
  const auto de = static_cast<Eigen::Index>(env_dim());
  // (a kron I) X: mix row blocks, then X (b kron I): mix column blocks
  ComplexMatrix left(2 * de, 2 * de);
  for (Eigen::Index i = 0; i < 2; ++i) {
    left.middleRows(i * de, de) =
        a(i, 0) * joint.middleRows(0, de) + a(i, 1) * joint.middleRows(de, de);
  }
  ComplexMatrix out(2 * de, 2 * de);
  for (Eigen::Index j = 0; j < 2; ++j) {
    out.middleCols(j * de, de) =
        b(0, j) * left.middleCols(0, de) + b(1, j) * left.middleCols(de, de);
  }
  return out;
}

ComplexMatrix BipartiteEngine::evolve_system(const ComplexMatrix& rho, double t) const {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("evolve_system: 2x2 operator expected");
  }
  return reduce_to_system(propagate(qmath::kron(rho, env_initial_state()), t));
}

OutcomeTable BipartiteEngine::measure_sequence(const ComplexMatrix& rho0,
                                               std::span<const MeasurementStep> steps) const {
  validate_sequence(rho0, steps);
  OutcomeTable table;
  table.steps = steps.size();
  table.probability.assign(std::size_t{1} << steps.size(), 0.0);
  table.standard_error.assign(table.probability.size(), 0.0);
  if (steps.empty()) {
    table.probability[0] = rho0.trace().real();
    return table;
  }

  std::function<void(const ComplexMatrix&, std::size_t, double, std::size_t)> branch =
      [&](const ComplexMatrix& joint, std::size_t k, double now, std::size_t index) {
        const ComplexMatrix evolved = propagate(joint, steps[k].time - now);
        const bool last = k + 1 == steps.size();
        const ComplexMatrix reduced = last ? reduce_to_system(evolved) : ComplexMatrix();
        for (auto o : meas::kOutcomes) {
          const ComplexMatrix& e = steps[k].observable.projector(o);
          const std::size_t next = index | (meas::bit(o) << k);
          if (last) {
            table.probability[next] = (e * reduced).trace().real();
          } else {
            branch(apply_system_sandwich(e, evolved, e), k + 1, steps[k].time, next);
          }
        }
      };
  branch(qmath::kron(rho0, env_initial_state()), 0, 0.0, 0);
  return table;
}

qmath::Superoperator system_propagator(const EvolutionEngine& engine, double t) {
  return qmath::superop_from_map(
      2, [&](const ComplexMatrix& x) { return engine.evolve_system(x, t); });
}

qmath::DensityMatrix reduced_state(const qmath::DensityMatrix& bipartite, std::size_t system_dim,
                                   std::size_t env_dim) {
  const std::size_t dims[] = {system_dim, env_dim};
  const std::size_t keep[] = {0};
  return qmath::partial_trace(bipartite, dims, keep);
}

}  // namespace dnilab::models
