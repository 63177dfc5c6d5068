#pragma once

// Numerical checkers for Markovianity, superclassicality and discord
// conditions on bipartite engines, plus channel sanity for any engine.

#include <cstdint>
#include <vector>

#include "dnilab/engine.hpp"

namespace dnilab::checks {

using models::BipartiteEngine;
using models::EvolutionEngine;
using qmath::ComplexMatrix;

/// Six Pauli eigenstates, I/2 and `random_count` Ginibre states from `seed`.
std::vector<ComplexMatrix> default_test_states(std::size_t random_count = 20,
                                               std::uint64_t seed = 20240601);

/// Six Pauli eigenstates and I/2.
std::vector<ComplexMatrix> pauli_test_states();

/// max over test states of || Lambda_{t+tau,0}[rho] -
///   sum_c Tr_e G_tau[(Pi_c kron I) G_t[rho kron sigma0] (Pi_c kron I)] ||_1,
/// {Pi_c} the eigenprojectors of Lambda_{t,0}[rho].
double superclassicality_deviation(const BipartiteEngine& engine,
                                   const std::vector<ComplexMatrix>& test_states, double t,
                                   double tau);

/// max over eigenspace pairs c != c' of Lambda_{t,0}[rho] of
/// || (Pi_c kron I) G_t[rho kron sigma0] (Pi_c' kron I) ||_1.
double discord_condition_norm(const BipartiteEngine& engine, const ComplexMatrix& rho, double t);

/// Normalized Tr_s((E_y kron I) G_t[E_x kron sigma0]) for x, y along the x, y
/// and z axes (outcomes with weight below 1e-12 skipped).
std::vector<ComplexMatrix> conditional_env_states(const BipartiteEngine& engine, double t);

/// max over sigma in env_states and test states rho of
/// || Tr_e G_tau[rho kron sigma] - Tr_e G_tau[rho kron sigma0] ||_1.
double markov_propagator_condition(const BipartiteEngine& engine, double tau,
                                   const std::vector<ComplexMatrix>& env_states,
                                   const std::vector<ComplexMatrix>& test_states);

/// Uses sigma0 plus conditional_env_states(engine, t) and pauli_test_states().
double markov_propagator_condition(const BipartiteEngine& engine, double t, double tau);

struct ChannelReport {
  double min_choi_eigenvalue = 0.0;
  double trace_error = 0.0;
};

/// Tomographic Lambda_{t,0}: Choi spectrum and trace preservation.
ChannelReport channel_report(const EvolutionEngine& engine, double t);

}  // namespace dnilab::checks
