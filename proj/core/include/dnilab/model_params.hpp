#pragma once

#include <cstddef>
#include <variant>

#include "dnilab/qmath.hpp"

namespace dnilab::models {

/// Ornstein-Uhlenbeck dephasing noise: mean zero, correlation
/// (gamma / 2 tau_c) exp(-|t - t'| / tau_c).
struct OUNoiseParams {
  double gamma = 1.0;
  double tau_c = 1.0;
};

/// Qubit coupled by g sigma_z kron sum_j sigma_z^(j) to n environment spins.
struct SpinBathParams {
  double g = 1.0;
  std::size_t n = 1;
};

/// n qubits (qubit 1 is the system) under the non-diagonal dephasing Lindblad
/// generator with rate matrix Gamma_jk = (gamma - chi) delta_jk + chi i^(j-1) (-i)^(k-1).
struct DissipativeParams {
  double gamma = 1.0;
  double chi = 0.0;
  std::size_t n = 2;
};

/// Memoryless dephasing: coherences multiplied by exp(-2 gamma t).
struct MarkovDephasingParams {
  double gamma = 1.0;
};

using ModelSpec =
    std::variant<OUNoiseParams, SpinBathParams, DissipativeParams, MarkovDephasingParams>;

/// Caps on the environment size of the structured and dense spin-bath paths.
inline constexpr std::size_t kSpinBathStructuredMaxN = 14;
inline constexpr std::size_t kSpinBathDenseMaxN = 10;
inline constexpr std::size_t kDissipativeStructuredMaxN = 10;
inline constexpr std::size_t kDissipativeDenseMaxN = 4;

void validate(const OUNoiseParams& p);
void validate(const SpinBathParams& p, std::size_t max_n = kSpinBathStructuredMaxN);
void validate(const DissipativeParams& p);
void validate(const MarkovDephasingParams& p);

/// Closed-form coherence decay of each model:
///  OU:          exp[-2 gamma (t - tau_c (1 - exp(-t / tau_c)))]
///  spin bath:   cos(2 g t)^n
///  dissipative: exp(-2 gamma t) cos(2 chi t)^floor(n / 2)
///  Markov:      exp(-2 gamma t)
double analytic_d(const ModelSpec& model, double t);

/// Rate matrix of the dissipative model. Throws std::invalid_argument when
/// gamma < chi (the generator would not be completely positive).
qmath::ComplexMatrix gamma_matrix(const DissipativeParams& p);

}  // namespace dnilab::models
