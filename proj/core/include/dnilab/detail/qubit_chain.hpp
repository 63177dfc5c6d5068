#pragma once

// Sequences of projective qubit measurements separated by pure dephasing
// rotations. Interval k multiplies the coherence <0|rho|1> by exp(-i phase[k]).
// Because every post-measurement state is a rank-one projector, the joint
// probability of an outcome string is a product of one factor per interval.

#include <complex>
#include <span>

#include "dnilab/engine.hpp"

namespace dnilab::models::detail {

/// Tr(E R_phase[rho]) as a trigonometric polynomial in the phase:
/// constant + minus * exp(-i phase) + plus * exp(+i phase).
struct PhaseFactor {
  std::complex<double> constant;
  std::complex<double> minus;
  std::complex<double> plus;

  double at(double phase) const { return at(std::complex<double>(std::cos(phase), -std::sin(phase))); }
  /// General coherence factor c (|c| <= 1) in place of exp(-i phase).
  double at(std::complex<double> c) const { return (constant + minus * c + plus * std::conj(c)).real(); }
};

inline PhaseFactor phase_factor(const ComplexMatrix& e, const ComplexMatrix& rho) {
  return {e(0, 0) * rho(0, 0) + e(1, 1) * rho(1, 1), e(1, 0) * rho(0, 1), e(0, 1) * rho(1, 0)};
}

/// Adds weight * P(outcome string) to out[index] for every outcome string;
/// interval k multiplies the coherence by factors[k].
template <class Factor>
void accumulate_chain(const ComplexMatrix& rho0, std::span<const MeasurementStep> steps,
                      std::span<const Factor> factors, double weight, std::span<double> out) {
  const std::size_t count = std::size_t{1} << steps.size();
  for (std::size_t index = 0; index < count; ++index) {
    double p = weight;
    const ComplexMatrix* prev = &rho0;
    for (std::size_t k = 0; k < steps.size() && p != 0.0; ++k) {
      const auto o = ((index >> k) & 1U) ? meas::Outcome::minus : meas::Outcome::plus;
      const ComplexMatrix& e = steps[k].observable.projector(o);
      p *= phase_factor(e, *prev).at(factors[k]);
      prev = &e;
    }
    out[index] += p;
  }
}

inline void accumulate_dephased_chain(const ComplexMatrix& rho0,
                                      std::span<const MeasurementStep> steps,
                                      std::span<const double> phases, double weight,
                                      std::span<double> out) {
  accumulate_chain(rho0, steps, phases, weight, out);
}

inline ComplexMatrix rotate_coherence(const ComplexMatrix& rho, std::complex<double> factor) {
  ComplexMatrix out = rho;
  out(0, 1) *= factor;
  out(1, 0) *= std::conj(factor);
  return out;
}

}  // namespace dnilab::models::detail
