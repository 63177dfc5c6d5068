#include "dnilab/model_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dnilab::models {

void validate(const OUNoiseParams& p) {
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) {
    throw std::invalid_argument("OU noise: gamma must be positive");
  }
  if (!(p.tau_c >= 0.0) || !std::isfinite(p.tau_c)) {
    throw std::invalid_argument("OU noise: tau_c must be nonnegative");
  }
}

void validate(const SpinBathParams& p, std::size_t max_n) {
  if (!std::isfinite(p.g)) throw std::invalid_argument("spin bath: g must be finite");
  if (p.n < 1) throw std::invalid_argument("spin bath: at least one environment spin required");
  if (p.n > max_n) {
    throw std::invalid_argument("spin bath: n = " + std::to_string(p.n) + " exceeds the cap " +
                                std::to_string(max_n));
  }
}

void validate(const DissipativeParams& p) {
  if (p.n < 2) throw std::invalid_argument("dissipative model: n must be at least 2");
  if (!std::isfinite(p.gamma) || !std::isfinite(p.chi) || p.chi < 0.0) {
    throw std::invalid_argument("dissipative model: rates must be finite and chi >= 0");
  }
  if (p.gamma < p.chi) {
    throw std::invalid_argument("dissipative model: gamma < chi gives a non-CP generator");
  }
}

void validate(const MarkovDephasingParams& p) {
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
    throw std::invalid_argument("Markov dephasing: gamma must be nonnegative");
  }
}

namespace {

struct AnalyticD {
  double t;

  double operator()(const OUNoiseParams& p) const {
    if (p.tau_c == 0.0) return std::exp(-2.0 * p.gamma * t);
    return std::exp(-2.0 * p.gamma * (t + p.tau_c * std::expm1(-t / p.tau_c)));
  }
  double operator()(const SpinBathParams& p) const {
    return std::pow(std::cos(2.0 * p.g * t), static_cast<double>(p.n));
  }
  double operator()(const DissipativeParams& p) const {
    return std::exp(-2.0 * p.gamma * t) *
           std::pow(std::cos(2.0 * p.chi * t), static_cast<double>(p.n / 2));
  }
  double operator()(const MarkovDephasingParams& p) const { return std::exp(-2.0 * p.gamma * t); }
};

}  // namespace

double analytic_d(const ModelSpec& model, double t) {
  if (t < 0.0) throw std::invalid_argument("analytic_d: t must be nonnegative");
  return std::visit(AnalyticD{t}, model);
}

qmath::ComplexMatrix gamma_matrix(const DissipativeParams& p) {
  validate(p);
  const auto n = static_cast<Eigen::Index>(p.n);
  // v_j = i^(j-1); Gamma = (gamma - chi) I + chi v v^dagger
  qmath::ComplexVector v(n);
  const qmath::Complex unit(0.0, 1.0);
  qmath::Complex power(1.0, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    v(j) = power;
    power *= unit;
  }
  qmath::ComplexMatrix g = p.chi * (v * v.adjoint());
  g.diagonal().array() += (p.gamma - p.chi);
  return g;
}

}  // namespace dnilab::models
