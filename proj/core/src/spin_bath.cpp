#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dnilab/detail/exp_cache.hpp"
#include "dnilab/detail/qubit_chain.hpp"
#include "dnilab/engines.hpp"

namespace dnilab::models {

namespace {

std::vector<double> binomial_weights(std::size_t n) {
  // C(n, k) / 2^n by the multiplicative recurrence
  std::vector<double> w(n + 1, 0.0);
  w[0] = std::ldexp(1.0, -static_cast<int>(n));
  for (std::size_t k = 1; k <= n; ++k) {
    w[k] = w[k - 1] * static_cast<double>(n - k + 1) / static_cast<double>(k);
  }
  return w;
}

double magnetization(std::size_t n, std::size_t env_index) {
  return static_cast<double>(n) - 2.0 * static_cast<double>(std::popcount(env_index));
}

}  // namespace

SpinBathEngine::SpinBathEngine(SpinBathParams params, SpinBathPath path)
    : params_(params), path_(path) {
  validate(params_, path_ == SpinBathPath::dense ? kSpinBathDenseMaxN : kSpinBathStructuredMaxN);
  sector_weights_ = binomial_weights(params_.n);
}

SpinBathEngine::SpinBathEngine(SpinBathParams params, ComplexMatrix env_state, SpinBathPath path)
    : params_(params), path_(path), default_env_(false) {
  validate(params_, kSpinBathDenseMaxN);
  const auto de = static_cast<Eigen::Index>(env_dim());
  if (env_state.rows() != de || env_state.cols() != de) {
    throw std::invalid_argument("spin bath: environment state must be 2^n x 2^n");
  }
  qmath::Tolerances loose;
  loose.herm = loose.trace = 1e-8;
  if (!qmath::inspect_density(env_state, loose).valid) {
    throw std::invalid_argument("spin bath: environment state is not a density matrix");
  }
  sector_weights_.assign(params_.n + 1, 0.0);
  for (Eigen::Index e = 0; e < de; ++e) {
    sector_weights_[static_cast<std::size_t>(std::popcount(static_cast<std::size_t>(e)))] +=
        env_state(e, e).real();
  }
  if (path_ == SpinBathPath::structured) {
    ComplexMatrix off = env_state;
    off.diagonal().setZero();
    if (qmath::max_abs(off) > 1e-12) {
      throw std::invalid_argument(
          "spin bath: the structured path needs a diagonal environment state");
    }
  }
  env_state_ = std::move(env_state);
}

EngineKind SpinBathEngine::kind() const {
  return path_ == SpinBathPath::dense ? EngineKind::spin_bath_dense : EngineKind::spin_bath;
}

std::string SpinBathEngine::describe() const {
  std::ostringstream os;
  os << (path_ == SpinBathPath::dense ? "spin_bath_dense" : "spin_bath") << "(g=" << params_.g
     << ", n=" << params_.n << (default_env_ ? "" : ", custom environment") << ")";
  return os.str();
}

ComplexMatrix SpinBathEngine::env_initial_state() const {
  if (env_state_) return *env_state_;
  if (params_.n > kSpinBathDenseMaxN) {
    throw std::invalid_argument("spin bath: joint operators are capped at n <= " +
                                std::to_string(kSpinBathDenseMaxN));
  }
  return qmath::identity(env_dim()) / static_cast<double>(env_dim());
}

ComplexMatrix SpinBathEngine::hamiltonian() const {
  const ComplexMatrix z = qmath::pauli_z();
  const ComplexMatrix id = qmath::identity(2);
  const auto de = static_cast<Eigen::Index>(env_dim());
  ComplexMatrix bath = ComplexMatrix::Zero(de, de);
  for (std::size_t j = 0; j < params_.n; ++j) {
    std::vector<ComplexMatrix> factors(params_.n, id);
    factors[j] = z;
    bath += qmath::kron_all(factors);
  }
  return params_.g * qmath::kron(z, bath);
}

ComplexMatrix SpinBathEngine::unitary(double dt) const {
  return detail::cached_propagator(cache_mutex_, unitary_cache_, dt, [this](double step) {
    return qmath::matrix_exp(qmath::Complex(0.0, -step) * hamiltonian());
  });
}

ComplexMatrix SpinBathEngine::propagate(const ComplexMatrix& joint, double dt) const {
  if (params_.n > kSpinBathDenseMaxN) {
    throw std::invalid_argument("spin bath: joint operators are capped at n <= " +
                                std::to_string(kSpinBathDenseMaxN));
  }
  check_joint(joint, dt);
  if (dt == 0.0) return joint;
  if (path_ == SpinBathPath::dense) {
    const ComplexMatrix u = unitary(dt);
    return u * joint * u.adjoint();
  }
  // H is diagonal: h_a = g s(a) m(e(a))
  const std::size_t de = env_dim();
  const auto d = static_cast<Eigen::Index>(2 * de);
  std::vector<double> energy(static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < energy.size(); ++a) {
    const double s = a < de ? 1.0 : -1.0;
    energy[a] = params_.g * s * magnetization(params_.n, a % de);
  }
  ComplexMatrix out(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      const double angle =
          -dt * (energy[static_cast<std::size_t>(a)] - energy[static_cast<std::size_t>(b)]);
      out(a, b) = joint(a, b) * qmath::Complex(std::cos(angle), std::sin(angle));
    }
  }
  return out;
}

ComplexMatrix SpinBathEngine::evolve_system(const ComplexMatrix& rho, double t) const {
  if (path_ == SpinBathPath::dense) return BipartiteEngine::evolve_system(rho, t);
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("evolve_system: 2x2 operator expected");
  }
  qmath::Complex factor = 0.0;
  for (std::size_t k = 0; k <= params_.n; ++k) {
    const double phase = 2.0 * params_.g * magnetization(params_.n, (std::size_t{1} << k) - 1) * t;
    factor += sector_weights_[k] * qmath::Complex(std::cos(phase), -std::sin(phase));
  }
  return detail::rotate_coherence(rho, factor);
}

OutcomeTable SpinBathEngine::measure_sequence(const ComplexMatrix& rho0,
                                              std::span<const MeasurementStep> steps) const {
  if (path_ == SpinBathPath::dense) return BipartiteEngine::measure_sequence(rho0, steps);
  validate_sequence(rho0, steps);
  OutcomeTable table;
  table.steps = steps.size();
  table.probability.assign(std::size_t{1} << steps.size(), 0.0);
  table.standard_error.assign(table.probability.size(), 0.0);
  std::vector<double> phases(steps.size());
  for (std::size_t k = 0; k <= params_.n; ++k) {
    if (sector_weights_[k] == 0.0) continue;
    // popcount((1 << k) - 1) == k
    const double m = magnetization(params_.n, (std::size_t{1} << k) - 1);
    double now = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      phases[i] = 2.0 * params_.g * m * (steps[i].time - now);
      now = steps[i].time;
    }
    detail::accumulate_dephased_chain(rho0, steps, phases, sector_weights_[k], table.probability);
  }
  return table;
}

std::optional<double> SpinBathEngine::analytic_coherence(double t) const {
  if (!default_env_) return std::nullopt;
  return analytic_d(params_, t);
}

}  // namespace dnilab::models
