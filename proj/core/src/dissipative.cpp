#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dnilab/detail/exp_cache.hpp"
#include "dnilab/detail/qubit_chain.hpp"
#include "dnilab/engines.hpp"

namespace dnilab::models {

namespace {

std::vector<ComplexMatrix> sigma_z_operators(std::size_t n) {
  const ComplexMatrix id = qmath::identity(2);
  std::vector<ComplexMatrix> ops;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<ComplexMatrix> factors(n, id);
    factors[j] = qmath::pauli_z();
    ops.push_back(qmath::kron_all(factors));
  }
  return ops;
}

}  // namespace

DissipativeEngine::DissipativeEngine(DissipativeParams params, DissipativePath path)
    : params_(params), path_(path) {
  validate(params_);
  const std::size_t cap =
      path_ == DissipativePath::dense ? kDissipativeDenseMaxN : kDissipativeStructuredMaxN;
  if (params_.n > cap) {
    throw std::invalid_argument("dissipative model: n = " + std::to_string(params_.n) +
                                " exceeds the cap " + std::to_string(cap));
  }
  const ComplexMatrix gamma = gamma_matrix(params_);
  const std::size_t n = params_.n;
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);

  // u_a: sigma_z eigenvalues of bitstring a, qubit 0 most significant
  Eigen::MatrixXd u(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto bit = (static_cast<std::size_t>(a) >> (n - 1 - j)) & 1U;
      u(static_cast<Eigen::Index>(j), a) = bit ? -1.0 : 1.0;
    }
  }
  const ComplexMatrix cross = u.transpose().cast<qmath::Complex>() * gamma * u.cast<qmath::Complex>();
  rates_.resize(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      rates_(a, b) = cross(a, b) - 0.5 * (cross(a, a) + cross(b, b));
    }
  }
  const Eigen::Index de = d / 2;
  for (Eigen::Index e = 0; e < de; ++e) coherence_rates_.push_back(rates_(e, de + e));
  if (path_ == DissipativePath::dense) {
    const auto ops = sigma_z_operators(n);
    liouvillian_ = lindbladian(ComplexMatrix::Zero(d, d), ops, gamma).matrix;
  }
}

EngineKind DissipativeEngine::kind() const {
  return path_ == DissipativePath::dense ? EngineKind::dissipative_dense
                                         : EngineKind::dissipative_structured;
}

std::string DissipativeEngine::describe() const {
  std::ostringstream os;
  os << (path_ == DissipativePath::dense ? "dissipative_dense" : "dissipative_structured")
     << "(gamma=" << params_.gamma << ", chi=" << params_.chi << ", n=" << params_.n << ")";
  return os.str();
}

ComplexMatrix DissipativeEngine::env_initial_state() const {
  return qmath::identity(env_dim()) / static_cast<double>(env_dim());
}

qmath::Superoperator DissipativeEngine::liouvillian() const {
  if (path_ == DissipativePath::dense) return {joint_dim(), liouvillian_};
  const auto ops = sigma_z_operators(params_.n);
  const auto d = static_cast<Eigen::Index>(joint_dim());
  return lindbladian(ComplexMatrix::Zero(d, d), ops, gamma_matrix(params_));
}

ComplexMatrix DissipativeEngine::propagator(double dt) const {
  return detail::cached_propagator(cache_mutex_, propagator_cache_, dt, [this](double step) {
    return qmath::matrix_exp(step * liouvillian_);
  });
}

ComplexMatrix DissipativeEngine::propagate(const ComplexMatrix& joint, double dt) const {
  check_joint(joint, dt);
  if (dt == 0.0) return joint;
  if (path_ == DissipativePath::dense) {
    const auto d = static_cast<std::size_t>(joint.rows());
    return qmath::unvec(propagator(dt) * qmath::vec(joint), d);
  }
  return joint.cwiseProduct((dt * rates_).array().exp().matrix());
}

ComplexMatrix DissipativeEngine::evolve_system(const ComplexMatrix& rho, double t) const {
  if (path_ == DissipativePath::dense) return BipartiteEngine::evolve_system(rho, t);
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("evolve_system: 2x2 operator expected");
  }
  qmath::Complex factor = 0.0;
  for (const auto& r : coherence_rates_) factor += std::exp(t * r);
  return detail::rotate_coherence(rho, factor / static_cast<double>(coherence_rates_.size()));
}

OutcomeTable DissipativeEngine::measure_sequence(const ComplexMatrix& rho0,
                                                 std::span<const MeasurementStep> steps) const {
  if (path_ == DissipativePath::dense) return BipartiteEngine::measure_sequence(rho0, steps);
  validate_sequence(rho0, steps);
  OutcomeTable table;
  table.steps = steps.size();
  table.probability.assign(std::size_t{1} << steps.size(), 0.0);
  table.standard_error.assign(table.probability.size(), 0.0);
  const double weight = 1.0 / static_cast<double>(coherence_rates_.size());
  std::vector<qmath::Complex> factors(steps.size());
  for (const auto& r : coherence_rates_) {
    double now = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      factors[k] = std::exp((steps[k].time - now) * r);
      now = steps[k].time;
    }
    detail::accumulate_chain<qmath::Complex>(rho0, steps, factors, weight, table.probability);
  }
  if (steps.empty()) table.probability[0] = rho0.trace().real();
  return table;
}

std::optional<double> DissipativeEngine::analytic_coherence(double t) const {
  return analytic_d(params_, t);
}

}  // namespace dnilab::models
