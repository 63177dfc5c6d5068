#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dnilab/detail/exp_cache.hpp"
#include "dnilab/engines.hpp"

namespace dnilab::models {

qmath::Superoperator lindbladian(const ComplexMatrix& hamiltonian,
                                 std::span<const ComplexMatrix> operators,
                                 const ComplexMatrix& rates) {
  const Eigen::Index d = hamiltonian.rows();
  if (hamiltonian.cols() != d || d == 0) {
    throw std::invalid_argument("lindbladian: Hamiltonian must be square and nonempty");
  }
  const auto m = static_cast<Eigen::Index>(operators.size());
  if (rates.rows() != m || rates.cols() != m) {
    throw std::invalid_argument("lindbladian: rate matrix must be m x m for m operators");
  }
  for (const auto& a : operators) {
    if (a.rows() != d || a.cols() != d) {
      throw std::invalid_argument("lindbladian: operator dimension mismatch");
    }
  }
  const ComplexMatrix id = qmath::identity(static_cast<std::size_t>(d));
  const qmath::Complex minus_i(0.0, -1.0);
  ComplexMatrix l = minus_i * (qmath::kron(id, hamiltonian) -
                               qmath::kron(hamiltonian.transpose(), id));
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const qmath::Complex g = rates(j, k);
      if (g == 0.0) continue;
      const ComplexMatrix& aj = operators[static_cast<std::size_t>(j)];
      const ComplexMatrix& ak = operators[static_cast<std::size_t>(k)];
      const ComplexMatrix kj = ak.adjoint() * aj;
      l += g * (qmath::kron(ak.conjugate(), aj) - 0.5 * qmath::kron(id, kj) -
                0.5 * qmath::kron(kj.transpose(), id));
    }
  }
  return {static_cast<std::size_t>(d), l};
}

GeneralLindbladEngine::GeneralLindbladEngine(GeneralLindbladSpec spec, ComplexMatrix env_state)
    : spec_(std::move(spec)), env_state_(std::move(env_state)) {
  const Eigen::Index de = env_state_.rows();
  if (de < 1 || env_state_.cols() != de) {
    throw std::invalid_argument("general Lindblad: environment state must be square");
  }
  qmath::Tolerances loose;
  loose.herm = loose.trace = 1e-8;
  if (!qmath::inspect_density(env_state_, loose).valid) {
    throw std::invalid_argument("general Lindblad: environment state is not a density matrix");
  }
  const Eigen::Index d = 2 * de;
  if (static_cast<std::size_t>(d) > kMaxJointDim) {
    throw std::invalid_argument("general Lindblad: joint dimension " + std::to_string(d) +
                                " exceeds " + std::to_string(kMaxJointDim));
  }
  if (spec_.hamiltonian.size() == 0) spec_.hamiltonian = ComplexMatrix::Zero(d, d);
  if (spec_.hamiltonian.rows() != d || spec_.hamiltonian.cols() != d) {
    throw std::invalid_argument("general Lindblad: Hamiltonian must act on system kron environment");
  }
  if (qmath::hermiticity_error(spec_.hamiltonian) > 1e-10) {
    throw std::invalid_argument("general Lindblad: Hamiltonian is not Hermitian");
  }
  std::vector<ComplexMatrix> ops;
  const auto m = static_cast<Eigen::Index>(spec_.jump_operators.size());
  ComplexMatrix rates = ComplexMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& jump = spec_.jump_operators[static_cast<std::size_t>(j)];
    if (!(jump.rate >= 0.0) || !std::isfinite(jump.rate)) {
      throw std::invalid_argument("general Lindblad: jump rates must be finite and nonnegative");
    }
    ops.push_back(jump.op);
    rates(j, j) = jump.rate;
  }
  liouvillian_ = lindbladian(spec_.hamiltonian, ops, rates).matrix;
}

std::string GeneralLindbladEngine::describe() const {
  std::ostringstream os;
  os << "general_lindblad(env_dim=" << env_dim() << ", jumps=" << spec_.jump_operators.size()
     << ")";
  return os.str();
}

ComplexMatrix GeneralLindbladEngine::propagator(double dt) const {
  return detail::cached_propagator(cache_mutex_, propagator_cache_, dt, [this](double step) {
    return qmath::matrix_exp(step * liouvillian_);
  });
}

ComplexMatrix GeneralLindbladEngine::propagate(const ComplexMatrix& joint, double dt) const {
  check_joint(joint, dt);
  if (dt == 0.0) return joint;
  const auto d = static_cast<std::size_t>(joint.rows());
  return qmath::unvec(propagator(dt) * qmath::vec(joint), d);
}

}  // namespace dnilab::models
