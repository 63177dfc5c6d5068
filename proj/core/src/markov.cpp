#include <cmath>
#include <sstream>

#include "dnilab/detail/qubit_chain.hpp"
#include "dnilab/engines.hpp"

namespace dnilab::models {

MarkovDephasingEngine::MarkovDephasingEngine(MarkovDephasingParams params) : params_(params) {
  validate(params_);
}

std::string MarkovDephasingEngine::describe() const {
  std::ostringstream os;
  os << "markov_dephasing(gamma=" << params_.gamma << ")";
  return os.str();
}

ComplexMatrix MarkovDephasingEngine::env_initial_state() const {
  return ComplexMatrix::Ones(1, 1);
}

ComplexMatrix MarkovDephasingEngine::propagate(const ComplexMatrix& joint, double dt) const {
  check_joint(joint, dt);
  return detail::rotate_coherence(joint, std::exp(-2.0 * params_.gamma * dt));
}

std::optional<double> MarkovDephasingEngine::analytic_coherence(double t) const {
  return analytic_d(params_, t);
}

}  // namespace dnilab::models
