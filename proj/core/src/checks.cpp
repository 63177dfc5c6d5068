#include "dnilab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dnilab/measurement.hpp"

namespace dnilab::checks {

namespace {

std::vector<ComplexMatrix> eigenprojectors(const ComplexMatrix& rho) {
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  std::vector<ComplexMatrix> out;
  for (const auto& space : qmath::herm_eig(herm).eigenspaces) out.push_back(space.projector);
  return out;
}

}  // namespace

std::vector<ComplexMatrix> pauli_test_states() {
  std::vector<ComplexMatrix> states;
  for (const auto& dir : {meas::kXAxis, meas::kYAxis, meas::kZAxis}) {
    const auto obs = meas::observable_from_bloch(dir);
    states.push_back(obs.plus);
    states.push_back(obs.minus);
  }
  states.push_back(qmath::identity(2) / 2.0);
  return states;
}

std::vector<ComplexMatrix> default_test_states(std::size_t random_count, std::uint64_t seed) {
  auto states = pauli_test_states();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) states.push_back(qmath::random_density(2, rng));
  return states;
}

double superclassicality_deviation(const BipartiteEngine& engine,
                                   const std::vector<ComplexMatrix>& test_states, double t,
                                   double tau) {
  const ComplexMatrix sigma0 = engine.env_initial_state();
  double worst = 0.0;
  for (const auto& rho : test_states) {
    const ComplexMatrix joint_t = engine.propagate(qmath::kron(rho, sigma0), t);
    const ComplexMatrix direct = engine.reduce_to_system(engine.propagate(joint_t, tau));
    ComplexMatrix dni = ComplexMatrix::Zero(2, 2);
    for (const auto& pi : eigenprojectors(engine.reduce_to_system(joint_t))) {
      const ComplexMatrix conditioned = engine.apply_system_sandwich(pi, joint_t, pi);
      dni += engine.reduce_to_system(engine.propagate(conditioned, tau));
    }
    worst = std::max(worst, qmath::trace_norm(direct - dni));
  }
  return worst;
}

double discord_condition_norm(const BipartiteEngine& engine, const ComplexMatrix& rho, double t) {
  const ComplexMatrix joint_t = engine.propagate(qmath::kron(rho, engine.env_initial_state()), t);
  const auto projectors = eigenprojectors(engine.reduce_to_system(joint_t));
  double worst = 0.0;
  for (std::size_t c = 0; c < projectors.size(); ++c) {
    for (std::size_t d = 0; d < projectors.size(); ++d) {
      if (c == d) continue;
      const ComplexMatrix block = engine.apply_system_sandwich(projectors[c], joint_t, projectors[d]);
      worst = std::max(worst, qmath::trace_norm(block));
    }
  }
  return worst;
}

std::vector<ComplexMatrix> conditional_env_states(const BipartiteEngine& engine, double t) {
  const ComplexMatrix sigma0 = engine.env_initial_state();
  const std::array<meas::BlochDirection, 3> axes{meas::kXAxis, meas::kYAxis, meas::kZAxis};
  std::vector<ComplexMatrix> states;
  for (const auto& ax : axes) {
    const auto first = meas::observable_from_bloch(ax);
    for (auto x : meas::kOutcomes) {
      const ComplexMatrix joint_t = engine.propagate(qmath::kron(first.projector(x), sigma0), t);
      for (const auto& ay : axes) {
        const auto second = meas::observable_from_bloch(ay);
        for (auto y : meas::kOutcomes) {
          const ComplexMatrix& e = second.projector(y);
          const ComplexMatrix env =
              engine.reduce_to_env(engine.apply_system_sandwich(e, joint_t, e));
          const double weight = env.trace().real();
          if (weight > 1e-12) states.push_back(env / weight);
        }
      }
    }
  }
  return states;
}

double markov_propagator_condition(const BipartiteEngine& engine, double tau,
                                   const std::vector<ComplexMatrix>& env_states,
                                   const std::vector<ComplexMatrix>& test_states) {
  const ComplexMatrix sigma0 = engine.env_initial_state();
  double worst = 0.0;
  for (const auto& rho : test_states) {
    const ComplexMatrix reference =
        engine.reduce_to_system(engine.propagate(qmath::kron(rho, sigma0), tau));
    for (const auto& sigma : env_states) {
      const ComplexMatrix out =
          engine.reduce_to_system(engine.propagate(qmath::kron(rho, sigma), tau));
      worst = std::max(worst, qmath::trace_norm(out - reference));
    }
  }
  return worst;
}

double markov_propagator_condition(const BipartiteEngine& engine, double t, double tau) {
  auto envs = conditional_env_states(engine, t);
  envs.push_back(engine.env_initial_state());
  return markov_propagator_condition(engine, tau, envs, pauli_test_states());
}

ChannelReport channel_report(const EvolutionEngine& engine, double t) {
  const auto lambda = models::system_propagator(engine, t);
  return {qmath::choi_min_eigenvalue(lambda), qmath::trace_preservation_error(lambda)};
}

}  // namespace dnilab::checks
