#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "dnilab/engines.hpp"
#include "dnilab/ou_noise.hpp"
#include "dnilab/protocol.hpp"
#include "frozen_values.hpp"

using namespace dnilab;
using namespace dnilab::protocol;
using meas::kXAxis;
using meas::kZAxis;
using models::EngineKind;
using qmath::ComplexMatrix;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr auto P = Outcome::plus;
constexpr auto M = Outcome::minus;

double sgn(Outcome o) { return meas::sign(o); }

std::vector<std::unique_ptr<EvolutionEngine>> section_v_engines() {
  std::vector<std::unique_ptr<EvolutionEngine>> out;
  out.push_back(std::make_unique<models::OUGaussianEngine>(models::OUNoiseParams{1.0, 1.0}));
  out.push_back(std::make_unique<models::SpinBathEngine>(models::SpinBathParams{1.0, 3}));
  out.push_back(
      std::make_unique<models::DissipativeEngine>(models::DissipativeParams{1.0, 0.5, 4}));
  return out;
}

Scheme xnx(double t, double tau, double theta, double phi) {
  return Scheme::make(t, tau, kXAxis, meas::BlochDirection::make(theta, phi), kXAxis);
}

}  // namespace

TEST(P1, TraceFormula) {
  auto s = Scheme::make(0.1, 0.2, kXAxis, kXAxis, kXAxis);
  EXPECT_NEAR(p1(s)[0], 0.5, 1e-15);
  EXPECT_NEAR(p1(s)[1], 0.5, 1e-15);
  s.initial_state = s.obs_x.plus;
  EXPECT_NEAR(p1(s)[0], 1.0, 1e-15);
  EXPECT_NEAR(p1(s)[1], 0.0, 1e-15);
  std::mt19937_64 rng(40);
  const ComplexMatrix rho = qmath::random_density(2, rng);
  const auto dir = meas::BlochDirection::make(1.1, 2.3);
  const auto r = meas::bloch_vector(rho);
  const auto n = dir.unit_vector();
  const auto s2 = Scheme::make(0.0, 0.0, dir, kXAxis, kXAxis, rho);
  EXPECT_NEAR(p1(s2)[0], 0.5 * (1.0 + r.x * n[0] + r.y * n[1] + r.z * n[2]), 1e-14);
}

TEST(P2, MarkovDephasingClosedForm) {
  const models::MarkovDephasingEngine e({0.8});
  std::mt19937_64 rng(41);
  const ComplexMatrix rho = qmath::random_density(2, rng);
  const auto s = Scheme::make(0.4, 0.7, kXAxis, kZAxis, kXAxis, rho);
  const auto table = p2(e, s, TimePair::zero_t_tau);
  const auto px = p1(s);
  for (auto z : meas::kOutcomes)
    for (auto x : meas::kOutcomes)
      EXPECT_NEAR(table.at(z, x),
                  0.5 * (1.0 + sgn(z) * sgn(x) * std::exp(-2.0 * 0.8 * 1.1)) * px[meas::bit(x)],
                  1e-14);
}

TEST(P2, ImmediateRemeasurement) {
  const models::SpinBathEngine e({1.0, 2});
  std::mt19937_64 rng(42);
  const auto s = Scheme::make(0.0, 0.0, kXAxis, kZAxis, kXAxis, qmath::random_density(2, rng));
  const auto table = p2(e, s, TimePair::zero_t_tau);
  const auto px = p1(s);
  for (auto z : meas::kOutcomes)
    for (auto x : meas::kOutcomes)
      EXPECT_NEAR(table.at(z, x), z == x ? px[meas::bit(x)] : 0.0, 1e-14);
}

TEST(P2, SpinBathSingleSpin) {
  const double g = 1.3, t = 0.25, tau = 0.4;
  const models::SpinBathEngine fast({g, 1});
  const models::SpinBathEngine dense({g, 1}, models::SpinBathPath::dense);
  const auto s = Scheme::make(t, tau, kXAxis, kZAxis, kXAxis);
  const auto a = p2(fast, s, TimePair::zero_t_tau);
  const auto b = p2(dense, s, TimePair::zero_t_tau);
  for (auto z : meas::kOutcomes)
    for (auto x : meas::kOutcomes) {
      const double expected = 0.25 * (1.0 + sgn(z) * sgn(x) * std::cos(2.0 * g * (t + tau)));
      EXPECT_NEAR(a.at(z, x), expected, 1e-14);
      EXPECT_NEAR(b.at(z, x), expected, 1e-12);
    }
}

TEST(P3, MarkovFactorizes) {
  const double gamma = 0.6, t = 0.3, tau = 0.9;
  const models::MarkovDephasingEngine e({gamma});
  const auto table = p3(e, Scheme::make(t, tau, kXAxis, kXAxis, kXAxis));
  auto cond = [&](Outcome b, Outcome a, double dt) {
    return 0.5 * (1.0 + sgn(a) * sgn(b) * std::exp(-2.0 * gamma * dt));
  };
  for (auto z : meas::kOutcomes)
    for (auto y : meas::kOutcomes)
      for (auto x : meas::kOutcomes)
        EXPECT_NEAR(table.at(z, y, x), cond(z, y, tau) * cond(y, x, t) * 0.5, 1e-15);
}

TEST(P3, RepeatedInstantMeasurement) {
  const models::DissipativeEngine e({1.0, 0.5, 3});
  std::mt19937_64 rng(43);
  const auto s = Scheme::make(0.0, 0.0, kXAxis, kXAxis, kXAxis, qmath::random_density(2, rng));
  const auto table = p3(e, s);
  const auto px = p1(s);
  for (auto z : meas::kOutcomes)
    for (auto y : meas::kOutcomes)
      for (auto x : meas::kOutcomes)
        EXPECT_NEAR(table.at(z, y, x), (z == y && y == x) ? px[meas::bit(x)] : 0.0, 1e-14);
}

TEST(P3, SpinBathSingleSpinCorrelators) {
  const double g = 0.9, t = 0.35, tau = 0.6;
  const models::SpinBathEngine fast({g, 1});
  const models::SpinBathEngine dense({g, 1}, models::SpinBathPath::dense);
  const auto s = Scheme::make(t, tau, kXAxis, kXAxis, kXAxis);
  const auto c = correlators(p3(fast, s));
  const auto cd = correlators(p3(dense, s));
  EXPECT_NEAR(c.c_yx, std::cos(2 * g * t), 1e-12);
  EXPECT_NEAR(c.c_zy, std::cos(2 * g * tau), 1e-12);
  EXPECT_NEAR(c.c_zx, cd.c_zx, 1e-12);
}

TEST(Marginal, UniformAndNormalization) {
  JointDist3 uniform;
  uniform.p.fill(0.125);
  const auto m = marginal_zx(uniform);
  for (double v : m.p) EXPECT_NEAR(v, 0.25, 1e-16);
  const models::SpinBathEngine e({1.0, 2});
  const auto table = p3(e, xnx(0.3, 0.2, 1.0, 0.5));
  EXPECT_NEAR(marginal_zx(table).total(), table.total(), 1e-15);
}

TEST(Marginal, MarkovMarginalEqualsTwoPoint) {
  const models::MarkovDephasingEngine e({1.0});
  const auto s = Scheme::make(0.5, 0.5, kXAxis, kXAxis, kXAxis);
  const auto m = marginal_zx(p3(e, s));
  const auto two = p2(e, s, TimePair::zero_t_tau);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m.p[i], two.p[i], 1e-15);
}

TEST(Invasiveness, BasicCases) {
  JointDist2 a;
  a.p = {0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(invasiveness(a, a), 0.0);
  JointDist2 b = a;
  b.pair = TimePair::zero_t;
  EXPECT_THROW(invasiveness(a, b), std::invalid_argument);
  const models::MarkovDephasingEngine markov({1.0});
  EXPECT_LT(invasiveness(markov, xnx(0.7, 0.4, kPi / 2, 0.0)), 1e-9);
}

TEST(Invasiveness, ZIntermediateErasesCoherence) {
  for (const auto& e : section_v_engines()) {
    for (auto [t, tau] : {std::pair{0.2, 0.3}, std::pair{0.8, 1.1}}) {
      const double i = invasiveness(*e, xnx(t, tau, 0.0, 0.0));
      EXPECT_NEAR(i, std::abs(*e->analytic_coherence(t + tau)), 1e-10) << e->describe();
      EXPECT_GE(i, 0.0);
      EXPECT_LE(i, 2.0);
    }
  }
}

TEST(DniScheme, DephasingModelsUseX) {
  for (const auto& e : section_v_engines()) {
    for (double t : {0.0, 0.4, 1.3, 2.2}) {
      const auto s = dni_scheme(*e, t, 0.5, kXAxis, kXAxis);
      EXPECT_NEAR(s.intermediate.theta, kPi / 2, 1e-12) << e->describe() << " t=" << t;
      EXPECT_NEAR(s.intermediate.phi, 0.0, 1e-12) << e->describe() << " t=" << t;
    }
  }
}

TEST(DniScheme, TimeZeroUsesFirstBasis) {
  const models::SpinBathEngine e({1.0, 2});
  const auto first = meas::BlochDirection::make(0.7, 1.9);
  const auto s = dni_scheme(e, 0.0, 0.3, first, kXAxis);
  EXPECT_LT(meas::axis_angle(s.intermediate, first), 1e-10);
}

TEST(DniScheme, AgreementAndDisagreement) {
  // system precession: both conditional states stay on a common rotating axis
  models::GeneralLindbladSpec rotating;
  rotating.hamiltonian = 0.5 * qmath::kron(qmath::pauli_z(), qmath::identity(2));
  const models::GeneralLindbladEngine precess(rotating, qmath::identity(2) / 2.0);
  const auto s = dni_scheme(precess, 0.6, 0.1, kXAxis, kXAxis);
  EXPECT_NEAR(s.intermediate.theta, kPi / 2, 1e-12);
  EXPECT_NEAR(s.intermediate.phi, 0.6, 1e-12);

  // amplitude damping pushes both conditional states toward |0>: bases differ
  models::GeneralLindbladSpec damping;
  ComplexMatrix lower = ComplexMatrix::Zero(2, 2);
  lower(1, 0) = 1.0;
  damping.jump_operators.push_back({0.7, qmath::kron(lower, qmath::identity(2))});
  const models::GeneralLindbladEngine damped(damping, qmath::identity(2) / 2.0);
  EXPECT_THROW(dni_scheme(damped, 0.5, 0.1, kXAxis, kXAxis), BasisDisagreement);
  const auto s0 = dni_scheme(damped, 0.0, 0.1, kXAxis, kXAxis);
  EXPECT_NEAR(s0.intermediate.phi, 0.0, 1e-12);
}

TEST(DniScheme, DegenerateFallback) {
  const models::MarkovDephasingEngine e({1.0});
  // a z-first measurement is untouched by dephasing, never degenerate
  const auto zs = dni_scheme(e, 1.0, 0.0, kZAxis, kXAxis);
  EXPECT_FALSE(zs.degenerate);
  EXPECT_NEAR(zs.intermediate.theta, 0.0, 1e-12);
  // spin bath n = 1 at 2gt = pi/2 fully dephases an x-first state
  const models::SpinBathEngine sb({1.0, 1});
  const auto ds = dni_scheme(sb, kPi / 4, 0.1, kXAxis, kXAxis, meas::kYAxis);
  EXPECT_TRUE(ds.degenerate);
  EXPECT_NEAR(ds.intermediate.phi, kPi / 2, 1e-15);
}

TEST(Correlators, UniformAndMarkovAlgebra) {
  JointDist3 uniform;
  uniform.p.fill(0.125);
  const auto c = correlators(uniform);
  for (double v : {c.c_x, c.c_y, c.c_z, c.c_yx, c.c_zy, c.c_zx, c.c_zyx}) EXPECT_EQ(v, 0.0);
  const models::MarkovDephasingEngine e({0.4});
  const auto m = correlators(p3(e, Scheme::make(0.5, 1.5, kXAxis, kXAxis, kXAxis)));
  EXPECT_NEAR(m.c_zx, m.c_yx * m.c_zy, 1e-15);
}

TEST(Correlators, MultilinearStructure) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2 * kPi), tt(0.0, 2.0);
  for (const auto& e : section_v_engines()) {
    for (int k = 0; k < 10; ++k) {
      const double theta = th(rng), phi = ph(rng), t = tt(rng), tau = tt(rng);
      const auto c = correlators(p3(*e, xnx(t, tau, theta, phi)));
      const double a = std::sin(theta) * std::cos(phi);
      EXPECT_LT(std::abs(c.c_zyx), 1e-9);
      EXPECT_NEAR(c.c_yx, a * *e->analytic_coherence(t), 1e-9) << e->describe();
      EXPECT_NEAR(c.c_zy, a * *e->analytic_coherence(tau), 1e-9) << e->describe();
    }
  }
}

TEST(ExtractDTTau, MarkovAndAngleIndependence) {
  const models::MarkovDephasingEngine markov({0.9});
  const double t = 0.4, tau = 0.7;
  const auto cm = correlators(p3(markov, xnx(t, tau, kPi / 2, 0.0)));
  const double dsum = std::exp(-2.0 * 0.9 * (t + tau));
  EXPECT_NEAR(extract_d_ttau(cm, kPi / 2, 0.0, dsum), dsum, 1e-14);

  const models::SpinBathEngine sb({1.0, 1});
  const auto c0 = correlators(p3(sb, xnx(0.0, 0.0, kPi / 2, 0.0)));
  EXPECT_NEAR(extract_d_ttau(c0, kPi / 2, 0.0, 1.0), 1.0, 1e-14);

  const models::SpinBathEngine dense({1.0, 1}, models::SpinBathPath::dense);
  const double dd = std::cos(2.0 * 0.8);
  const double a = extract_d_ttau(correlators(p3(dense, xnx(0.3, 0.5, kPi / 2, 0.0))), kPi / 2,
                                  0.0, dd);
  const double b = extract_d_ttau(correlators(p3(dense, xnx(0.3, 0.5, kPi / 3, 0.0))), kPi / 3,
                                  0.0, dd);
  EXPECT_NEAR(a, b, 1e-9);
  EXPECT_THROW(extract_d_ttau(cm, 0.0, 0.0, dsum), std::invalid_argument);
  EXPECT_THROW(extract_d_ttau(cm, kPi / 2, kPi / 4, dsum), std::invalid_argument);
}

TEST(Lgi, ValueAndBounds) {
  const auto r = lgi_value(1.0, 1.0, 1.0);
  EXPECT_EQ(r.k, 1.0);
  EXPECT_FALSE(r.violated);
  EXPECT_TRUE(lgi_value(1.0, 1.0, 0.5).violated);
  EXPECT_TRUE(lgi_value(-1.0, -1.0, 1.0 + 1e-9).violated);
  EXPECT_FALSE(lgi_value(-1.0, -1.0, 1.0).violated);
}

TEST(Lgi, DecayLandmarks) {
  for (double t = 0.0; t <= 5.0; t += 0.05) {
    const double u = std::exp(-2.0 * t);
    EXPECT_NEAR(lgi_decay(models::MarkovDephasingParams{1.0}, t, t), 2 * u - u * u, 1e-15);
    EXPECT_LE(lgi_decay(models::MarkovDephasingParams{1.0}, t, t), 1.0 + 1e-12);
    EXPECT_LE(lgi_decay(models::DissipativeParams{1.0, 0.0, 4}, t, t), 1.0 + 1e-12);
    EXPECT_NEAR(lgi_decay(models::SpinBathParams{0.0, 3}, t, 0.5 * t), 1.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(lgi_decay(models::OUNoiseParams{1.0, 1.0}, 0.0, 0.0), 1.0);
  EXPECT_NEAR(lgi_decay(models::SpinBathParams{1.0, 1}, kPi / 6, kPi / 6), 1.5, 1e-14);
}

TEST(Lgi, TwoPointCorrelatorsMatchDecay) {
  const std::vector<std::pair<models::ModelSpec, std::shared_ptr<EvolutionEngine>>> cases{
      {models::SpinBathParams{1.0, 1}, std::make_shared<models::SpinBathEngine>(
                                           models::SpinBathParams{1.0, 1})},
      {models::OUNoiseParams{1.0, 2.0},
       std::make_shared<models::OUGaussianEngine>(models::OUNoiseParams{1.0, 2.0})},
      {models::DissipativeParams{1.0, 0.7, 4},
       std::make_shared<models::DissipativeEngine>(models::DissipativeParams{1.0, 0.7, 4})},
  };
  for (const auto& [spec, engine] : cases) {
    for (auto [t, tau] : {std::pair{0.3, 0.3}, std::pair{0.5, 1.2}, std::pair{kPi / 6, kPi / 6}}) {
      const auto r = lgi_from_engine(*engine, Scheme::make(t, tau, kXAxis, kXAxis, kXAxis));
      EXPECT_NEAR(r.k, lgi_decay(spec, t, tau), 1e-9) << engine->describe();
    }
  }
}

TEST(Factorization, MarkovUniformAndSpinBath) {
  std::mt19937_64 rng(45);
  const models::MarkovDephasingEngine markov({1.2});
  const auto s = Scheme::make(0.3, 0.8, meas::BlochDirection::make(0.4, 1.0),
                              meas::BlochDirection::make(2.0, 0.3),
                              meas::BlochDirection::make(1.2, 4.0), qmath::random_density(2, rng));
  EXPECT_LT(markov_factorization_distance(markov, s).distance, 1e-9);

  JointDist3 uniform;
  uniform.p.fill(0.125);
  JointDist2 a, b;
  a.pair = TimePair::zero_t;
  b.pair = TimePair::t_t_tau;
  a.p.fill(0.25);
  b.p.fill(0.25);
  EXPECT_EQ(markov_factorization_distance(uniform, a, b).distance, 0.0);
  EXPECT_THROW(markov_factorization_distance(uniform, b, a), std::invalid_argument);

  const models::SpinBathEngine sb({1.0, 4});
  const auto r = markov_factorization_distance(sb, Scheme::make(0.4, 0.4, kXAxis, kXAxis, kXAxis));
  EXPECT_NEAR(r.distance, frozen::kFactorizationSpinBathN4, 1e-10);
  EXPECT_EQ(r.skipped, 0u);
}

TEST(Factorization, SkipsEmptyConditioning) {
  const models::MarkovDephasingEngine markov({1.0});
  auto s = Scheme::make(0.3, 0.3, kZAxis, kZAxis, kZAxis);
  s.initial_state = s.obs_x.plus;
  const auto r = markov_factorization_distance(markov, s);
  EXPECT_GT(r.skipped, 0u);
  EXPECT_LT(r.distance, 1e-12);
}

TEST(Invariants, NormalizationAndNoSignaling) {
  std::vector<std::unique_ptr<EvolutionEngine>> engines = section_v_engines();
  engines.push_back(std::make_unique<models::MarkovDephasingEngine>(models::MarkovDephasingParams{1.0}));
  engines.push_back(std::make_unique<models::OUMonteCarloEngine>(models::OUNoiseParams{1.0, 1.0},
                                                                 20000, 9));
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2 * kPi), tt(0.0, 1.5);
  for (const auto& e : engines) {
    for (int k = 0; k < 4; ++k) {
      const auto s = Scheme::make(tt(rng), tt(rng), meas::BlochDirection::make(th(rng), ph(rng)),
                                  meas::BlochDirection::make(th(rng), ph(rng)),
                                  meas::BlochDirection::make(th(rng), ph(rng)),
                                  qmath::random_density(2, rng));
      const auto three = p3(*e, s);
      const auto two = p2(*e, s, TimePair::zero_t);
      EXPECT_NEAR(three.total(), 1.0, 1e-10);
      for (auto y : meas::kOutcomes)
        for (auto x : meas::kOutcomes)
          EXPECT_NEAR(three.at(P, y, x) + three.at(M, y, x), two.at(y, x), 1e-10) << e->describe();
      const double i = invasiveness(marginal_zx(three), p2(*e, s, TimePair::zero_t_tau));
      EXPECT_GE(i, 0.0);
      EXPECT_LE(i, 2.0);
    }
  }
}
