#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dnilab/measurement.hpp"

using namespace dnilab;
using namespace dnilab::meas;
using qmath::ComplexMatrix;
using qmath::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix dephased(double x_sign, double d) {
  // E_x evolved by a pure dephasing with coherence factor d
  ComplexMatrix m = (qmath::identity(2) + x_sign * qmath::pauli_x()) / 2.0;
  m(0, 1) *= d;
  m(1, 0) *= d;
  return m;
}

std::vector<BlochDirection> direction_grid() {
  std::vector<BlochDirection> dirs;
  for (double theta : {0.0, kPi / 5, kPi / 2, 2 * kPi / 3, kPi})
    for (double phi : {0.0, 1.1, kPi, 5.0}) dirs.push_back(BlochDirection::make(theta, phi));
  return dirs;
}

}  // namespace

TEST(Observable, AxisProjectors) {
  const auto x = observable_from_bloch(BlochDirection::make(kPi / 2, 0.0));
  EXPECT_LT(max_abs(x.plus - (qmath::identity(2) + qmath::pauli_x()) / 2.0), 1e-15);
  const auto z = observable_from_bloch(BlochDirection::make(0.0, 0.0));
  EXPECT_LT(max_abs(z.plus - (qmath::identity(2) + qmath::pauli_z()) / 2.0), 1e-15);
  const auto y = observable_from_bloch(BlochDirection::make(kPi / 2, kPi / 2));
  EXPECT_LT(max_abs(y.plus - (qmath::identity(2) + qmath::pauli_y()) / 2.0), 1e-15);
}

TEST(Observable, ProjectorAlgebra) {
  for (const auto& dir : direction_grid()) {
    const auto obs = observable_from_bloch(dir);
    EXPECT_LT(max_abs(obs.plus + obs.minus - qmath::identity(2)), 1e-14);
    EXPECT_LT(max_abs(obs.plus * obs.plus - obs.plus), 1e-14);
    EXPECT_LT(max_abs(obs.minus * obs.minus - obs.minus), 1e-14);
    EXPECT_LT(max_abs(obs.plus * obs.minus), 1e-14);
    const auto bv = bloch_vector(obs.plus);
    const auto n = dir.unit_vector();
    EXPECT_NEAR(bv.x, n[0], 1e-14);
    EXPECT_NEAR(bv.y, n[1], 1e-14);
    EXPECT_NEAR(bv.z, n[2], 1e-14);
  }
}

TEST(BlochDirection, UnitNormAndValidation) {
  for (const auto& dir : direction_grid()) {
    const auto n = dir.unit_vector();
    EXPECT_NEAR(n[0] * n[0] + n[1] * n[1] + n[2] * n[2], 1.0, 1e-14);
  }
  EXPECT_THROW(BlochDirection::make(-0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(BlochDirection::make(4.0, 0.0), std::invalid_argument);
  EXPECT_NEAR(BlochDirection::make(1.0, -kPi / 2).phi, 3 * kPi / 2, 1e-15);
  const auto back = BlochDirection::from_vector({0.0, 0.0, -2.0});
  EXPECT_NEAR(back.theta, kPi, 1e-15);
}

TEST(AxisAngle, IgnoresOrientation) {
  EXPECT_NEAR(axis_angle(kXAxis, BlochDirection::make(kPi / 2, kPi)), 0.0, 1e-15);
  EXPECT_NEAR(axis_angle(kXAxis, kZAxis), kPi / 2, 1e-15);
  EXPECT_NEAR(axis_angle(kXAxis, BlochDirection::make(kPi / 2, 0.3)), 0.3, 1e-14);
}

TEST(Selective, MaximallyMixedAndEigenstate) {
  const auto x = observable_from_bloch(kXAxis);
  const auto r = measure_selective(qmath::DensityMatrix::maximally_mixed(2), x, Outcome::plus);
  EXPECT_NEAR(r.probability, 0.5, 1e-15);
  EXPECT_LT(max_abs(r.post_state - x.plus), 1e-15);
  const auto eig = qmath::DensityMatrix::from_matrix(x.plus);
  EXPECT_NEAR(measure_selective(eig, x, Outcome::plus).probability, 1.0, 1e-15);
  const auto zero = measure_selective(eig, x, Outcome::minus);
  EXPECT_TRUE(zero.zero_probability);
  EXPECT_LT(max_abs(zero.post_state - x.minus), 1e-15);
}

TEST(Selective, RandomCompleteness) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto rho = qmath::DensityMatrix::from_matrix(qmath::random_density(2, rng));
    for (const auto& dir : direction_grid()) {
      const auto obs = observable_from_bloch(dir);
      const double pp = measure_selective(rho, obs, Outcome::plus).probability;
      const double pm = measure_selective(rho, obs, Outcome::minus).probability;
      EXPECT_GE(pp, 0.0);
      EXPECT_LE(pp, 1.0);
      EXPECT_NEAR(pp + pm, 1.0, 1e-12);
    }
  }
}

TEST(Bloch, BasicStates) {
  const auto x = observable_from_bloch(kXAxis);
  const auto bx = bloch_vector(x.plus);
  EXPECT_NEAR(bx.x, 1.0, 1e-15);
  EXPECT_NEAR(bx.y, 0.0, 1e-15);
  EXPECT_NEAR(bx.z, 0.0, 1e-15);
  EXPECT_NEAR(bloch_vector(qmath::identity(2) / 2.0).norm(), 0.0, 1e-15);
}

TEST(Bloch, DephasedConditionalState) {
  for (double x : {1.0, -1.0}) {
    for (double d : {1.0, 0.6, -0.25}) {
      const auto b = bloch_vector(dephased(x, d));
      EXPECT_NEAR(b.x, x * d, 1e-15);
      EXPECT_NEAR(b.y, 0.0, 1e-15);
      EXPECT_NEAR(b.z, 0.0, 1e-15);
    }
  }
}

TEST(Nonselective, InvariantIffCommuting) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix rho = qmath::random_density(2, rng);
    for (const auto& dir : direction_grid()) {
      const auto obs = observable_from_bloch(dir);
      const double change = max_abs(measure_nonselective(rho, obs) - rho);
      const double commutator = max_abs(rho * obs.plus - obs.plus * rho);
      EXPECT_EQ(change < 1e-12, commutator < 1e-12);
    }
    const auto own = observable_from_bloch(dni_direction(rho).direction);
    EXPECT_LT(max_abs(measure_nonselective(rho, own) - rho), 1e-12);
  }
}

TEST(DniDirection, DephasingStatesAlongX) {
  for (double x : {1.0, -1.0}) {
    for (double d : {1.0, 0.6, 1e-3, -0.4}) {
      const auto dir = dni_direction(dephased(x, d));
      EXPECT_FALSE(dir.degenerate);
      EXPECT_NEAR(dir.direction.theta, kPi / 2, 1e-12);
      EXPECT_NEAR(dir.direction.phi, 0.0, 1e-12);
    }
  }
}

TEST(DniDirection, ZEigenstateAndDegenerate) {
  ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  EXPECT_NEAR(dni_direction(zero).direction.theta, 0.0, 1e-14);
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1.0;
  EXPECT_NEAR(dni_direction(one).direction.theta, 0.0, 1e-14);
  const auto deg = dni_direction(qmath::identity(2) / 2.0, kYAxis);
  EXPECT_TRUE(deg.degenerate);
  EXPECT_EQ(deg.direction.phi, kYAxis.phi);
}

TEST(DniDirection, CommutesWithState) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const ComplexMatrix rho = qmath::random_density(2, rng);
    const auto obs = observable_from_bloch(dni_direction(rho).direction);
    EXPECT_LT(max_abs(rho * obs.plus - obs.plus * rho), 1e-10);
  }
}
