#pragma once

// Two- and three-measurement protocols: joint outcome tables, invasiveness,
// DNI schemes, correlators and Leggett-Garg evaluation.

#include <array>
#include <stdexcept>

#include "dnilab/engine.hpp"
#include "dnilab/measurement.hpp"

namespace dnilab::protocol {

using meas::BlochDirection;
using meas::DichotomicObservable;
using meas::Outcome;
using models::EvolutionEngine;
using qmath::ComplexMatrix;

/// Measurements at 0, t and t + tau.
struct Scheme {
  double t = 0.0;
  double tau = 0.0;
  DichotomicObservable obs_x;
  DichotomicObservable obs_y;
  DichotomicObservable obs_z;
  ComplexMatrix initial_state = qmath::identity(2) / 2.0;

  /// Validates times and the initial state.
  static Scheme make(double t, double tau, const BlochDirection& x, const BlochDirection& y,
                     const BlochDirection& z,
                     const ComplexMatrix& initial_state = qmath::identity(2) / 2.0);
};

enum class TimePair {
  zero_t,        ///< (0, t): observables x then y
  t_t_tau,       ///< (t, t + tau): observables y then z
  zero_t_tau,    ///< (0, t + tau): observables x then z
};

std::string to_string(TimePair pair);

/// P(later, earlier); entry 2 bit(later) + bit(earlier).
struct JointDist2 {
  TimePair pair = TimePair::zero_t_tau;
  std::array<double, 4> p{};
  std::array<double, 4> standard_error{};

  static constexpr std::size_t index(Outcome later, Outcome earlier) {
    return 2 * meas::bit(later) + meas::bit(earlier);
  }
  double at(Outcome later, Outcome earlier) const { return p[index(later, earlier)]; }
  double total() const;
  /// sum later * earlier * P
  double correlator() const;
};

/// P(z, y, x); entry 4 bit(z) + 2 bit(y) + bit(x).
struct JointDist3 {
  std::array<double, 8> p{};
  std::array<double, 8> standard_error{};
  bool clamped = false;  ///< some entry was below -1e-12 and was set to 0

  static constexpr std::size_t index(Outcome z, Outcome y, Outcome x) {
    return 4 * meas::bit(z) + 2 * meas::bit(y) + meas::bit(x);
  }
  double at(Outcome z, Outcome y, Outcome x) const { return p[index(z, y, x)]; }
  double total() const;
};

/// Multilinear coefficients c_S = sum (prod_{m in S} m) P3(z, y, x).
struct CorrelatorSet {
  double c_x = 0.0;
  double c_y = 0.0;
  double c_z = 0.0;
  double c_yx = 0.0;
  double c_zy = 0.0;
  double c_zx = 0.0;
  double c_zyx = 0.0;
};

struct LGIResult {
  double k = 0.0;
  bool violated = false;
  double corr_yx = 0.0;
  double corr_zy = 0.0;
  double corr_zx = 0.0;
};

/// P1(x) = Tr(E_x rho0), indexed by bit(x).
std::array<double, 2> p1(const Scheme& scheme);

JointDist2 p2(const EvolutionEngine& engine, const Scheme& scheme, TimePair pair);
JointDist3 p3(const EvolutionEngine& engine, const Scheme& scheme);

/// sum_y P3(z, y, x)
JointDist2 marginal_zx(const JointDist3& p3);

/// sum |P3(z, x) - P2(z, x)|, in [0, 2]. Throws on mismatched time pairs.
double invasiveness(const JointDist2& p3zx, const JointDist2& p2zx);

/// Convenience: marginal_zx(p3) against p2 at (0, t + tau).
double invasiveness(const EvolutionEngine& engine, const Scheme& scheme);

class BasisDisagreement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DniScheme {
  Scheme scheme;
  BlochDirection intermediate;
  bool degenerate = false;  ///< fallback used (both conditional states degenerate)
  std::array<BlochDirection, 2> per_outcome{};
  std::array<bool, 2> per_outcome_degenerate{};
};

/// Intermediate observable commuting with rho_{t|x} for both first outcomes.
/// Throws BasisDisagreement when the two eigenbases differ by more than
/// `angle_tol` radians.
DniScheme dni_scheme(const EvolutionEngine& engine, double t, double tau,
                     const BlochDirection& obs_x, const BlochDirection& obs_z,
                     const BlochDirection& fallback = meas::kXAxis,
                     const ComplexMatrix& initial_state = qmath::identity(2) / 2.0,
                     double angle_tol = 1e-6);

/// rho_{t|x}: the first-measurement projector evolved to t.
ComplexMatrix conditional_state(const EvolutionEngine& engine, const DichotomicObservable& obs_x,
                                Outcome x, double t);

CorrelatorSet correlators(const JointDist3& p3);

/// d(t, tau) = [2 c_zx / sin^2 theta - d_sum] / cos 2 phi. Throws
/// std::invalid_argument when sin theta or cos 2 phi vanish (|.| < 1e-8).
double extract_d_ttau(const CorrelatorSet& cs, double theta, double phi, double d_sum);

/// K = corr_yx + corr_zy - corr_zx; violated when K > 1 + tol or K < -3 - tol.
LGIResult lgi_value(double corr_yx, double corr_zy, double corr_zx, double tol = 1e-12);

/// d(t) + d(tau) - d(t + tau)
double lgi_decay(const models::ModelSpec& model, double t, double tau);

/// LGI from the three two-measurement tables of the scheme.
LGIResult lgi_from_engine(const EvolutionEngine& engine, const Scheme& scheme,
                          double tol = 1e-12);

struct FactorizationResult {
  double distance = 0.0;
  std::size_t skipped = 0;  ///< triples whose conditioning marginal was < 1e-12
};

/// sum |P3(z,y,x) - P2(z|y) P2(y|x) P1(x)| with P2(y,x) from (0, t) and
/// P2(z,y) from (t, t + tau); P1 is the x marginal of the (0, t) table.
FactorizationResult markov_factorization_distance(const JointDist3& p3, const JointDist2& p2_yx,
                                                  const JointDist2& p2_zy);

FactorizationResult markov_factorization_distance(const EvolutionEngine& engine,
                                                  const Scheme& scheme);

}  // namespace dnilab::protocol
