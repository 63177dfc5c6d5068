#include "dnilab/protocol.hpp"

#include <cmath>
#include <numeric>

namespace dnilab::protocol {

using models::MeasurementStep;

Scheme Scheme::make(double t, double tau, const BlochDirection& x, const BlochDirection& y,
                    const BlochDirection& z, const ComplexMatrix& initial_state) {
  if (!(t >= 0.0) || !(tau >= 0.0) || !std::isfinite(t) || !std::isfinite(tau)) {
    throw std::invalid_argument("scheme: t and tau must be finite and nonnegative");
  }
  qmath::Tolerances loose;
  loose.herm = loose.trace = 1e-8;
  if (!qmath::inspect_density(initial_state, loose).valid || initial_state.rows() != 2) {
    throw std::invalid_argument("scheme: initial state must be a qubit density matrix");
  }
  Scheme s;
  s.t = t;
  s.tau = tau;
  s.obs_x = meas::observable_from_bloch(x);
  s.obs_y = meas::observable_from_bloch(y);
  s.obs_z = meas::observable_from_bloch(z);
  s.initial_state = initial_state;
  return s;
}

std::string to_string(TimePair pair) {
  switch (pair) {
    case TimePair::zero_t: return "(0,t)";
    case TimePair::t_t_tau: return "(t,t+tau)";
    case TimePair::zero_t_tau: return "(0,t+tau)";
  }
  return "unknown";
}

double JointDist2::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

double JointDist2::correlator() const {
  double c = 0.0;
  for (auto later : meas::kOutcomes)
    for (auto earlier : meas::kOutcomes) c += meas::sign(later) * meas::sign(earlier) * at(later, earlier);
  return c;
}

double JointDist3::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

std::array<double, 2> p1(const Scheme& scheme) {
  std::array<double, 2> out{};
  for (auto x : meas::kOutcomes) {
    out[meas::bit(x)] = (scheme.obs_x.projector(x) * scheme.initial_state).trace().real();
  }
  return out;
}

JointDist2 p2(const EvolutionEngine& engine, const Scheme& scheme, TimePair pair) {
  std::array<MeasurementStep, 2> steps;
  switch (pair) {
    case TimePair::zero_t:
      steps = {MeasurementStep{0.0, scheme.obs_x}, MeasurementStep{scheme.t, scheme.obs_y}};
      break;
    case TimePair::t_t_tau:
      steps = {MeasurementStep{scheme.t, scheme.obs_y},
               MeasurementStep{scheme.t + scheme.tau, scheme.obs_z}};
      break;
    case TimePair::zero_t_tau:
      steps = {MeasurementStep{0.0, scheme.obs_x},
               MeasurementStep{scheme.t + scheme.tau, scheme.obs_z}};
      break;
  }
  const auto table = engine.measure_sequence(scheme.initial_state, steps);
  JointDist2 out;
  out.pair = pair;
  // table index: bit(first) | bit(second) << 1 == 2 bit(later) + bit(earlier)
  for (std::size_t i = 0; i < 4; ++i) {
    out.p[i] = table.probability[i];
    out.standard_error[i] = table.standard_error[i];
  }
  return out;
}

JointDist3 p3(const EvolutionEngine& engine, const Scheme& scheme) {
  const std::array<MeasurementStep, 3> steps{MeasurementStep{0.0, scheme.obs_x},
                                             MeasurementStep{scheme.t, scheme.obs_y},
                                             MeasurementStep{scheme.t + scheme.tau, scheme.obs_z}};
  const auto table = engine.measure_sequence(scheme.initial_state, steps);
  JointDist3 out;
  for (std::size_t i = 0; i < 8; ++i) {
    double v = table.probability[i];
    if (v < -1e-12) {
      out.clamped = true;
      v = 0.0;
    }
    out.p[i] = v;
    out.standard_error[i] = table.standard_error[i];
  }
  return out;
}

JointDist2 marginal_zx(const JointDist3& p3) {
  JointDist2 out;
  out.pair = TimePair::zero_t_tau;
  for (auto z : meas::kOutcomes) {
    for (auto x : meas::kOutcomes) {
      double sum = 0.0;
      double var = 0.0;
      for (auto y : meas::kOutcomes) {
        sum += p3.at(z, y, x);
        const double se = p3.standard_error[JointDist3::index(z, y, x)];
        var += se * se;
      }
      out.p[JointDist2::index(z, x)] = sum;
      out.standard_error[JointDist2::index(z, x)] = std::sqrt(var);
    }
  }
  return out;
}

double invasiveness(const JointDist2& p3zx, const JointDist2& p2zx) {
  if (p3zx.pair != p2zx.pair) {
    throw std::invalid_argument("invasiveness: tables belong to different time pairs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sum += std::abs(p3zx.p[i] - p2zx.p[i]);
  return sum;
}

double invasiveness(const EvolutionEngine& engine, const Scheme& scheme) {
  return invasiveness(marginal_zx(p3(engine, scheme)), p2(engine, scheme, TimePair::zero_t_tau));
}

ComplexMatrix conditional_state(const EvolutionEngine& engine, const DichotomicObservable& obs_x,
                                Outcome x, double t) {
  return engine.evolve_system(obs_x.projector(x), t);
}

DniScheme dni_scheme(const EvolutionEngine& engine, double t, double tau,
                     const BlochDirection& obs_x, const BlochDirection& obs_z,
                     const BlochDirection& fallback, const ComplexMatrix& initial_state,
                     double angle_tol) {
  const auto first = meas::observable_from_bloch(obs_x);
  DniScheme out;
  for (auto x : meas::kOutcomes) {
    const auto dir = meas::dni_direction(conditional_state(engine, first, x, t), fallback);
    out.per_outcome[meas::bit(x)] = dir.direction;
    out.per_outcome_degenerate[meas::bit(x)] = dir.degenerate;
  }
  const bool deg_plus = out.per_outcome_degenerate[0];
  const bool deg_minus = out.per_outcome_degenerate[1];
  if (!deg_plus && !deg_minus) {
    const double angle = meas::axis_angle(out.per_outcome[0], out.per_outcome[1]);
    if (angle > angle_tol) {
      throw BasisDisagreement("dni_scheme: conditional states for x = +1 and x = -1 are diagonal "
                              "in different bases (axis angle " +
                              std::to_string(angle) + " rad)");
    }
  }
  if (!deg_plus) {
    out.intermediate = out.per_outcome[0];
  } else if (!deg_minus) {
    out.intermediate = out.per_outcome[1];
  } else {
    out.intermediate = fallback;
    out.degenerate = true;
  }
  out.scheme = Scheme::make(t, tau, obs_x, out.intermediate, obs_z, initial_state);
  return out;
}

CorrelatorSet correlators(const JointDist3& p3) {
  CorrelatorSet c;
  for (auto z : meas::kOutcomes) {
    for (auto y : meas::kOutcomes) {
      for (auto x : meas::kOutcomes) {
        const double p = p3.at(z, y, x);
        const double sz = meas::sign(z);
        const double sy = meas::sign(y);
        const double sx = meas::sign(x);
        c.c_x += sx * p;
        c.c_y += sy * p;
        c.c_z += sz * p;
        c.c_yx += sy * sx * p;
        c.c_zy += sz * sy * p;
        c.c_zx += sz * sx * p;
        c.c_zyx += sz * sy * sx * p;
      }
    }
  }
  return c;
}

double extract_d_ttau(const CorrelatorSet& cs, double theta, double phi, double d_sum) {
  const double s = std::sin(theta);
  const double c2 = std::cos(2.0 * phi);
  if (std::abs(s) < 1e-8 || std::abs(c2) < 1e-8) {
    throw std::invalid_argument("extract_d_ttau: sin(theta) or cos(2 phi) vanishes");
  }
  return (2.0 * cs.c_zx / (s * s) - d_sum) / c2;
}

LGIResult lgi_value(double corr_yx, double corr_zy, double corr_zx, double tol) {
  LGIResult r;
  r.corr_yx = corr_yx;
  r.corr_zy = corr_zy;
  r.corr_zx = corr_zx;
  r.k = corr_yx + corr_zy - corr_zx;
  r.violated = r.k > 1.0 + tol || r.k < -3.0 - tol;
  return r;
}

double lgi_decay(const models::ModelSpec& model, double t, double tau) {
  return models::analytic_d(model, t) + models::analytic_d(model, tau) -
         models::analytic_d(model, t + tau);
}

LGIResult lgi_from_engine(const EvolutionEngine& engine, const Scheme& scheme, double tol) {
  return lgi_value(p2(engine, scheme, TimePair::zero_t).correlator(),
                   p2(engine, scheme, TimePair::t_t_tau).correlator(),
                   p2(engine, scheme, TimePair::zero_t_tau).correlator(), tol);
}

FactorizationResult markov_factorization_distance(const JointDist3& p3, const JointDist2& p2_yx,
                                                  const JointDist2& p2_zy) {
  if (p2_yx.pair != TimePair::zero_t || p2_zy.pair != TimePair::t_t_tau) {
    throw std::invalid_argument("markov_factorization_distance: expected (0,t) and (t,t+tau) tables");
  }
  constexpr double kFloor = 1e-12;
  FactorizationResult r;
  for (auto z : meas::kOutcomes) {
    for (auto y : meas::kOutcomes) {
      const double py = p2_zy.at(meas::Outcome::plus, y) + p2_zy.at(meas::Outcome::minus, y);
      for (auto x : meas::kOutcomes) {
        const double px = p2_yx.at(meas::Outcome::plus, x) + p2_yx.at(meas::Outcome::minus, x);
        const double observed = p3.at(z, y, x);
        if (py < kFloor || px < kFloor) {
          ++r.skipped;
          continue;
        }
        const double predicted = p2_zy.at(z, y) / py * p2_yx.at(y, x);
        r.distance += std::abs(observed - predicted);
      }
    }
  }
  return r;
}

FactorizationResult markov_factorization_distance(const EvolutionEngine& engine,
                                                  const Scheme& scheme) {
  return markov_factorization_distance(p3(engine, scheme), p2(engine, scheme, TimePair::zero_t),
                                       p2(engine, scheme, TimePair::t_t_tau));
}

}  // namespace dnilab::protocol
