#pragma once

// Projective qubit measurements along Bloch directions.

#include <array>
#include <numbers>

#include "dnilab/qmath.hpp"

namespace dnilab::meas {

using qmath::ComplexMatrix;

enum class Outcome : int { plus = 1, minus = -1 };

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::plus, Outcome::minus};

constexpr int sign(Outcome o) { return static_cast<int>(o); }
/// 0 for +1, 1 for -1; used to index outcome tables.
constexpr std::size_t bit(Outcome o) { return o == Outcome::plus ? 0 : 1; }

/// Polar angles of a unit vector; theta in [0, pi], phi in [0, 2 pi).
struct BlochDirection {
  double theta = std::numbers::pi / 2;
  double phi = 0.0;

  /// Validates the angle ranges (phi is wrapped into [0, 2 pi) first).
  static BlochDirection make(double theta, double phi);
  /// Direction of a nonzero 3-vector.
  static BlochDirection from_vector(const std::array<double, 3>& v);
  std::array<double, 3> unit_vector() const;
};

inline const BlochDirection kXAxis{std::numbers::pi / 2, 0.0};
inline const BlochDirection kYAxis{std::numbers::pi / 2, std::numbers::pi / 2};
inline const BlochDirection kZAxis{0.0, 0.0};

/// Angle between the measurement axes of two directions, ignoring orientation
/// (n and -n describe the same basis). In [0, pi/2].
double axis_angle(const BlochDirection& a, const BlochDirection& b);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double norm() const;
};

/// Two rank-one projectors with outcome values +1 / -1. The +1 projector's
/// Bloch vector is aligned with `axis`.
struct DichotomicObservable {
  ComplexMatrix plus;
  ComplexMatrix minus;
  BlochDirection axis;

  const ComplexMatrix& projector(Outcome o) const { return o == Outcome::plus ? plus : minus; }
};

/// E(+/-) = (I +/- n.sigma) / 2
DichotomicObservable observable_from_bloch(const BlochDirection& dir);

struct SelectiveResult {
  double probability = 0.0;
  ComplexMatrix post_state;
  bool zero_probability = false;
};

/// Probability Tr(E_m rho); the post-measurement state is the projector E_m.
SelectiveResult measure_selective(const qmath::DensityMatrix& rho,
                                  const DichotomicObservable& obs, Outcome outcome);

/// sum_m E_m rho E_m
ComplexMatrix measure_nonselective(const ComplexMatrix& rho, const DichotomicObservable& obs);

BlochVector bloch_vector(const ComplexMatrix& rho);
inline BlochVector bloch_vector(const qmath::DensityMatrix& rho) {
  return bloch_vector(rho.matrix());
}

struct DniDirection {
  BlochDirection direction;
  bool degenerate = false;
};

/// Axis of the eigenbasis of a qubit state, found from herm_eig. The axis is
/// oriented into the canonical hemisphere (z > 0, else x > 0, else y > 0) so
/// states diagonal in the same basis give the same direction. A degenerate
/// state returns `fallback` with the flag set.
DniDirection dni_direction(const ComplexMatrix& rho, const BlochDirection& fallback = kXAxis,
                           const qmath::Tolerances& tol = {});

}  // namespace dnilab::meas
