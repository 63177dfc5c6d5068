#include "dnilab/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnilab::meas {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAxisEps = 1e-12;
}  // namespace

BlochDirection BlochDirection::make(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("Bloch angles must be finite");
  }
  if (theta < 0.0 || theta > std::numbers::pi) {
    throw std::invalid_argument("theta must lie in [0, pi]");
  }
  double wrapped = std::fmod(phi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return {theta, wrapped};
}

BlochDirection BlochDirection::from_vector(const std::array<double, 3>& v) {
  const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(r > 0.0)) throw std::invalid_argument("direction vector must be nonzero");
  const double theta = std::acos(std::clamp(v[2] / r, -1.0, 1.0));
  const double phi = (std::hypot(v[0], v[1]) > 0.0) ? std::atan2(v[1], v[0]) : 0.0;
  return make(theta, phi);
}

std::array<double, 3> BlochDirection::unit_vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double axis_angle(const BlochDirection& a, const BlochDirection& b) {
  const auto u = a.unit_vector();
  const auto v = b.unit_vector();
  // |u x v| is accurate for nearly parallel axes where acos(|u.v|) is not
  const double cx = u[1] * v[2] - u[2] * v[1];
  const double cy = u[2] * v[0] - u[0] * v[2];
  const double cz = u[0] * v[1] - u[1] * v[0];
  const double dot = std::abs(u[0] * v[0] + u[1] * v[1] + u[2] * v[2]);
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DichotomicObservable observable_from_bloch(const BlochDirection& dir) {
  const auto n = dir.unit_vector();
  const ComplexMatrix ns =
      n[0] * qmath::pauli_x() + n[1] * qmath::pauli_y() + n[2] * qmath::pauli_z();
  const ComplexMatrix id = qmath::identity(2);
  return {0.5 * (id + ns), 0.5 * (id - ns), dir};
}

SelectiveResult measure_selective(const qmath::DensityMatrix& rho,
                                  const DichotomicObservable& obs, Outcome outcome) {
  if (rho.dim() != 2) throw std::invalid_argument("measure_selective: qubit state expected");
  const ComplexMatrix& e = obs.projector(outcome);
  SelectiveResult r;
  r.probability = std::clamp((e * rho.matrix()).trace().real(), 0.0, 1.0);
  r.post_state = e;
  r.zero_probability = r.probability == 0.0;
  return r;
}

ComplexMatrix measure_nonselective(const ComplexMatrix& rho, const DichotomicObservable& obs) {
  return obs.plus * rho * obs.plus + obs.minus * rho * obs.minus;
}

BlochVector bloch_vector(const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) {
    throw std::invalid_argument("bloch_vector: 2x2 matrix expected");
  }
  return {(qmath::pauli_x() * rho).trace().real(), (qmath::pauli_y() * rho).trace().real(),
          (qmath::pauli_z() * rho).trace().real()};
}

DniDirection dni_direction(const ComplexMatrix& rho, const BlochDirection& fallback,
                           const qmath::Tolerances& tol) {
  const auto spectrum = qmath::herm_eig(rho, tol);
  if (spectrum.degenerate) return {fallback, true};
  const ComplexMatrix& top = spectrum.eigenspaces.front().projector;
  const BlochVector b = bloch_vector(top);
  std::array<double, 3> v{b.x, b.y, b.z};
  const bool flip = v[2] < -kAxisEps ||
                    (std::abs(v[2]) <= kAxisEps &&
                     (v[0] < -kAxisEps || (std::abs(v[0]) <= kAxisEps && v[1] < 0.0)));
  if (flip) {
    for (auto& c : v) c = -c;
  }
  return {BlochDirection::from_vector(v), false};
}

}  // namespace dnilab::meas
