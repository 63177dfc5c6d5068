#pragma once

// Dense complex linear algebra and channel primitives shared by every engine.
//
// Conventions used throughout the library:
//  * operators are Eigen::MatrixXcd values,
//  * composite spaces are ordered system (most significant) then environment,
//  * superoperators act on column-stacked operators: vec(X)[i + j*d] = X(i, j),
//    so vec(A X B) = (B^T kron A) vec(X).

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dnilab::qmath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Numerical tolerances; every check in the library takes one of these.
struct Tolerances {
  double herm = 1e-10;   ///< max |rho - rho^dagger| entry
  double trace = 1e-10;  ///< |Tr rho - 1|
  double psd = 1e-9;     ///< smallest eigenvalue must be >= -psd
  double degen = 1e-9;   ///< eigenvalue gap, relative to max(range, radius)
};

ComplexMatrix identity(std::size_t dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
double hermiticity_error(const ComplexMatrix& m);
/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

struct DensityReport {
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};

DensityReport inspect_density(const ComplexMatrix& m, const Tolerances& tol = {});

/// Trace-one, Hermitian, positive semidefinite matrix. Construction validates.
class DensityMatrix {
 public:
  /// Throws std::invalid_argument when `m` is not a valid density matrix.
  static DensityMatrix from_matrix(ComplexMatrix m, const Tolerances& tol = {});
  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix pure(const ComplexVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// Partial trace of an operator on a tensor product with factor dimensions
/// `dims`, keeping the (sorted, unique) factor indices in `keep`.
/// Throws std::invalid_argument on dimension mismatch or an invalid keep set.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& state, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// One eigenspace of a Hermitian matrix. Multiplicity > 1 marks a degenerate group.
struct Eigenspace {
  double eigenvalue = 0.0;
  ComplexMatrix projector;
  std::size_t multiplicity = 1;
};

struct Spectrum {
  std::vector<double> eigenvalues;  ///< descending, repeated by multiplicity
  ComplexMatrix eigenvectors;       ///< column k belongs to eigenvalues[k]
  std::vector<Eigenspace> eigenspaces;
  bool degenerate = false;

  ComplexMatrix reconstruct() const;
};

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted
/// descending; each eigenvector has its largest-magnitude component (first one
/// on ties) made real and positive. Eigenvalues closer than tol.degen (relative)
/// are grouped into one multi-dimensional projector.
/// Throws std::invalid_argument for non-Hermitian input.
Spectrum herm_eig(const ComplexMatrix& h, const Tolerances& tol = {});

/// exp(m) by Pade scaling and squaring. Throws std::overflow_error when the
/// result is not finite.
ComplexMatrix matrix_exp(const ComplexMatrix& m);

ComplexVector vec(const ComplexMatrix& m);
ComplexMatrix unvec(const ComplexVector& v, std::size_t dim);

/// Linear map on dim x dim operators stored as a dim^2 x dim^2 matrix acting
/// on column-stacked operators.
struct Superoperator {
  std::size_t dim = 0;
  ComplexMatrix matrix;

  ComplexMatrix apply(const ComplexMatrix& x) const;
  Superoperator compose(const Superoperator& first) const;  ///< this o first
};

Superoperator identity_channel(std::size_t dim);
/// X -> A X B
Superoperator sandwich(const ComplexMatrix& a, const ComplexMatrix& b);
/// Tomographic reconstruction: applies `map` to every matrix unit |i><j|.
Superoperator superop_from_map(std::size_t dim,
                               const std::function<ComplexMatrix(const ComplexMatrix&)>& map);

/// C = sum_ij |i><j| kron S[|i><j|]
ComplexMatrix choi_matrix(const Superoperator& s);
double choi_min_eigenvalue(const Superoperator& s);
bool is_cp(const Superoperator& s, double tol = 1e-9);
/// max_ij |Tr S[|i><j|] - delta_ij|; zero for a trace-preserving map.
double trace_preservation_error(const Superoperator& s);

ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng);
/// Ginibre-distributed full-rank density matrix.
ComplexMatrix random_density(std::size_t dim, std::mt19937_64& rng);

}  // namespace dnilab::qmath
