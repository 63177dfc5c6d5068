#include "dnilab/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace dnilab::qmath {

ComplexMatrix identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(n, n);
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

double trace_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

DensityReport inspect_density(const ComplexMatrix& m, const Tolerances& tol) {
  DensityReport r;
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return r;
  r.hermiticity_error = hermiticity_error(m);
  r.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.valid = r.hermiticity_error <= tol.herm && r.trace_error <= tol.trace &&
            r.min_eigenvalue >= -tol.psd;
  return r;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, const Tolerances& tol) {
  const auto r = inspect_density(m, tol);
  if (!r.valid) {
    throw std::invalid_argument("not a density matrix: hermiticity error " +
                                std::to_string(r.hermiticity_error) + ", trace error " +
                                std::to_string(r.trace_error) + ", min eigenvalue " +
                                std::to_string(r.min_eigenvalue));
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be positive");
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || norm == 0.0) throw std::invalid_argument("zero state vector");
  const ComplexVector u = psi / norm;
  return DensityMatrix(u * u.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Ones(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    throw std::invalid_argument("partial_trace: factor dimensions do not match the operator");
  }
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= dims.size() || (i > 0 && keep[i] <= keep[i - 1])) {
      throw std::invalid_argument("partial_trace: keep must be sorted, unique and in range");
    }
    kept[keep[i]] = true;
  }

  // strides of each factor in the full index (first factor most significant)
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) stride[k - 1] = stride[k] * dims[k];

  std::vector<std::size_t> kept_dims, traced_dims, kept_stride, traced_stride;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (kept[k] ? kept_dims : traced_dims).push_back(dims[k]);
    (kept[k] ? kept_stride : traced_stride).push_back(stride[k]);
  }
  auto offsets = [](const std::vector<std::size_t>& d, const std::vector<std::size_t>& s) {
    std::size_t count = std::accumulate(d.begin(), d.end(), std::size_t{1}, std::multiplies<>());
    std::vector<std::size_t> out(count, 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx, off = 0;
      for (std::size_t k = d.size(); k-- > 0;) {
        off += (rem % d[k]) * s[k];
        rem /= d[k];
      }
      out[idx] = off;
    }
    return out;
  };
  const auto kept_off = offsets(kept_dims, kept_stride);
  const auto traced_off = offsets(traced_dims, traced_stride);

  const auto n = static_cast<Eigen::Index>(kept_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t e : traced_off) {
        acc += m(static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(i)] + e),
                 static_cast<Eigen::Index>(kept_off[static_cast<std::size_t>(j)] + e));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& state, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  Tolerances loose;
  loose.herm = loose.trace = 1e-8;
  return DensityMatrix::from_matrix(partial_trace(state.matrix(), dims, keep), loose);
}

ComplexMatrix Spectrum::reconstruct() const {
  const auto n = eigenvectors.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& space : eigenspaces) out += space.eigenvalue * space.projector;
  return out;
}

Spectrum herm_eig(const ComplexMatrix& h, const Tolerances& tol) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument("herm_eig: matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_error(h) > tol.herm * scale) {
    throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver failed");

  const auto n = h.rows();
  Spectrum s;
  s.eigenvalues.resize(static_cast<std::size_t>(n));
  s.eigenvectors.resize(n, n);
  // Eigen returns ascending order
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;
    s.eigenvalues[static_cast<std::size_t>(k)] = es.eigenvalues()(src);
    ComplexVector v = es.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    const double vmax = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) >= vmax * (1.0 - 1e-12)) {
        pivot = i;
        break;
      }
    }
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    v(pivot) = std::abs(v(pivot));
    s.eigenvectors.col(k) = v;
  }

  const double range = s.eigenvalues.front() - s.eigenvalues.back();
  const double radius =
      std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
  const double gap_tol = tol.degen * std::max(range, radius);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && s.eigenvalues[static_cast<std::size_t>(stop - 1)] -
                               s.eigenvalues[static_cast<std::size_t>(stop)] <=
                           gap_tol) {
      ++stop;
    }
    Eigenspace space;
    space.multiplicity = static_cast<std::size_t>(stop - start);
    const auto block = s.eigenvectors.middleCols(start, stop - start);
    space.projector = block * block.adjoint();
    double sum = 0.0;
    for (Eigen::Index k = start; k < stop; ++k) sum += s.eigenvalues[static_cast<std::size_t>(k)];
    space.eigenvalue = sum / static_cast<double>(space.multiplicity);
    if (space.multiplicity > 1) s.degenerate = true;
    s.eigenspaces.push_back(std::move(space));
    start = stop;
  }
  return s;
}

ComplexMatrix matrix_exp(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exp: matrix must be square");
  if (m.size() == 0) return m;
  ComplexMatrix out = m.exp();
  if (!out.allFinite()) throw std::overflow_error("matrix_exp: result overflowed");
  return out;
}

ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != dim || x.rows() != x.cols()) {
    throw std::invalid_argument("Superoperator::apply: dimension mismatch");
  }
  return unvec(matrix * vec(x), dim);
}

Superoperator Superoperator::compose(const Superoperator& first) const {
  if (first.dim != dim) throw std::invalid_argument("Superoperator::compose: dimension mismatch");
  return {dim, matrix * first.matrix};
}

Superoperator identity_channel(std::size_t dim) { return {dim, identity(dim * dim)}; }

Superoperator sandwich(const ComplexMatrix& a, const ComplexMatrix& b) {
  return {static_cast<std::size_t>(a.rows()), kron(b.transpose(), a)};
}

Superoperator superop_from_map(std::size_t dim,
                               const std::function<ComplexMatrix(const ComplexMatrix&)>& map) {
  const auto d = static_cast<Eigen::Index>(dim);
  Superoperator s{dim, ComplexMatrix::Zero(d * d, d * d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      ComplexMatrix unit = ComplexMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      s.matrix.col(i + j * d) = vec(map(unit));
    }
  }
  return s;
}

ComplexMatrix choi_matrix(const Superoperator& s) {
  const auto d = static_cast<Eigen::Index>(s.dim);
  ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix image = unvec(s.matrix.col(i + j * d), s.dim);
      c.block(i * d, j * d, d, d) = image;
    }
  }
  return c;
}

double choi_min_eigenvalue(const Superoperator& s) {
  const ComplexMatrix c = choi_matrix(s);
  const ComplexMatrix h = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_cp(const Superoperator& s, double tol) { return choi_min_eigenvalue(s) >= -tol; }

double trace_preservation_error(const Superoperator& s) {
  const auto d = static_cast<Eigen::Index>(s.dim);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Complex tr = unvec(s.matrix.col(i + j * d), s.dim).trace();
      worst = std::max(worst, std::abs(tr - Complex(i == j ? 1.0 : 0.0, 0.0)));
    }
  }
  return worst;
}

ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_density(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace dnilab::qmath
