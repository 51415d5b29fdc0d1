#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>

#include "qel/config.hpp"
#include "qel/errors.hpp"
#include "qel/rng.hpp"

namespace qel {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline bool is_power_of_two(std::int64_t v) {
  return v > 0 && (v & (v - 1)) == 0;
}

inline int floor_log2(std::int64_t v) {
  if (v < 1) throw ArgumentError("floor_log2: argument must be positive");
  return 63 - std::countl_zero(static_cast<std::uint64_t>(v));
}

/// 2^n_qubits with the shift guarded; callers still apply max_dim() where
/// they allocate.
inline std::int64_t dim_for_qubits(int n_qubits, const char* what) {
  if (n_qubits < 0 || n_qubits > 48) {
    throw ArgumentError(std::string(what) + ": qubit count out of range");
  }
  return std::int64_t{1} << n_qubits;
}

/// Largest entrywise modulus, max_{i,j} |M_{i,j}|.
inline double max_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// Unit vector in a 2^n dimensional space.
class PureState {
 public:
  PureState(int n_qubits, Vector amplitudes)
      : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    const std::int64_t dim = dim_for_qubits(n_qubits, "PureState");
    if (amps_.size() != dim) {
      throw ArgumentError("PureState: amplitude count " +
                          std::to_string(amps_.size()) + " is not 2^" +
                          std::to_string(n_qubits));
    }
    if (std::abs(amps_.norm() - 1.0) > tol.norm) {
      throw ArgumentError("PureState: vector is not normalized");
    }
  }

  /// Normalizes the vector first; rejects the zero vector.
  static PureState normalized(int n_qubits, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n < 1e-300) throw ArgumentError("PureState: zero vector");
    return PureState(n_qubits, amplitudes / n);
  }

  static PureState basis(int n_qubits, std::int64_t index) {
    const std::int64_t dim = dim_for_qubits(n_qubits, "PureState::basis");
    if (index < 0 || index >= dim) {
      throw ArgumentError("PureState::basis: index out of range");
    }
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return PureState(n_qubits, std::move(v));
  }

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }

  Complex inner(const PureState& other) const {
    if (dim() != other.dim()) throw ArgumentError("inner: dimension mismatch");
    return amps_.dot(other.amps_);  // Eigen's dot conjugates the left side
  }

  /// |<this|other>|^2
  double fidelity(const PureState& other) const {
    const double f = std::norm(inner(other));
    return f > 1.0 ? 1.0 : f;
  }

 private:
  int n_qubits_;
  Vector amps_;
};

/// Hermitian idempotent matrix with known rank.
///
/// Construction verifies Hermiticity, idempotency and trace == rank. The
/// spectral {0,1} invariant follows from those and is exercised separately
/// by the property tests (a full eigensolve per construction would dominate
/// the experiment runtimes).
class Projector {
 public:
  Projector(Matrix matrix, int rank) : m_(std::move(matrix)), rank_(rank) {
    check_shape();
    if (max_norm(m_ - m_.adjoint()) > tol.algebra) {
      throw ArgumentError("Projector: matrix is not Hermitian");
    }
    if (max_norm(m_ * m_ - m_) > tol.algebra) {
      throw ArgumentError("Projector: matrix is not idempotent");
    }
    check_trace();
  }

  /// Builds P = V V* from a frame of orthonormal columns. Verifies V*V = I,
  /// which implies idempotency without forming the dim^3 product P*P.
  static Projector from_orthonormal_columns(const Matrix& v) {
    const Eigen::Index rank = v.cols();
    Matrix gram = v.adjoint() * v;
    if (max_norm(gram - Matrix::Identity(rank, rank)) > tol.algebra) {
      throw ArgumentError("Projector: columns are not orthonormal");
    }
    Matrix p = v * v.adjoint();
    // Symmetrize away the last rounding residue.
    p = ((p + p.adjoint()) * 0.5).eval();
    return Projector(std::move(p), static_cast<int>(rank), unchecked_tag{});
  }

  static Projector identity(std::int64_t dim) {
    return Projector(Matrix::Identity(dim, dim), static_cast<int>(dim));
  }

  std::int64_t dim() const { return m_.rows(); }
  int rank() const { return rank_; }
  const Matrix& matrix() const { return m_; }

 private:
  struct unchecked_tag {};
  Projector(Matrix matrix, int rank, unchecked_tag)
      : m_(std::move(matrix)), rank_(rank) {
    check_shape();
    check_trace();
  }

  void check_shape() const {
    if (m_.rows() != m_.cols()) throw ArgumentError("Projector: not square");
    if (!is_power_of_two(m_.rows())) {
      throw ArgumentError("Projector: dimension must be a power of two");
    }
    if (rank_ < 1 || rank_ > m_.rows()) {
      throw ArgumentError("Projector: rank out of range");
    }
  }
  void check_trace() const {
    const Complex tr = m_.trace();
    if (std::abs(tr.real() - rank_) > 1e-6 * static_cast<double>(m_.rows()) ||
        std::abs(tr.imag()) > tol.algebra) {
      throw ArgumentError("Projector: trace does not match rank");
    }
  }

  Matrix m_;
  int rank_;
};

/// Hermitian, trace-one matrix. Positivity is checked spectrally on
/// construction only up to a size cap; validate_spectrum() runs it on demand.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix matrix) : m_(std::move(matrix)) {
    if (m_.rows() != m_.cols()) throw ArgumentError("DensityMatrix: not square");
    if (max_norm(m_ - m_.adjoint()) > tol.algebra) {
      throw ArgumentError("DensityMatrix: matrix is not Hermitian");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr.real() - 1.0) > 1e-8 || std::abs(tr.imag()) > 1e-9) {
      throw ArgumentError("DensityMatrix: trace is not 1");
    }
    if (m_.rows() <= kSpectralCheckCap) validate_spectrum();
  }

  std::int64_t dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  void validate_spectrum() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m_,
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
      throw ArgumentError("DensityMatrix: negative eigenvalue");
    }
  }

 private:
  static constexpr std::int64_t kSpectralCheckCap = 512;
  Matrix m_;
};

/// Eigendecomposition of a Hermitian matrix: eigenvalues descending, the
/// matching eigenvectors as orthonormal columns.
struct EigenSystem {
  Eigen::VectorXd values;
  Matrix vectors;
};

inline EigenSystem eigen_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("eigen_hermitian: not square");
  if (max_norm(m - m.adjoint()) > 1e-8) {
    throw ArgumentError("eigen_hermitian: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error("eigen_hermitian: eigensolver failed");
  }
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

/// Haar-distributed pure state: 2^{n+1} independent standard Gaussians for
/// the real and imaginary parts, then normalization. Unitary invariance of
/// the Gaussian vector makes the result uniform on the sphere.
inline PureState haar_sample(int n_qubits, Rng& rng) {
  if (n_qubits < 1) throw ArgumentError("haar_sample: need n_qubits >= 1");
  const std::int64_t dim = dim_for_qubits(n_qubits, "haar_sample");
  check_dim(dim, "haar_sample");
  Vector v(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    v(i) = Complex(re, im);
  }
  return PureState::normalized(n_qubits, std::move(v));
}

/// <psi|P|psi>, clamped into [0,1] after discarding the (checked) imaginary
/// residue.
inline double overlap(const PureState& psi, const Projector& p) {
  if (psi.dim() != p.dim()) throw ArgumentError("overlap: dimension mismatch");
  const Complex q = psi.amplitudes().dot(p.matrix() * psi.amplitudes());
  if (std::abs(q.imag()) > 1e-10) {
    throw Error("overlap: imaginary residue exceeds tolerance");
  }
  double r = q.real();
  if (r < 0.0) r = 0.0;
  if (r > 1.0) r = 1.0;
  return r;
}

/// phi = P psi / sqrt(<psi|P|psi>). The result lies in the image of P and
/// satisfies |<psi|phi>|^2 = <psi|P|psi>.
inline PureState project_into_image(const Projector& p, const PureState& psi,
                                    double overlap_floor = 1e-12) {
  const double ov = overlap(psi, p);
  if (ov <= overlap_floor) {
    throw DegenerateProjectionError(
        "project_into_image: overlap " + std::to_string(ov) +
        " at or below floor " + std::to_string(overlap_floor));
  }
  Vector image = p.matrix() * psi.amplitudes();
  return PureState::normalized(psi.n_qubits(), std::move(image));
}

namespace detail {

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns false
/// when a column is numerically dependent on the previous ones.
inline bool orthonormalize_columns(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
      }
    }
    const double n = v.col(j).norm();
    if (n < 1e-6) return false;
    v.col(j) /= n;
  }
  return true;
}

}  // namespace detail

/// Projector onto the span of `rank` random vectors whose entries were
/// rounded to dyadic rationals with `precision_bits` fractional bits. The
/// span of the dyadic vectors is kept exactly (re-orthonormalization does
/// not change it), so the projector has rational entries in exact
/// arithmetic; this is the elementary test fixture for the finder.
inline Projector random_elementary_projector(int n_qubits, int rank,
                                             int precision_bits, Rng& rng) {
  if (n_qubits < 1) throw ArgumentError("random_elementary_projector: n >= 1");
  const std::int64_t dim = dim_for_qubits(n_qubits, "random_elementary_projector");
  check_dim(dim, "random_elementary_projector");
  if (rank < 1 || rank > dim) {
    throw ArgumentError("random_elementary_projector: rank out of range [1, " +
                        std::to_string(dim) + "]");
  }
  if (precision_bits < 1 || precision_bits > 52) {
    throw ArgumentError("random_elementary_projector: precision_bits in [1,52]");
  }
  const double scale = std::ldexp(1.0, precision_bits);
  for (int attempt = 0; attempt < 32; ++attempt) {
    Matrix v(dim, rank);
    for (int j = 0; j < rank; ++j) {
      v.col(j) = haar_sample(n_qubits, rng).amplitudes();
    }
    if (!detail::orthonormalize_columns(v)) continue;
    // Snap to the dyadic grid, then restore orthonormality within the span.
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const Complex c = v(i, j);
        v(i, j) = Complex(std::round(c.real() * scale) / scale,
                          std::round(c.imag() * scale) / scale);
      }
    }
    if (!detail::orthonormalize_columns(v)) continue;
    return Projector::from_orthonormal_columns(v);
  }
  throw Error("random_elementary_projector: rank collapsed repeatedly");
}

/// k-fold Kronecker power of a density matrix.
inline DensityMatrix tensor_power(const DensityMatrix& rho, int k) {
  if (k < 1) throw ArgumentError("tensor_power: k >= 1");
  const std::int64_t base = rho.dim();
  std::int64_t dim = 1;
  for (int i = 0; i < k; ++i) {
    if (dim > max_dim() / base) {
      throw ResourceError("tensor_power: dim^" + std::to_string(k) +
                          " exceeds limit " + std::to_string(max_dim()));
    }
    dim *= base;
  }
  Matrix acc = rho.matrix();
  for (int i = 1; i < k; ++i) {
    const Matrix& a = acc;
    const Matrix& b = rho.matrix();
    Matrix next(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) =
            a(r, c) * b;
      }
    }
    acc = std::move(next);
  }
  return DensityMatrix(std::move(acc));
}

}  // namespace qel
