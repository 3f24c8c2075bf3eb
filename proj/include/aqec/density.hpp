#pragma once

#include <string>

#include "aqec/matops.hpp"

namespace aqec {

/// Positive semidefinite, unit-trace complex matrix.
///
/// Construction through `from_matrix` validates the invariants; `unchecked`
/// is for results whose validity follows from how they were produced.
class DensityMatrix {
 public:
  DensityMatrix() = default;

  static DensityMatrix from_matrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw Error("bad-dims", "density matrix must be square and nonempty");
    require_finite(m, "density matrix");
    if (hermiticity_error(m) > tol::herm) throw Error("not-hermitian", "density matrix is not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > tol::trace) {
      throw Error("bad-trace", "density matrix trace " + std::to_string(m.trace().real()) + " differs from 1");
    }
    if (min_eigenvalue(m) < -tol::herm) throw Error("not-psd", "density matrix has a negative eigenvalue");
    return DensityMatrix(hermitian_part(m));
  }

  /// Hermitize and rescale to unit trace, then validate.
  static DensityMatrix normalized(const Matrix& m) {
    Matrix h = hermitian_part(m);
    const double t = h.trace().real();
    if (!(t > 0.0)) throw Error("bad-trace", "cannot normalize a matrix with nonpositive trace");
    return from_matrix(h / t);
  }

  static DensityMatrix unchecked(Matrix m) { return DensityMatrix(std::move(m)); }

  static DensityMatrix maximally_mixed(Index d) { return DensityMatrix(identity(d) / static_cast<double>(d)); }

  static DensityMatrix pure(const Vector& psi) {
    const double n = psi.norm();
    if (!(n > 0.0)) throw Error("bad-param", "zero state vector");
    const Vector u = psi / n;
    return DensityMatrix(u * u.adjoint());
  }

  static DensityMatrix basis(Index d, Index k) {
    Matrix m = Matrix::Zero(d, d);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m));
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

}  // namespace aqec
