#pragma once

// Dense complex-matrix primitives shared by the rest of the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace aqec {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Centralized numerical tolerances.
namespace tol {
inline constexpr double herm = 1e-10;   // Hermiticity, max absolute deviation
inline constexpr double psd = 1e-9;     // eigenvalues in [-psd, 0) are clamped to 0
inline constexpr double equal = 1e-8;   // Frobenius equality checks
inline constexpr double trace = 1e-10;  // unit trace of density matrices
}  // namespace tol

/// Library error. `code()` is a short stable identifier such as "bad-dims".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  explicit Error(std::string code) : Error(code, "aqec error") {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw Error("non-finite", std::string(what) + " has NaN/Inf entries");
}

inline Matrix dagger(const Matrix& m) {
  return m.adjoint();
}

inline Matrix hermitian_part(const Matrix& m) {
  return (m + m.adjoint()) * 0.5;
}

/// Largest absolute entry of m - m^dagger.
inline double hermiticity_error(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix identity(Index d) {
  return Matrix::Identity(d, d);
}

/// Eigendecomposition of the Hermitian part of h, eigenvalues ascending.
struct Eigh {
  RealVector values;
  Matrix vectors;
};

inline Eigh eigh(const Matrix& h) {
  if (h.rows() != h.cols()) throw Error("bad-dims", "eigh needs a square matrix");
  if (h.size() == 0) return {RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) throw Error("numeric", "Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Reassemble U diag(f(lambda)) U^dagger.
template <typename F>
Matrix spectral_apply(const Eigh& e, F&& f) {
  RealVector fv = e.values.unaryExpr(std::forward<F>(f));
  return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

inline double min_eigenvalue(const Matrix& h) {
  return eigh(h).values.minCoeff();
}

inline double max_eigenvalue(const Matrix& h) {
  return eigh(h).values.maxCoeff();
}

/// Kronecker product, row index of the result is (row_a * b.rows() + row_b).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Tensor factor selector for partial traces.
enum class Factor { first, second };

/// Dimensions of a bipartite space A (x) B.
struct TensorDims {
  Index first = 0;
  Index second = 0;
};

/// Trace out one factor of an operator on A (x) B (A is the first, slower index).
inline Matrix partial_trace(const Matrix& m, TensorDims dims, Factor which) {
  const Index da = dims.first;
  const Index db = dims.second;
  if (da <= 0 || db <= 0 || m.rows() != da * db || m.cols() != da * db) {
    throw Error("bad-tensor-dims", "partial_trace: matrix side does not equal the product of the factor dimensions");
  }
  if (which == Factor::second) {
    Matrix out = Matrix::Zero(da, da);
    for (Index i = 0; i < da; ++i)
      for (Index j = 0; j < da; ++j)
        for (Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (Index k = 0; k < da; ++k) out += m.block(k * db, k * db, db, db);
  return out;
}

/// PSD square root. Eigenvalues in [-tol::psd, 0) are clamped to zero.
inline Matrix psd_sqrt(const Matrix& h) {
  if (h.rows() != h.cols()) throw Error("bad-dims", "psd_sqrt needs a square matrix");
  if (h.size() == 0) return h;
  const Eigh e = eigh(h);
  if (e.values.minCoeff() < -tol::psd) {
    throw Error("not-psd", "psd_sqrt: eigenvalue " + std::to_string(e.values.minCoeff()) + " below tolerance");
  }
  return spectral_apply(e, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

/// Trace of the PSD square root; the eigenvalue check of psd_sqrt applies.
inline double trace_sqrt_psd(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  const Eigh e = eigh(h);
  if (e.values.minCoeff() < -tol::psd) {
    throw Error("not-psd", "trace_sqrt_psd: eigenvalue " + std::to_string(e.values.minCoeff()) + " below tolerance");
  }
  double s = 0.0;
  for (Index i = 0; i < e.values.size(); ++i) s += e.values(i) > 0.0 ? std::sqrt(e.values(i)) : 0.0;
  return s;
}

inline RealVector singular_values(const Matrix& x) {
  if (x.size() == 0) return RealVector(0);
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues();
}

/// Sum of singular values; rectangular input allowed.
inline double trace_norm(const Matrix& x) {
  return singular_values(x).sum();
}

inline double operator_norm(const Matrix& x) {
  const RealVector s = singular_values(x);
  return s.size() == 0 ? 0.0 : s.maxCoeff();
}

/// Polar decomposition x = w p, p = sqrt(x^dagger x).
///
/// For square x, w is unitary. For tall x (rows > cols) w is an isometry and
/// for wide x a co-isometry. On ker(p), w is fixed deterministically: the
/// kernel is mapped as close to the identity embedding as the orthogonal
/// complement of range(x) allows, so polar(0) = (I, 0).
struct Polar {
  Matrix w;
  Matrix p;
};

inline Polar polar(const Matrix& x) {
  const Index m = x.rows();
  const Index n = x.cols();
  if (x.size() == 0) return {Matrix::Zero(m, n), Matrix::Zero(n, n)};
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const double cutoff = std::max(1e-13, 1e-12 * (s.size() ? s(0) : 0.0));
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;

  Matrix p = v.leftCols(s.size()) * s.cast<cplx>().asDiagonal() * v.leftCols(s.size()).adjoint();
  Matrix w = u.leftCols(rank) * v.leftCols(rank).adjoint();

  const Index kernel = n - rank;
  const Index complement = m - rank;
  const Index filled = std::min(kernel, complement);
  if (filled > 0) {
    const Matrix vk = v.rightCols(kernel);
    const Matrix uc = u.rightCols(complement);
    Matrix embed = Matrix::Zero(m, n);
    for (Index i = 0; i < std::min(m, n); ++i) embed(i, i) = 1.0;
    // Align the kernel with the identity embedding inside range(x)^perp.
    const Matrix overlap = uc.adjoint() * embed * vk;
    Eigen::JacobiSVD<Matrix> inner(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix q = inner.matrixU().leftCols(filled) * inner.matrixV().leftCols(filled).adjoint();
    w += uc * q * vk.adjoint();
  }
  return {w, p};
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
  return (a - b).norm();
}

}  // namespace aqec
