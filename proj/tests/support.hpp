#pragma once

// Independent reference computations for the unit tests. These use plain
// loops and explicit constructions and share no code path with the library
// routines they check.

#include <cmath>
#include <vector>

#include "aqec/aqec.hpp"

namespace aqec::testing {

inline Matrix naive_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Partial trace over one factor of a da x db system, written out with loops.
inline Matrix naive_partial_trace(const Matrix& m, Index da, Index db, bool trace_second) {
  const Index keep = trace_second ? da : db;
  Matrix out = Matrix::Zero(keep, keep);
  for (Index i = 0; i < keep; ++i) {
    for (Index j = 0; j < keep; ++j) {
      const Index n = trace_second ? db : da;
      for (Index k = 0; k < n; ++k) {
        out(i, j) += trace_second ? m(i * db + k, j * db + k) : m(k * db + i, k * db + j);
      }
    }
  }
  return out;
}

/// Square root of a PSD matrix from its SVD (singular vectors coincide with
/// eigenvectors).
inline Matrix svd_sqrt(const Matrix& h) {
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.singularValues().cwiseSqrt().cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
}

/// Uhlmann fidelity from the singular values of sqrt(rho) sqrt(sigma).
inline double svd_fidelity(const Matrix& rho, const Matrix& sigma) {
  Eigen::JacobiSVD<Matrix> svd(svd_sqrt(rho) * svd_sqrt(sigma));
  return svd.singularValues().sum();
}

/// F_rho(N, M) on the purification sum_k |k> (x) sqrt(rho)^T |k>, output
/// factor first, with the extended outputs built entry by entry.
inline double reference_entanglement_fidelity(const Channel& n, const Channel& m, const Matrix& rho) {
  const Index d = rho.rows();
  const Matrix s = svd_sqrt(rho).transpose();
  const auto extended = [&](const Channel& c) {
    const Index dout = c.dim_out();
    Matrix out = Matrix::Zero(dout * d, dout * d);
    for (Index a = 0; a < d; ++a) {
      for (Index b = 0; b < d; ++b) {
        Matrix unit = Matrix::Zero(d, d);
        unit(a, b) = 1.0;
        Matrix ca = Matrix::Zero(dout, dout);
        for (const Matrix& k : c.kraus()) ca += k * unit * k.adjoint();
        const Matrix rb = s.col(a) * s.col(b).adjoint();
        out += naive_kron(ca, rb);
      }
    }
    return out;
  };
  return svd_fidelity(extended(n), extended(m));
}

/// Entry (i, j) = Tr(E_i rho E_j^dagger).
inline Matrix reference_complement_output(const Channel& c, const Matrix& rho) {
  const Index k = static_cast<Index>(c.size());
  Matrix out(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) out(i, j) = (c.kraus(i) * rho * c.kraus(j).adjoint()).trace();
  return out;
}

/// Random unitary mixing of the Kraus family, padded to `extra` more operators.
inline Channel remix_kraus(random::Rng& rng, const Channel& c, Index extra) {
  const Index k = static_cast<Index>(c.size());
  const Matrix u = random::unitary(rng, k + extra);
  std::vector<Matrix> out;
  for (Index a = 0; a < k + extra; ++a) {
    Matrix f = Matrix::Zero(c.dim_out(), c.dim_in());
    for (Index i = 0; i < k; ++i) f += u(a, i) * c.kraus(i);
    out.push_back(std::move(f));
  }
  return Channel::from_kraus(std::move(out));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Action equality on the matrix-unit basis of the input space.
inline double action_distance(const Channel& a, const Channel& b) {
  double worst = 0.0;
  const Index d = a.dim_in();
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      worst = std::max(worst, max_abs_diff(aqec::apply(a, unit), aqec::apply(b, unit)));
    }
  }
  return worst;
}

}  // namespace aqec::testing
