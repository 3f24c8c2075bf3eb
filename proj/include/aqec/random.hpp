#pragma once

// Seeded random matrices, states and channels for tests, oracles and the CLI.

#include <cstdint>
#include <random>
#include <vector>

#include "aqec/channel.hpp"

namespace aqec::random {

using Rng = std::mt19937_64;

inline Matrix ginibre(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) g(i, j) = cplx(n(rng), n(rng));
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline Matrix unitary(Rng& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

/// Isometry with orthonormal columns, rows >= cols.
inline Matrix isometry(Rng& rng, Index rows, Index cols) {
  return unitary(rng, rows).leftCols(cols);
}

/// rho = G G^dagger / Tr with G a square Ginibre matrix.
inline DensityMatrix state(Rng& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  return DensityMatrix::normalized(g * g.adjoint());
}

inline DensityMatrix pure_state(Rng& rng, Index d) {
  return DensityMatrix::pure(ginibre(rng, d, 1).col(0));
}

/// Random CPTP map with `kraus` Kraus elements from a Haar isometry.
inline Channel channel(Rng& rng, Index dim_in, Index dim_out, Index kraus) {
  if (kraus < 1 || dim_out * kraus < dim_in) throw Error("bad-param", "need dim_out * kraus >= dim_in for a CPTP map");
  const Matrix v = isometry(rng, dim_out * kraus, dim_in);
  std::vector<Matrix> ks;
  for (Index k = 0; k < kraus; ++k) ks.push_back(v.middleRows(k * dim_out, dim_out));
  return Channel::from_kraus(std::move(ks));
}

inline Matrix hermitian(Rng& rng, Index d) {
  return hermitian_part(ginibre(rng, d, d));
}

}  // namespace aqec::random
