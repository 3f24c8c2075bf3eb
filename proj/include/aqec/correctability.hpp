#pragma once

// Exact and perturbed Knill-Laflamme conditions and the algebra commutant
// condition.
//
// Index convention: lambda is the density operator on the environment
// (Kraus index) space whose entry (i, j) is Tr(sigma E_j^dagger E_i). With
// this ordering the map rho -> sum_ij Tr(rho (lambda_ij I + B_ij)) |i><j|
// coincides with the complementary channel composed with the encoding.

#include <optional>
#include <vector>

#include "aqec/channel.hpp"
#include "aqec/fidelity.hpp"

namespace aqec {

struct KLExactResult {
  bool passes = false;
  Matrix lambda;
  double max_residual = 0.0;
};

inline void check_code_noise(const CodeIsometry& code, const Channel& noise) {
  if (noise.dim_in() != code.dim_physical()) throw Error("bad-dims", "noise input does not match the code's physical dimension");
}

/// P E_j^dagger E_i P = lambda_ij P for all i, j.
inline KLExactResult kl_check_exact(const CodeIsometry& code, const Channel& noise, double tolerance = 1e-9) {
  check_code_noise(code, noise);
  const Matrix p = code.projector();
  const double trace_p = static_cast<double>(code.dim_logical());
  const Index k = static_cast<Index>(noise.size());
  std::vector<Matrix> ep;
  ep.reserve(noise.size());
  for (const Matrix& e : noise.kraus()) ep.push_back(e * p);
  KLExactResult out{true, Matrix::Zero(k, k), 0.0};
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Matrix block = ep[static_cast<std::size_t>(j)].adjoint() * ep[static_cast<std::size_t>(i)];
      const cplx lam = block.trace() / trace_p;
      out.lambda(i, j) = lam;
      out.max_residual = std::max(out.max_residual, (block - lam * p).norm());
    }
  }
  out.passes = out.max_residual <= tolerance;
  return out;
}

struct KLReport {
  Matrix lambda;
  std::vector<Matrix> b_ops;  // V^dagger B_ij V on the logical space, index i * K + j
  double epsilon = 0.0;
  bool exact = false;
  DensityMatrix sigma;         // on the physical space
  std::optional<DensityMatrix> worst_state;

  const Matrix& b(Index i, Index j) const { return b_ops[static_cast<std::size_t>(i * lambda.rows() + j)]; }
};

inline constexpr double kl_exact_tol = 1e-9;

/// V (I/d) V^dagger
inline DensityMatrix encoded_maximally_mixed(const CodeIsometry& code) {
  return DensityMatrix::unchecked(code.projector() / static_cast<double>(code.dim_logical()));
}

/// The channel rho -> sum_ij Tr(rho M_ij) |i><j| on the logical space,
/// built from its Choi matrix.
inline Channel channel_from_gram_operators(const std::vector<Matrix>& ops, Index k, Index d) {
  Matrix j = Matrix::Zero(d * k, d * k);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      // Tr(|a><b| M_ij) = (M_ij)(b, a)
      for (Index i = 0; i < k; ++i)
        for (Index jj = 0; jj < k; ++jj) j(a * k + i, b * k + jj) = ops[static_cast<std::size_t>(i * k + jj)](b, a);
    }
  }
  return kraus_from_choi(hermitian_part(j), d, k);
}

/// Lambda(rho) = lambda Tr(rho) on the logical space.
inline Channel lambda_channel(const KLReport& r, Index dim_logical) {
  return constant_channel(DensityMatrix::unchecked(hermitian_part(r.lambda)), dim_logical);
}

/// (Lambda + B)(rho) = Lambda(rho) + sum_ij Tr(rho B_ij) |i><j|.
inline Channel lambda_plus_b_channel(const KLReport& r) {
  const Index k = r.lambda.rows();
  const Index d = r.b_ops.front().rows();
  std::vector<Matrix> ops;
  ops.reserve(r.b_ops.size());
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) ops.push_back(r.lambda(i, j) * identity(d) + r.b(i, j));
  return channel_from_gram_operators(ops, k, d);
}

/// lambda_ij = Tr(sigma E_j^dagger E_i) for a physical-space state sigma.
inline Matrix kl_lambda(const Channel& noise, const DensityMatrix& sigma) {
  if (sigma.dim() != noise.dim_in()) throw Error("bad-dims", "sigma must live on the physical space");
  const Index k = static_cast<Index>(noise.size());
  Matrix lambda(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      lambda(i, j) = (sigma.matrix() * noise.kraus(static_cast<std::size_t>(j)).adjoint() * noise.kraus(static_cast<std::size_t>(i))).trace();
  return lambda;
}

/// Perturbed KL analysis for a physical-space state sigma (default: the
/// encoded maximally mixed state). epsilon = d(Lambda + B, Lambda).
inline KLReport kl_residual(const CodeIsometry& code, const Channel& noise, const std::optional<DensityMatrix>& sigma = std::nullopt,
                            const MinimizeConfig& cfg = {}) {
  check_code_noise(code, noise);
  const DensityMatrix s = sigma ? *sigma : encoded_maximally_mixed(code);
  if (s.dim() != code.dim_physical()) throw Error("bad-dims", "sigma must live on the physical space");
  const Index k = static_cast<Index>(noise.size());
  const Index d = code.dim_logical();

  KLReport r;
  r.sigma = s;
  r.lambda = kl_lambda(noise, s);
  std::vector<Matrix> ev;
  for (const Matrix& e : noise.kraus()) ev.push_back(e * code.v());
  if (hermiticity_error(r.lambda) > 1e-9 || min_eigenvalue(r.lambda) < -1e-9) {
    throw Error("bad-lambda", "lambda matrix is not positive semidefinite");
  }
  r.b_ops.reserve(static_cast<std::size_t>(k * k));
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      r.b_ops.push_back(ev[static_cast<std::size_t>(j)].adjoint() * ev[static_cast<std::size_t>(i)] - r.lambda(i, j) * identity(d));

  const Channel perturbed = lambda_plus_b_channel(r);
  const Channel base = lambda_channel(r, d);
  const FidelityValue f = worst_case_fidelity(perturbed, base, cfg);
  r.epsilon = bures_from_fidelity(f.value);
  r.worst_state = f.argmin_state;
  r.exact = r.epsilon <= kl_exact_tol;
  return r;
}

/// kl_residual with sigma = V sigma_L V^dagger minimized over logical states.
inline KLReport kl_residual_optimized(const CodeIsometry& code, const Channel& noise, const MinimizeConfig& outer = {},
                                      const MinimizeConfig& inner = {}) {
  const auto encode = [&](const DensityMatrix& logical) {
    return DensityMatrix::unchecked(hermitian_part(code.v() * logical.matrix() * code.v().adjoint()));
  };
  const StateMinimum best = minimize_over_states(
      [&](const DensityMatrix& logical) { return kl_residual(code, noise, encode(logical), inner).epsilon; }, code.dim_logical(), outer);
  return kl_residual(code, noise, encode(best.state), inner);
}

/// [A, V^dagger E_i^dagger E_j V] = 0 for every generator A and all i, j.
inline bool algebra_check(const Channel& noise, const CodeIsometry& code, const std::vector<Matrix>& generators, double tolerance = 1e-9) {
  check_code_noise(code, noise);
  const Index d = code.dim_logical();
  for (const Matrix& a : generators) {
    if (a.rows() != d || a.cols() != d) throw Error("bad-dims", "algebra generators must act on the logical space");
  }
  std::vector<Matrix> ev;
  for (const Matrix& e : noise.kraus()) ev.push_back(e * code.v());
  for (const Matrix& ei : ev) {
    for (const Matrix& ej : ev) {
      const Matrix g = ei.adjoint() * ej;
      for (const Matrix& a : generators) {
        if ((a * g - g * a).norm() > tolerance) return false;
      }
    }
  }
  return true;
}

}  // namespace aqec
