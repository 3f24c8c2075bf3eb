#pragma once

// State fidelity, entanglement fidelity between channels, worst-case
// entanglement fidelity and the Bures-style distances built on them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "aqec/channel.hpp"
#include "aqec/optimize.hpp"

namespace aqec {

/// f(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)) = ||sqrt(rho) sqrt(sigma)||_1.
/// The trace-norm form keeps rank-deficient inputs accurate to rounding.
inline double state_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
    throw Error("bad-dims", "state_fidelity: operators differ in shape");
  }
  return trace_norm(psd_sqrt(hermitian_part(rho)) * psd_sqrt(hermitian_part(sigma)));
}

inline double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return state_fidelity(rho.matrix(), sigma.matrix());
}

inline void check_same_shape(const Channel& n, const Channel& m) {
  if (n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out()) {
    throw Error("bad-dims", "channels differ in input or output dimension");
  }
}

/// F_psi(N, M) for an explicit purification psi on (input) (x) R.
inline double entanglement_fidelity(const Channel& n, const Channel& m, const Vector& purification) {
  check_same_shape(n, m);
  return state_fidelity(apply_extended(n, purification), apply_extended(m, purification));
}

/// F_rho(N, M) on the canonical purification of rho.
inline double entanglement_fidelity(const Channel& n, const Channel& m, const DensityMatrix& rho) {
  check_same_shape(n, m);
  if (rho.dim() != n.dim_in()) throw Error("bad-dims", "state dimension does not match channel input");
  return entanglement_fidelity(n, m, purify(rho).vector);
}

/// Evaluates F_rho(N, M) as the trace norm of T_ij = Tr(rho E_i^dagger F_j),
/// which equals the fidelity of the two extended outputs. The products
/// E_i^dagger F_j are formed once, so repeated evaluation is cheap.
class EntanglementFidelity {
 public:
  EntanglementFidelity(const Channel& n, const Channel& m) : k_(n.size()), l_(m.size()), d_(n.dim_in()) {
    check_same_shape(n, m);
    products_.reserve(k_ * l_);
    for (const Matrix& e : n.kraus())
      for (const Matrix& f : m.kraus()) products_.push_back((e.adjoint() * f).transpose());
  }

  Matrix overlap(const Matrix& rho) const {
    if (rho.rows() != d_) throw Error("bad-dims", "state dimension does not match channel input");
    Matrix t(static_cast<Index>(k_), static_cast<Index>(l_));
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < l_; ++j) t(static_cast<Index>(i), static_cast<Index>(j)) = products_[i * l_ + j].cwiseProduct(rho).sum();
    return t;
  }

  double operator()(const Matrix& rho) const { return trace_norm(overlap(rho)); }
  double operator()(const DensityMatrix& rho) const { return (*this)(rho.matrix()); }

  Index dim() const { return d_; }

 private:
  std::size_t k_;
  std::size_t l_;
  Index d_;
  std::vector<Matrix> products_;  // (E_i^dagger F_j)^T
};

inline double entanglement_fidelity_gram(const Channel& n, const Channel& m, const DensityMatrix& rho) {
  return EntanglementFidelity(n, m)(rho);
}

struct FidelityValue {
  double value = 0.0;
  std::optional<DensityMatrix> argmin_state;
  int starts = 0;
  bool converged = false;
};

/// F(N, M) = min over states of F_rho(N, M).
inline FidelityValue worst_case_fidelity(const Channel& n, const Channel& m, const MinimizeConfig& cfg = {}) {
  const EntanglementFidelity ef(n, m);
  const StateMinimum best = minimize_over_states([&](const DensityMatrix& rho) { return ef(rho); }, n.dim_in(), cfg);
  return {best.value, best.state, best.starts, best.converged};
}

/// Deficits within a few ulps of 1 are rounding, and would otherwise become
/// distances near 1.5e-8 after the square root.
inline double bures_from_fidelity(double f) {
  const double deficit = 1.0 - f;
  return deficit <= 8.0 * std::numeric_limits<double>::epsilon() ? 0.0 : std::sqrt(deficit);
}

/// d(N, M) = sqrt(1 - F(N, M))
inline double bures_distance(const Channel& n, const Channel& m, const MinimizeConfig& cfg = {}) {
  return bures_from_fidelity(worst_case_fidelity(n, m, cfg).value);
}

/// d_rho(N, M) = sqrt(1 - F_rho(N, M))
inline double bures_distance_at(const Channel& n, const Channel& m, const DensityMatrix& rho) {
  return bures_from_fidelity(entanglement_fidelity(n, m, rho));
}

}  // namespace aqec
