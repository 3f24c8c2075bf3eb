#pragma once

// Complementary-channel estimate of the optimal recovery error and the
// construction of near-optimal recovery channels.
//
// For a channel N (encoding included) with Kraus elements E_i and a logical
// state sigma, the dual fidelity at an input rho is
//
//   F_rho(N^, N^ M^) = Tr sqrt( sum_ij c_ij E_i rho^2 E_j^dagger ),
//   c_ij = Tr(E_j sigma E_i^dagger),
//
// which is also the trace norm of the alignment operator
//
//   X_rho = sum_i sqrt(c)|i> (x) rho E_i^dagger   : physical -> env (x) logical.
//
// X_rho is linear in rho. The isometric part of its polar decomposition at
// the minimizing rho is a recovery dilation whose trace-preserving
// completion meets the distance bound delta.

#include <optional>
#include <utility>
#include <vector>

#include "aqec/channel.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/optimize.hpp"

namespace aqec {

struct RecoveryEstimate {
  double delta = 0.0;
  double fidelity_dual = 1.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  DensityMatrix sigma;
  DensityMatrix argmin_state;
  bool converged = false;
};

/// rho -> F_rho(N^, N^ M^) for M = id and a fixed sigma.
class DualFidelity {
 public:
  DualFidelity(const Channel& channel, const DensityMatrix& sigma)
      : kraus_(channel.kraus()), d_(channel.dim_in()), big_d_(channel.dim_out()) {
    if (sigma.dim() != d_) throw Error("bad-dims", "sigma must live on the channel input space");
    const Index k = static_cast<Index>(kraus_.size());
    c_ = Matrix(k, k);
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) c_(i, j) = (e(j) * sigma.matrix() * e(i).adjoint()).trace();
    sqrt_c_ = psd_sqrt(c_);
    right_.reserve(kraus_.size());
    for (Index i = 0; i < k; ++i) {
      Matrix g = Matrix::Zero(d_, big_d_);
      for (Index j = 0; j < k; ++j) g += c_(i, j) * e(j).adjoint();
      right_.push_back(std::move(g));
    }
  }

  /// W(rho) = sum_ij c_ij E_i rho^2 E_j^dagger
  Matrix w(const Matrix& rho) const {
    const Matrix rho2 = rho * rho;
    Matrix out = Matrix::Zero(big_d_, big_d_);
    for (std::size_t i = 0; i < kraus_.size(); ++i) out.noalias() += kraus_[i] * rho2 * right_[i];
    return hermitian_part(out);
  }

  double operator()(const Matrix& rho) const {
    const Matrix wm = w(rho);
    const Eigh ev = eigh(wm);
    const double scale = std::max(1.0, ev.values.cwiseAbs().maxCoeff());
    if (ev.values.minCoeff() < -tol::psd * scale) throw Error("numeric-psd-failure", "W(rho) is not positive semidefinite");
    double s = 0.0;
    for (Index i = 0; i < ev.values.size(); ++i) s += ev.values(i) > 0.0 ? std::sqrt(ev.values(i)) : 0.0;
    return s;
  }
  double operator()(const DensityMatrix& rho) const { return (*this)(rho.matrix()); }

  /// X_rho, rows indexed (k * d + s), columns by the physical basis.
  Matrix alignment(const Matrix& rho) const {
    const Index k = static_cast<Index>(kraus_.size());
    Matrix x = Matrix::Zero(k * d_, big_d_);
    for (Index i = 0; i < k; ++i) {
      const Matrix re = rho * e(i).adjoint();
      for (Index a = 0; a < k; ++a) x.middleRows(a * d_, d_) += sqrt_c_(a, i) * re;
    }
    return x;
  }

  /// Hermitian G with Re Tr(A X_rho) = Tr(rho G) for the contraction A = a0^dagger.
  Matrix linear_functional(const Matrix& a0) const {
    const Index k = static_cast<Index>(kraus_.size());
    Matrix q = Matrix::Zero(d_, d_);
    for (Index i = 0; i < k; ++i) {
      Matrix ai = Matrix::Zero(big_d_, d_);
      for (Index a = 0; a < k; ++a) ai += sqrt_c_(a, i) * a0.middleRows(a * d_, d_).adjoint();
      q += e(i).adjoint() * ai;
    }
    return hermitian_part(q);
  }

  const Matrix& coefficients() const { return c_; }
  Index env_dim() const { return static_cast<Index>(kraus_.size()); }
  Index logical_dim() const { return d_; }
  Index physical_dim() const { return big_d_; }

 private:
  const Matrix& e(Index i) const { return kraus_[static_cast<std::size_t>(i)]; }

  std::vector<Matrix> kraus_;
  Index d_;
  Index big_d_;
  Matrix c_;
  Matrix sqrt_c_;
  std::vector<Matrix> right_;  // sum_j c_ij E_j^dagger
};

inline RecoveryEstimate make_estimate(double fidelity, const DensityMatrix& sigma, const DensityMatrix& argmin, bool converged) {
  RecoveryEstimate est;
  est.fidelity_dual = fidelity;
  est.delta = bures_from_fidelity(fidelity);
  est.lower_bound = est.delta / 2.0;
  est.upper_bound = est.delta;
  est.sigma = sigma;
  est.argmin_state = argmin;
  est.converged = converged;
  return est;
}

/// delta = d(N^, N^ M^) for M = id through the explicit dual-fidelity formula.
inline RecoveryEstimate delta_estimate_id(const Channel& channel, const std::optional<DensityMatrix>& sigma = std::nullopt,
                                          const MinimizeConfig& cfg = {}) {
  const DensityMatrix s = sigma ? *sigma : DensityMatrix::maximally_mixed(channel.dim_in());
  const DualFidelity dual(channel, s);
  const StateMinimum best = minimize_over_states([&](const DensityMatrix& rho) { return dual(rho); }, channel.dim_in(), cfg);
  return make_estimate(best.value, s, best.state, best.converged);
}

/// delta_estimate_id with sigma chosen to minimize delta.
inline RecoveryEstimate delta_estimate_id_optimized(const Channel& channel, const MinimizeConfig& outer = {}, const MinimizeConfig& inner = {}) {
  const StateMinimum best = minimize_over_states(
      [&](const DensityMatrix& sigma) { return delta_estimate_id(channel, sigma, inner).delta; }, channel.dim_in(), outer);
  return delta_estimate_id(channel, best.state, inner);
}

inline bool is_idempotent(const Channel& c, double tolerance = 1e-8) {
  if (c.dim_in() != c.dim_out()) return false;
  const Index d = c.dim_in();
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      const Matrix once = aqec::apply(c, unit);
      if ((aqec::apply(c, once) - once).norm() > tolerance) return false;
    }
  }
  return true;
}

/// delta = d(N^, N^ M^) for an arbitrary target M with idempotent complement M^.
inline RecoveryEstimate delta_estimate(const Channel& noise, const Channel& m, const Channel& m_complement, const MinimizeConfig& cfg = {}) {
  if (m.dim_in() != noise.dim_in() || m_complement.dim_in() != noise.dim_in()) throw Error("bad-dims", "target and noise inputs differ");
  if (!is_idempotent(m_complement)) throw Error("not-idempotent", "the complementary target channel is not a projection");
  const Channel nhat = complementary(noise);
  const FidelityValue f = worst_case_fidelity(nhat, compose(nhat, m_complement), cfg);
  return make_estimate(f.value, DensityMatrix::maximally_mixed(noise.dim_in()), *f.argmin_state, f.converged);
}

/// (delta / 2, delta): the optimal recovery distance lies in between.
inline std::pair<double, double> sandwich(const RecoveryEstimate& est) {
  return {est.delta / 2.0, est.delta};
}

struct SaddleResult {
  DensityMatrix rho0;
  Matrix a0;        // contraction physical -> env (x) logical
  Matrix x_rho0;
  double achieved = 0.0;       // trace_norm(x_rho0)
  double fidelity_dual = 0.0;  // F_rho0(N^, N^ M^) from its definition
  double certificate = 0.0;    // min over states of Re Tr(a0^dagger X_rho)
  Index env_dim = 0;
  Index logical_dim = 0;
};

struct SaddleConfig {
  MinimizeConfig minimize;
  double consistency_tol = 1e-6;
  double floor_eta = 1e-6;
};

namespace detail {

inline SaddleResult saddle_at(const Channel& noise, const DensityMatrix& sigma, const DensityMatrix& rho0, double consistency_tol) {
  const DualFidelity dual(noise, sigma);
  SaddleResult s;
  s.rho0 = rho0;
  s.env_dim = dual.env_dim();
  s.logical_dim = dual.logical_dim();
  s.x_rho0 = dual.alignment(rho0.matrix());
  s.achieved = trace_norm(s.x_rho0);
  const Channel nhat = complementary(noise);
  s.fidelity_dual = entanglement_fidelity(nhat, constant_channel(aqec::apply(nhat, sigma), noise.dim_in()), rho0);
  if (std::abs(s.achieved - s.fidelity_dual) > consistency_tol) {
    throw Error("saddle-inconsistent", "trace norm of the alignment operator " + std::to_string(s.achieved) +
                                           " differs from the dual fidelity " + std::to_string(s.fidelity_dual));
  }
  s.a0 = polar(s.x_rho0).w;
  s.certificate = min_eigenvalue(dual.linear_functional(s.a0));
  return s;
}

}  // namespace detail

/// Saddle point (rho0, a0) for M = id. rho0 minimizes the dual fidelity;
/// a0 is the isometric polar factor of X_rho0. When the certificate falls
/// short of the dual fidelity (degenerate rho0), the construction is repeated
/// at (1 - eta) rho0 + eta I/d and the better certificate wins.
inline SaddleResult find_saddle_from(const Channel& noise, const RecoveryEstimate& est, const SaddleConfig& cfg = {}) {
  const DensityMatrix& s = est.sigma;
  SaddleResult best = detail::saddle_at(noise, s, est.argmin_state, cfg.consistency_tol);
  if (best.certificate < best.achieved - 1e-9) {
    const Index d = noise.dim_in();
    const DensityMatrix floored = DensityMatrix::unchecked((1.0 - cfg.floor_eta) * est.argmin_state.matrix() + cfg.floor_eta * identity(d) / double(d));
    SaddleResult alt = detail::saddle_at(noise, s, floored, cfg.consistency_tol);
    if (alt.certificate > best.certificate) best = std::move(alt);
  }
  return best;
}

inline SaddleResult find_saddle(const Channel& noise, const std::optional<DensityMatrix>& sigma = std::nullopt, const SaddleConfig& cfg = {}) {
  return find_saddle_from(noise, delta_estimate_id(noise, sigma, cfg.minimize), cfg);
}

/// Trace-decreasing part S(rho) = Tr_env(a0 rho a0^dagger) completed with
/// Tr(rho - S(rho)) tau.
inline Channel complete_recovery(const Matrix& a0, Index env_dim, Index logical_dim, const DensityMatrix& tau) {
  if (a0.rows() != env_dim * logical_dim) throw Error("bad-dims", "contraction rows do not factor as env x logical");
  if (tau.dim() != logical_dim) throw Error("bad-dims", "tau must live on the logical space");
  if (operator_norm(a0) > 1.0 + 1e-9) throw Error("bad-completion", "contraction has operator norm above 1");
  const Index big_d = a0.cols();
  std::vector<Matrix> kraus;
  for (Index k = 0; k < env_dim; ++k) kraus.push_back(a0.middleRows(k * logical_dim, logical_dim));
  const Matrix defect = identity(big_d) - a0.adjoint() * a0;
  const Eigh de = eigh(defect);
  if (de.values.minCoeff() < -tol::psd) throw Error("bad-completion", "defect operator is not PSD");
  const Eigh te = eigh(tau.matrix());
  for (Index l = 0; l < de.values.size(); ++l) {
    if (de.values(l) <= 1e-14) continue;
    for (Index k = 0; k < te.values.size(); ++k) {
      if (te.values(k) <= 1e-15) continue;
      kraus.push_back(std::sqrt(te.values(k) * de.values(l)) * te.vectors.col(k) * de.vectors.col(l).adjoint());
    }
  }
  return Channel::from_kraus(std::move(kraus));
}

inline Channel build_recovery(const SaddleResult& saddle, const std::optional<DensityMatrix>& tau = std::nullopt) {
  const DensityMatrix t = tau ? *tau : DensityMatrix::maximally_mixed(saddle.logical_dim);
  return complete_recovery(saddle.a0, saddle.env_dim, saddle.logical_dim, t);
}

struct GuaranteeCheck {
  double achieved_distance = 0.0;
  bool passes = false;
};

inline constexpr double guarantee_slack = 1e-6;

/// d(R N, id) against the estimate's delta.
inline GuaranteeCheck verify_guarantee(const Channel& recovery, const Channel& noise, const RecoveryEstimate& est, const MinimizeConfig& cfg = {}) {
  if (recovery.dim_in() != noise.dim_out() || recovery.dim_out() != noise.dim_in()) throw Error("bad-dims", "recovery does not compose with the noise");
  const double d = bures_distance(compose(recovery, noise), Channel::identity_channel(noise.dim_in()), cfg);
  return {d, d <= est.delta + guarantee_slack};
}

struct FixedStateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (d_rho(N^, S) / 2, d_rho(N^, S)) with S(x) = N^(rho) Tr(x).
inline FixedStateBounds fixed_state_bounds(const Channel& noise, const DensityMatrix& rho) {
  if (rho.dim() != noise.dim_in()) throw Error("bad-dims", "rho must live on the logical space");
  const Channel nhat = complementary(noise);
  const Channel s = constant_channel(aqec::apply(nhat, rho), noise.dim_in());
  const double upper = bures_distance_at(nhat, s, rho);
  return {upper / 2.0, upper};
}

/// Recovery for a fixed input: the saddle construction at rho0 = sigma = rho.
inline Channel build_fixed_state_recovery(const Channel& noise, const DensityMatrix& rho, const std::optional<DensityMatrix>& tau = std::nullopt,
                                          double consistency_tol = 1e-6) {
  if (rho.dim() != noise.dim_in()) throw Error("bad-dims", "rho must live on the logical space");
  const SaddleResult s = detail::saddle_at(noise, rho, rho, consistency_tol);
  return build_recovery(s, tau);
}

/// Everything the CLI reports for one channel.
struct NearOptimalRecovery {
  RecoveryEstimate estimate;
  SaddleResult saddle;
  Channel recovery;
  GuaranteeCheck check;
};

inline NearOptimalRecovery near_optimal_recovery(const Channel& noise, const std::optional<DensityMatrix>& sigma = std::nullopt,
                                                 const std::optional<DensityMatrix>& tau = std::nullopt, const MinimizeConfig& cfg = {}) {
  NearOptimalRecovery out;
  const DensityMatrix s = sigma ? *sigma : DensityMatrix::maximally_mixed(noise.dim_in());
  SaddleConfig sc;
  sc.minimize = cfg;
  out.estimate = delta_estimate_id(noise, s, cfg);
  out.saddle = find_saddle_from(noise, out.estimate, sc);
  out.recovery = build_recovery(out.saddle, tau);
  out.check = verify_guarantee(out.recovery, noise, out.estimate, cfg);
  return out;
}

}  // namespace aqec
