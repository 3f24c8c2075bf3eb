#pragma once

// Reference implementations used to certify the main modules: sampled
// worst-case fidelity, a see-saw approximation of the optimal recovery,
// the primal/dual gap of the recovery duality, and a gradient check for
// the state optimizer.
//
// None of this code uses the complementary-channel construction of
// recovery.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "aqec/channel.hpp"
#include "aqec/fidelity.hpp"
#include "aqec/optimize.hpp"
#include "aqec/random.hpp"

namespace aqec::oracles {

/// min of F_rho(N, M) over all basis pure states plus `samples` random states.
/// Even-numbered samples are full-rank Ginibre states, odd-numbered ones pure.
inline double sampled_worst_case_fidelity(const Channel& n, const Channel& m, int samples, std::uint64_t seed) {
  const EntanglementFidelity ef(n, m);
  const Index d = n.dim_in();
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < d; ++k) best = std::min(best, ef(DensityMatrix::basis(d, k)));
  random::Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const DensityMatrix rho = (s % 2 == 0) ? random::state(rng, d) : random::pure_state(rng, d);
    best = std::min(best, ef(rho));
  }
  return best;
}

struct GradientCheck {
  double deviation = 0.0;      // max |g_h - g_{h/2}| / max(|g_{h/2}|_inf, 1e-12)
  double gradient_norm = 0.0;  // of the reference gradient
};

/// Compares the optimizer's central-difference gradient at step h with a
/// central-difference reference at h/2, at the factor G = sqrt(point).
inline GradientCheck gradient_check(const StateObjective& objective, const DensityMatrix& point, double step) {
  const Index d = point.dim();
  const ParamObjective f = [&](const RealVector& x) { return objective(detail::state_from_params(x, d)); };
  const RealVector x = detail::params_from_factor(psd_sqrt(point.matrix()));
  const RealVector g = detail::fd_gradient(f, x, step);
  const RealVector ref = detail::fd_gradient(f, x, step / 2.0);
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-12);
  return {(g - ref).cwiseAbs().maxCoeff() / scale, ref.norm()};
}

/// Choi-matrix parametrization of recovery channels (ancilla = recovery input first).
namespace choi_ops {

/// Hermitian, trace-preserving-tangent part of a direction: subtract
/// Tr_out(H) (x) I / d_out so the partial trace stays fixed.
inline Matrix tangent(const Matrix& h, Index din, Index dout) {
  const Matrix t = partial_trace(h, {din, dout}, Factor::second);
  return hermitian_part(h - kron(t, identity(dout)) / static_cast<double>(dout));
}

/// Clip negative eigenvalues, then restore Tr_out J = I by the congruence
/// (T^{-1/2} (x) I) J (T^{-1/2} (x) I).
inline Matrix retract(const Matrix& j, Index din, Index dout) {
  const Eigh e = eigh(j);
  Matrix psd = spectral_apply(e, [](double x) { return std::max(x, 0.0); });
  psd += 1e-13 * identity(din * dout);
  const Matrix t = partial_trace(psd, {din, dout}, Factor::second);
  const Matrix inv_sqrt = spectral_apply(eigh(t), [](double x) { return 1.0 / std::sqrt(std::max(x, 1e-300)); });
  const Matrix c = kron(inv_sqrt, identity(dout));
  return hermitian_part(c * psd * c.adjoint());
}

inline double tp_residual(const Matrix& j, Index din, Index dout) {
  return (partial_trace(j, {din, dout}, Factor::second) - identity(din)).norm();
}

}  // namespace choi_ops

/// F_rho(R N, M) and its gradient with respect to the Choi matrix of R,
/// for one fixed input state.
class RecoveryObjective {
 public:
  RecoveryObjective(const Channel& n, const Channel& m, const DensityMatrix& rho)
      : din_(n.dim_out()), dout_(m.dim_out()), aux_(n.dim_in()), rho_(rho) {
    const Vector psi = purify(rho).vector;
    const Matrix z = apply_extended(n, psi);
    zr_.resize(din_ * din_, aux_ * aux_);
    for (Index a = 0; a < din_; ++a)
      for (Index b = 0; b < din_; ++b)
        for (Index x = 0; x < aux_; ++x)
          for (Index y = 0; y < aux_; ++y) zr_(a * din_ + b, x * aux_ + y) = z(a * aux_ + x, b * aux_ + y);
    const Matrix y = apply_extended(m, psi);
    sqrt_y_ = psd_sqrt(y);
  }

  /// (R (x) id)(Z) for the recovery with Choi matrix j, computed as the
  /// contraction X[(o o'), (x y)] = sum_(a b) J[(o o'), (a b)] Z[(a b), (x y)].
  Matrix output(const Matrix& j) const {
    Matrix jr(dout_ * dout_, din_ * din_);
    for (Index a = 0; a < din_; ++a)
      for (Index b = 0; b < din_; ++b)
        for (Index o = 0; o < dout_; ++o)
          for (Index op = 0; op < dout_; ++op) jr(o * dout_ + op, a * din_ + b) = j(a * dout_ + o, b * dout_ + op);
    const Matrix xr = jr * zr_;
    Matrix x(dout_ * aux_, dout_ * aux_);
    for (Index o = 0; o < dout_; ++o)
      for (Index op = 0; op < dout_; ++op)
        for (Index xx = 0; xx < aux_; ++xx)
          for (Index y = 0; y < aux_; ++y) x(o * aux_ + xx, op * aux_ + y) = xr(o * dout_ + op, xx * aux_ + y);
    return x;
  }

  double value(const Matrix& j) const {
    const Matrix x = output(j);
    return trace_sqrt_psd(hermitian_part(sqrt_y_ * x * sqrt_y_));
  }

  /// Value and Frobenius gradient (Hermitian) with respect to j.
  double value_and_gradient(const Matrix& j, Matrix& grad) const {
    const Matrix x = output(j);
    const Eigh e = eigh(hermitian_part(sqrt_y_ * x * sqrt_y_));
    double f = 0.0;
    for (Index i = 0; i < e.values.size(); ++i) f += e.values(i) > 0.0 ? std::sqrt(e.values(i)) : 0.0;
    const Matrix inv_sqrt = spectral_apply(e, [](double v) { return v > 1e-14 ? 1.0 / std::sqrt(v) : 0.0; });
    // df = Tr(G dX) with G = sqrt(Y) (sqrt(Y) X sqrt(Y))^{-1/2} sqrt(Y) / 2, hence
    // df = sum Tr(K_ab^T dJ_ab) with K_ab(o, o') = sum_xy G(o' y, o x) Z_ab(x, y);
    // the Frobenius gradient is conj(K).
    const Matrix g = 0.5 * sqrt_y_ * inv_sqrt * sqrt_y_;
    Matrix gr(aux_ * aux_, dout_ * dout_);
    for (Index o = 0; o < dout_; ++o)
      for (Index op = 0; op < dout_; ++op)
        for (Index xx = 0; xx < aux_; ++xx)
          for (Index y = 0; y < aux_; ++y) gr(xx * aux_ + y, o * dout_ + op) = g(op * aux_ + y, o * aux_ + xx);
    const Matrix kr = zr_ * gr;  // [(a b), (o o')]
    grad.resize(din_ * dout_, din_ * dout_);
    for (Index a = 0; a < din_; ++a)
      for (Index b = 0; b < din_; ++b)
        for (Index o = 0; o < dout_; ++o)
          for (Index op = 0; op < dout_; ++op) grad(a * dout_ + o, b * dout_ + op) = std::conj(kr(a * din_ + b, o * dout_ + op));
    grad = hermitian_part(grad);
    return f;
  }

  const DensityMatrix& state() const { return rho_; }

 private:
  Index din_;
  Index dout_;
  Index aux_;
  DensityMatrix rho_;
  Matrix zr_;  // Z[(a b), (x y)]
  Matrix sqrt_y_;
};

struct SeesawConfig {
  int restarts = 4;
  int rounds = 60;
  int inner_steps = 30;
  std::uint64_t seed = 0;
  double temperature = 1e-3;     // initial softmin temperature
  double min_temperature = 1e-6;
  int random_probe_states = 4;   // random states added to the initial input set
  MinimizeConfig search{4, 1e-9, 400, 0, 1e-6};  // worst-input search each round
  MinimizeConfig final_eval{};                     // re-evaluation of the reported recovery
  std::optional<DensityMatrix> fixed_state;        // optimize F_rho at this input instead
};

struct SeesawReport {
  double best_fidelity = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  Channel best_recovery;
  std::vector<double> history;  // accepted worst-case fidelity per round, last restart
};

namespace detail {

/// Same channel with at most d_in * d_out Kraus operators.
inline Channel minimal(const Channel& c) {
  return kraus_from_choi(choi(c), c.dim_in(), c.dim_out());
}

struct SoftMin {
  double value = 0.0;
  double hard_min = 0.0;
};

inline SoftMin softmin_value(const std::vector<RecoveryObjective>& objs, const Matrix& j, double temp, Matrix* grad) {
  std::vector<double> vals(objs.size());
  std::vector<Matrix> grads(grad ? objs.size() : 0);
  for (std::size_t s = 0; s < objs.size(); ++s) vals[s] = grad ? objs[s].value_and_gradient(j, grads[s]) : objs[s].value(j);
  const double mn = *std::min_element(vals.begin(), vals.end());
  double z = 0.0;
  std::vector<double> w(vals.size());
  for (std::size_t s = 0; s < vals.size(); ++s) {
    w[s] = std::exp(-(vals[s] - mn) / temp);
    z += w[s];
  }
  if (grad) {
    *grad = Matrix::Zero(j.rows(), j.cols());
    for (std::size_t s = 0; s < vals.size(); ++s) *grad += (w[s] / z) * grads[s];
  }
  return {mn - temp * std::log(z), mn};
}

/// Stacked Kraus isometry W (row k * d_out + o, column a) to its Choi matrix.
inline Matrix choi_from_isometry(const Matrix& w, Index din, Index dout) {
  const Index k = w.rows() / dout;
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (Index e = 0; e < k; ++e) {
    Vector v(din * dout);
    for (Index a = 0; a < din; ++a)
      for (Index o = 0; o < dout; ++o) v(a * dout + o) = w(e * dout + o, a);
    j += v * v.adjoint();
  }
  return j;
}

/// Euclidean gradient with respect to W given the Hermitian Choi gradient g:
/// dF = Re Tr(E^dagger dW) with E_k = 2 g v_k reshaped.
inline Matrix isometry_gradient(const Matrix& w, const Matrix& g, Index din, Index dout) {
  const Index k = w.rows() / dout;
  Matrix e(w.rows(), w.cols());
  for (Index kk = 0; kk < k; ++kk) {
    Vector v(din * dout);
    for (Index a = 0; a < din; ++a)
      for (Index o = 0; o < dout; ++o) v(a * dout + o) = w(kk * dout + o, a);
    const Vector gv = 2.0 * g * v;
    for (Index a = 0; a < din; ++a)
      for (Index o = 0; o < dout; ++o) e(kk * dout + o, a) = gv(a * dout + o);
  }
  return e;
}

/// Recovery of full Kraus rank as a stacked isometry.
inline Matrix isometry_from_choi(const Matrix& j, Index din, Index dout) {
  const Channel c = kraus_from_choi(choi_ops::retract(j, din, dout), din, dout);
  Matrix w = Matrix::Zero(din * dout * dout, din);
  for (std::size_t e = 0; e < c.size() && static_cast<Index>(e) < din * dout; ++e)
    w.middleRows(static_cast<Index>(e) * dout, dout) = c.kraus(e);
  return polar(w).w;
}

/// Riemannian ascent of the softmin on the Stiefel manifold of Kraus
/// isometries; retraction by the polar factor.
inline Matrix ascend(const std::vector<RecoveryObjective>& objs, Matrix w, Index din, Index dout, int steps, double temp, double& step_size) {
  const auto eval = [&](const Matrix& x, Matrix* egrad) {
    const Matrix j = choi_from_isometry(x, din, dout);
    Matrix g;
    const SoftMin v = softmin_value(objs, j, temp, egrad ? &g : nullptr);
    if (egrad) *egrad = isometry_gradient(x, g, din, dout);
    return v.value;
  };
  Matrix e;
  double cur = eval(w, &e);
  for (int it = 0; it < steps; ++it) {
    const Matrix dir = e - w * hermitian_part(w.adjoint() * e);
    const double dn2 = dir.squaredNorm();
    if (dn2 < 1e-24) break;
    bool moved = false;
    double eta = std::min(step_size * 2.0, 10.0);
    while (eta > 1e-12) {
      Matrix cand = polar(Matrix(w + eta * dir)).w;
      double next = eval(cand, nullptr);
      if (next >= cur + 1e-4 * eta * dn2) {
        // Keep halving while it still helps; a fixed accepted step can
        // overshoot the maximum on every iteration.
        while (eta > 1e-12) {
          const Matrix half = polar(Matrix(w + 0.5 * eta * dir)).w;
          const double v = eval(half, nullptr);
          if (v <= next) break;
          cand = half;
          next = v;
          eta *= 0.5;
        }
        w = cand;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
    step_size = eta;
    cur = eval(w, &e);
  }
  return w;
}

}  // namespace detail

/// Alternating approximation of max_R F(R N, M): (a) the worst input for the
/// current R is found by multi-start descent and added to a growing input
/// set; (b) R is improved by projected ascent on its Choi matrix against a
/// softmin over that set. Rounds that do not improve the true worst-case
/// value are rejected.
inline SeesawReport seesaw_optimal_recovery(const Channel& n, const Channel& m, const SeesawConfig& cfg = {}) {
  if (n.dim_in() != m.dim_in()) throw Error("bad-dims", "N and M must share their input space");
  const Index din = n.dim_out();
  const Index dout = m.dim_out();
  const Index d = n.dim_in();

  const auto to_channel = [&](const Matrix& w) {
    std::vector<Matrix> ks;
    for (Index e = 0; e < w.rows() / dout; ++e) ks.push_back(w.middleRows(e * dout, dout));
    return Channel::from_kraus(std::move(ks));
  };
  const auto true_value = [&](const Matrix& j, const MinimizeConfig& mc, std::optional<DensityMatrix>* worst) {
    const Channel rn = detail::minimal(compose(to_channel(j), n));
    if (cfg.fixed_state) return entanglement_fidelity(rn, m, *cfg.fixed_state);
    const EntanglementFidelity ef(rn, m);
    const StateMinimum r = minimize_over_states([&](const DensityMatrix& rho) { return ef(rho); }, d, mc);
    if (worst) *worst = r.state;
    return r.value;
  };

  SeesawReport report;
  report.restarts = std::max(cfg.restarts, 1);
  double overall = -1.0;
  random::Rng rng(cfg.seed);
  for (int restart = 0; restart < report.restarts; ++restart) {
    Matrix j;
    if (restart == 0) {
      j = identity(din * dout) / static_cast<double>(dout);
    } else {
      j = choi(random::channel(rng, din, dout, din * dout));
    }
    j = detail::isometry_from_choi(j, din, dout);

    std::vector<RecoveryObjective> objs;
    if (cfg.fixed_state) {
      objs.emplace_back(n, m, *cfg.fixed_state);
    } else {
      for (Index k = 0; k < d; ++k) objs.emplace_back(n, m, DensityMatrix::basis(d, k));
      objs.emplace_back(n, m, DensityMatrix::maximally_mixed(d));
      for (int s = 0; s < cfg.random_probe_states; ++s) objs.emplace_back(n, m, random::pure_state(rng, d));
    }

    MinimizeConfig search = cfg.search;
    std::optional<DensityMatrix> worst;
    double best_value = true_value(j, search, &worst);
    Matrix best_w = j;
    std::vector<double> history{best_value};
    double temp = cfg.temperature;
    double step = 1.0;
    int stale = 0;
    bool converged = false;
    int round = 0;
    for (; round < cfg.rounds; ++round) {
      if (worst) objs.emplace_back(n, m, *worst);
      const Matrix cand = detail::ascend(objs, best_w, din, dout, cfg.inner_steps, temp, step);
      search.seed = cfg.search.seed + static_cast<std::uint64_t>(round + 1);
      std::optional<DensityMatrix> cand_worst;
      const double v = true_value(cand, search, &cand_worst);
      worst = cand_worst;
      if (v > best_value) {
        stale = (v - best_value < 1e-9) ? stale + 1 : 0;
        best_value = v;
        best_w = cand;
      } else {
        ++stale;
        temp = std::max(temp * 0.5, cfg.min_temperature);
      }
      history.push_back(best_value);
      if (stale >= 8 && temp <= cfg.min_temperature) {
        converged = true;
        break;
      }
    }
    report.iterations += round;

    const Channel r = to_channel(best_w);
    const double final_value = cfg.fixed_state ? entanglement_fidelity(compose(r, n), m, *cfg.fixed_state)
                                               : worst_case_fidelity(compose(r, n), m, cfg.final_eval).value;
    if (final_value > overall) {
      overall = final_value;
      report.best_fidelity = final_value;
      report.best_recovery = r;
      report.converged = converged;
    }
    report.history = std::move(history);
  }
  return report;
}

struct Theorem1Gap {
  double primal = 0.0;  // max_R F(R N, M)
  double dual = 0.0;    // max_R' F(N^, R' M^)
  double gap = 0.0;
};

/// |max_R F(R N, M) - max_R' F(N^, R' M^)| with both sides from the see-saw.
inline Theorem1Gap theorem1_gap(const Channel& n, const Channel& m, const Channel& m_complement, const SeesawConfig& cfg = {}) {
  if (m_complement.dim_in() != n.dim_in() || m.dim_in() != n.dim_in()) throw Error("bad-dims", "channels must share their input space");
  Theorem1Gap out;
  out.primal = seesaw_optimal_recovery(n, m, cfg).best_fidelity;
  // F is symmetric, so max_R' F(N^, R' M^) = max_R' F(R' M^, N^).
  out.dual = seesaw_optimal_recovery(m_complement, complementary(n), cfg).best_fidelity;
  out.gap = std::abs(out.primal - out.dual);
  return out;
}

}  // namespace aqec::oracles
