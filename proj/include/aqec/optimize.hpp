#pragma once

// Multi-start local descent over density matrices.
//
// States are parametrized as rho = G G^dagger / Tr(G G^dagger) with G a
// complex d x d factor, flattened to 2 d^2 real parameters (real parts
// first). Each start runs quasi-Newton descent with a central-difference
// gradient and Armijo backtracking until the accepted step falls below
// `tol`.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "aqec/density.hpp"
#include "aqec/random.hpp"

namespace aqec {

struct MinimizeConfig {
  int random_starts = 16;
  double tol = 1e-8;
  int max_iterations = 2000;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
};

struct StateMinimum {
  DensityMatrix state;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  int starts = 0;
  int best_start = -1;
};

using StateObjective = std::function<double(const DensityMatrix&)>;
using ParamObjective = std::function<double(const RealVector&)>;

namespace detail {

inline Matrix factor_from_params(const RealVector& x, Index d) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = cplx(x(i * d + j), x(d * d + i * d + j));
  return g;
}

inline RealVector params_from_factor(const Matrix& g) {
  const Index d = g.rows();
  RealVector x(2 * d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      x(i * d + j) = g(i, j).real();
      x(d * d + i * d + j) = g(i, j).imag();
    }
  }
  return x;
}

inline DensityMatrix state_from_params(const RealVector& x, Index d) {
  const Matrix g = factor_from_params(x, d);
  Matrix r = g * g.adjoint();
  const double t = r.trace().real();
  if (!(t > 0.0)) return DensityMatrix::maximally_mixed(d);
  return DensityMatrix::unchecked(hermitian_part(r / t));
}

/// Central-difference gradient, the one the descent uses.
inline RealVector fd_gradient(const ParamObjective& f, const RealVector& x, double h) {
  RealVector g(x.size());
  RealVector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    probe(i) = xi + h;
    const double fp = f(probe);
    probe(i) = xi - h;
    const double fm = f(probe);
    probe(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct LocalResult {
  RealVector x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline LocalResult local_descent(const ParamObjective& f, RealVector x, const MinimizeConfig& cfg) {
  const Index n = x.size();
  if (x.norm() > 0.0) x /= x.norm();
  double fx = f(x);
  RealVector g = fd_gradient(f, x, cfg.fd_step);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  LocalResult out{x, fx, false, 0};
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    if (g.norm() < 1e-13) {
      out.converged = true;
      break;
    }
    RealVector p = -h * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      h.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    bool accepted = false;
    RealVector xn;
    double fn = 0.0;
    while (t * p.norm() >= cfg.tol) {
      xn = x + t * p;
      fn = f(xn);
      if (fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const RealVector s = xn - x;
    RealVector gn = fd_gradient(f, xn, cfg.fd_step);
    const RealVector y = gn - g;
    const double sy = s.dot(y);
    x = xn;
    fx = fn;
    g = gn;
    if (sy > 1e-18) {
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      const double rho = 1.0 / sy;
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    // The objective is scale invariant; keep the factor well conditioned.
    const double nx = x.norm();
    if (nx < 0.5 || nx > 2.0) {
      x /= nx;
      g = fd_gradient(f, x, cfg.fd_step);
      h.setIdentity();
    }
    if (s.norm() < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  out.value = fx;
  return out;
}

}  // namespace detail

/// Starting factors: computational basis pure states, the maximally mixed
/// state, then `random_starts` Ginibre factors from the configured seed.
inline std::vector<Matrix> default_start_factors(Index dim, const MinimizeConfig& cfg) {
  std::vector<Matrix> starts;
  for (Index k = 0; k < dim; ++k) {
    Matrix g = Matrix::Zero(dim, dim);
    g(k, k) = 1.0;
    starts.push_back(std::move(g));
  }
  starts.push_back(identity(dim));
  random::Rng rng(cfg.seed);
  for (int s = 0; s < cfg.random_starts; ++s) starts.push_back(random::ginibre(rng, dim, dim));
  return starts;
}

/// Best (state, value) over multi-start local descent. Ties go to the lower start index.
inline StateMinimum minimize_over_states(const StateObjective& objective, Index dim, const MinimizeConfig& cfg = {},
                                         const std::vector<Matrix>& extra_starts = {}) {
  if (dim <= 0) throw Error("bad-dims", "minimize_over_states needs a positive dimension");
  const ParamObjective f = [&](const RealVector& x) { return objective(detail::state_from_params(x, dim)); };
  std::vector<Matrix> starts = default_start_factors(dim, cfg);
  starts.insert(starts.end(), extra_starts.begin(), extra_starts.end());
  StateMinimum best;
  best.converged = true;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const detail::LocalResult r = detail::local_descent(f, detail::params_from_factor(starts[s]), cfg);
    best.converged = best.converged && r.converged;
    if (r.value < best.value) {
      best.value = r.value;
      best.state = detail::state_from_params(r.x, dim);
      best.best_start = static_cast<int>(s);
    }
  }
  best.starts = static_cast<int>(starts.size());
  return best;
}

}  // namespace aqec
