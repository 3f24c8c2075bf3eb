#pragma once

// Completely positive maps in Kraus form, code isometries, complementary
// channels, and the standard noise models and codes.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "aqec/density.hpp"
#include "aqec/matops.hpp"

namespace aqec {

/// A completely positive map held as a nonempty family of dim_out x dim_in
/// Kraus matrices. Either trace preserving (sum E^dagger E = I) or trace
/// decreasing (sum E^dagger E <= I).
class Channel {
 public:
  Channel() = default;

  static Channel from_kraus(std::vector<Matrix> kraus, bool trace_preserving = true) {
    if (kraus.empty()) throw Error("bad-dims", "channel needs at least one Kraus element");
    const Index out = kraus.front().rows();
    const Index in = kraus.front().cols();
    if (out == 0 || in == 0) throw Error("bad-dims", "empty Kraus element");
    for (const Matrix& k : kraus) {
      if (k.rows() != out || k.cols() != in) throw Error("bad-dims", "Kraus elements differ in shape");
      require_finite(k, "Kraus element");
    }
    Channel c(in, out, std::move(kraus), trace_preserving);
    const Matrix s = c.kraus_sum();
    if (trace_preserving) {
      if ((s - identity(in)).norm() > tol::equal) {
        throw Error("not-trace-preserving", "sum of E^dagger E differs from identity by " +
                                                std::to_string((s - identity(in)).norm()));
      }
    } else if (max_eigenvalue(s) > 1.0 + tol::equal) {
      throw Error("not-trace-decreasing", "sum of E^dagger E exceeds identity");
    }
    return c;
  }

  /// Detects trace preservation instead of asserting it.
  static Channel from_kraus_detect(std::vector<Matrix> kraus) {
    Channel probe = from_kraus(std::move(kraus), false);
    probe.trace_preserving_ = (probe.kraus_sum() - identity(probe.dim_in())).norm() <= tol::equal;
    return probe;
  }

  static Channel identity_channel(Index d) { return Channel(d, d, {identity(d)}, true); }

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  std::size_t size() const { return kraus_.size(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }
  const Matrix& kraus(std::size_t i) const { return kraus_[i]; }
  bool trace_preserving() const { return trace_preserving_; }

  /// sum_i E_i^dagger E_i
  Matrix kraus_sum() const {
    Matrix s = Matrix::Zero(dim_in_, dim_in_);
    for (const Matrix& k : kraus_) s += k.adjoint() * k;
    return s;
  }

 private:
  Channel(Index in, Index out, std::vector<Matrix> kraus, bool tp)
      : dim_in_(in), dim_out_(out), kraus_(std::move(kraus)), trace_preserving_(tp) {}

  Index dim_in_ = 0;
  Index dim_out_ = 0;
  std::vector<Matrix> kraus_;
  bool trace_preserving_ = true;
};

/// Isometry V from a logical space into a physical space.
class CodeIsometry {
 public:
  CodeIsometry() = default;

  static CodeIsometry from_matrix(Matrix v) {
    if (v.rows() < v.cols() || v.cols() == 0) throw Error("bad-dims", "isometry must be tall and nonempty");
    require_finite(v, "isometry");
    if ((v.adjoint() * v - identity(v.cols())).norm() > tol::equal) {
      throw Error("not-isometry", "V^dagger V differs from identity");
    }
    return CodeIsometry(std::move(v));
  }

  /// Columns are the (not necessarily normalized) codewords; they are
  /// normalized and must be orthogonal.
  static CodeIsometry from_codewords(const std::vector<Vector>& words) {
    if (words.empty()) throw Error("bad-dims", "no codewords");
    Matrix v(words.front().size(), static_cast<Index>(words.size()));
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (words[k].size() != v.rows()) throw Error("bad-dims", "codewords differ in length");
      v.col(static_cast<Index>(k)) = words[k] / words[k].norm();
    }
    return from_matrix(std::move(v));
  }

  Index dim_logical() const { return v_.cols(); }
  Index dim_physical() const { return v_.rows(); }
  const Matrix& v() const { return v_; }
  Matrix projector() const { return v_ * v_.adjoint(); }

  /// Encoding map rho -> V rho V^dagger as a channel.
  Channel encoding() const { return Channel::from_kraus({v_}); }

 private:
  explicit CodeIsometry(Matrix v) : v_(std::move(v)) {}
  Matrix v_;
};

/// A state on S (x) R whose reduction to S is `base`.
struct PurifiedState {
  DensityMatrix base;
  Vector vector;  // index s * dim + r
};

/// Canonical purification sum_k sqrt(p_k) |e_k>|k> from the eigendecomposition of rho.
inline PurifiedState purify(const DensityMatrix& rho) {
  const Index d = rho.dim();
  const Eigh e = eigh(rho.matrix());
  Vector psi = Vector::Zero(d * d);
  for (Index k = 0; k < d; ++k) {
    const double p = std::max(e.values(k), 0.0);
    if (p == 0.0) continue;
    for (Index s = 0; s < d; ++s) psi(s * d + k) += std::sqrt(p) * e.vectors(s, k);
  }
  psi /= psi.norm();
  return {rho, psi};
}

/// sum_i E_i m E_i^dagger for any square m of side dim_in.
inline Matrix apply(const Channel& c, const Matrix& m) {
  if (m.rows() != c.dim_in() || m.cols() != c.dim_in()) throw Error("bad-dims", "state dimension does not match channel input");
  Matrix out = Matrix::Zero(c.dim_out(), c.dim_out());
  for (const Matrix& k : c.kraus()) out.noalias() += k * m * k.adjoint();
  return out;
}

/// Channel action on a density matrix; requires a trace-preserving channel.
inline DensityMatrix apply(const Channel& c, const DensityMatrix& rho) {
  if (!c.trace_preserving()) throw Error("not-trace-preserving", "use the Matrix overload for trace-decreasing maps");
  return DensityMatrix::unchecked(hermitian_part(aqec::apply(c, rho.matrix())));
}

/// (c (x) id)(|psi><psi|) for psi on (c input) (x) R.
inline Matrix apply_extended(const Channel& c, const Vector& psi) {
  const Index din = c.dim_in();
  if (psi.size() % din != 0) throw Error("bad-dims", "purification length is not a multiple of the channel input");
  const Index dr = psi.size() / din;
  // psi as a din x dr matrix Psi; (E (x) I) psi corresponds to E Psi.
  const Matrix psi_mat = Eigen::Map<const Matrix>(psi.data(), dr, din).transpose();
  Matrix out = Matrix::Zero(c.dim_out() * dr, c.dim_out() * dr);
  for (const Matrix& k : c.kraus()) {
    const Matrix kp = k * psi_mat;  // dim_out x dr
    const Matrix flat = kp.transpose();
    const Vector v = Eigen::Map<const Vector>(flat.data(), flat.size());
    out.noalias() += v * v.adjoint();
  }
  return out;
}

/// Kraus family {F_j E_i}; flag is the AND of both flags.
inline Channel compose(const Channel& outer, const Channel& inner) {
  if (inner.dim_out() != outer.dim_in()) throw Error("bad-dims", "compose: inner output does not match outer input");
  std::vector<Matrix> kraus;
  kraus.reserve(outer.size() * inner.size());
  for (const Matrix& f : outer.kraus())
    for (const Matrix& e : inner.kraus()) kraus.push_back(f * e);
  return Channel::from_kraus(std::move(kraus), outer.trace_preserving() && inner.trace_preserving());
}

/// Complementary channel with the Kraus index basis as environment:
/// output entry (i, j) is Tr(E_i rho E_j^dagger).
inline Channel complementary(const Channel& c) {
  const Index k = static_cast<Index>(c.size());
  std::vector<Matrix> kraus;
  kraus.reserve(static_cast<std::size_t>(c.dim_out()));
  for (Index a = 0; a < c.dim_out(); ++a) {
    Matrix ka(k, c.dim_in());
    for (Index i = 0; i < k; ++i) ka.row(i) = c.kraus(static_cast<std::size_t>(i)).row(a);
    kraus.push_back(std::move(ka));
  }
  return Channel::from_kraus(std::move(kraus), c.trace_preserving());
}

/// rho -> sigma Tr(rho)
inline Channel constant_channel(const DensityMatrix& sigma, Index dim_in) {
  if (dim_in <= 0) throw Error("bad-dims", "constant_channel needs a positive input dimension");
  const Eigh e = eigh(sigma.matrix());
  std::vector<Matrix> kraus;
  for (Index k = 0; k < e.values.size(); ++k) {
    if (e.values(k) <= 1e-15) continue;
    for (Index m = 0; m < dim_in; ++m) {
      Matrix op = Matrix::Zero(sigma.dim(), dim_in);
      op.col(m) = std::sqrt(e.values(k)) * e.vectors.col(k);
      kraus.push_back(std::move(op));
    }
  }
  return Channel::from_kraus(std::move(kraus));
}

/// Trace as a channel onto a one-dimensional output.
inline Channel trace_channel(Index dim_in) {
  return complementary(Channel::identity_channel(dim_in));
}

/// Stinespring pair (N, N^) of an isometry V: dim_in -> dim_B (x) env_dim.
struct ChannelPair {
  Channel channel;
  Channel complement;
};

inline ChannelPair from_isometry(const Matrix& v, Index env_dim) {
  if (env_dim <= 0 || v.rows() % env_dim != 0) throw Error("bad-tensor-dims", "isometry output is not divisible by the environment dimension");
  if ((v.adjoint() * v - identity(v.cols())).norm() > tol::equal) throw Error("not-isometry", "V^dagger V differs from identity");
  const Index db = v.rows() / env_dim;
  std::vector<Matrix> sys;
  std::vector<Matrix> env;
  for (Index e = 0; e < env_dim; ++e) {
    Matrix k(db, v.cols());
    for (Index b = 0; b < db; ++b) k.row(b) = v.row(b * env_dim + e);
    sys.push_back(std::move(k));
  }
  for (Index b = 0; b < db; ++b) env.push_back(v.middleRows(b * env_dim, env_dim));
  return {Channel::from_kraus(std::move(sys)), Channel::from_kraus(std::move(env))};
}

/// Stinespring isometry V|s> = sum_i E_i|s> (x) |i> (system first).
inline Matrix stinespring(const Channel& c) {
  const Index k = static_cast<Index>(c.size());
  Matrix v(c.dim_out() * k, c.dim_in());
  for (Index b = 0; b < c.dim_out(); ++b)
    for (Index i = 0; i < k; ++i) v.row(b * k + i) = c.kraus(static_cast<std::size_t>(i)).row(b);
  return v;
}

/// Choi matrix sum_ab |a><b| (x) c(|a><b|), ancilla first.
inline Matrix choi(const Channel& c) {
  const Index din = c.dim_in();
  const Index dout = c.dim_out();
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (const Matrix& k : c.kraus()) {
    Vector v(din * dout);
    for (Index a = 0; a < din; ++a) v.segment(a * dout, dout) = k.col(a);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

/// Inverse of choi(); eigenvalues below 1e-12 are dropped.
inline Channel kraus_from_choi(const Matrix& j, Index dim_in, Index dim_out, bool trace_preserving = true) {
  if (j.rows() != dim_in * dim_out || j.cols() != dim_in * dim_out) throw Error("bad-dims", "Choi matrix has the wrong size");
  const Eigh e = eigh(j);
  if (e.values.minCoeff() < -tol::psd) throw Error("not-psd", "Choi matrix is not PSD");
  if (trace_preserving) {
    const Matrix t = partial_trace(j, {dim_in, dim_out}, Factor::second);
    if ((t - identity(dim_in)).norm() > tol::equal) throw Error("not-trace-preserving", "Choi partial trace differs from identity");
  }
  std::vector<Matrix> kraus;
  for (Index k = e.values.size() - 1; k >= 0; --k) {
    if (e.values(k) < 1e-12) break;
    Matrix op(dim_out, dim_in);
    for (Index a = 0; a < dim_in; ++a) op.col(a) = std::sqrt(e.values(k)) * e.vectors.col(k).segment(a * dim_out, dim_out);
    kraus.push_back(std::move(op));
  }
  if (kraus.empty()) kraus.push_back(Matrix::Zero(dim_out, dim_in));
  return trace_preserving ? Channel::from_kraus(std::move(kraus)) : Channel::from_kraus(std::move(kraus), false);
}

/// n-fold tensor power, Kraus elements ordered lexicographically.
inline Channel tensor_power(const Channel& c, int n) {
  if (n < 1) throw Error("bad-param", "tensor_power needs n >= 1");
  std::vector<Matrix> kraus = c.kraus();
  for (int step = 1; step < n; ++step) {
    std::vector<Matrix> next;
    next.reserve(kraus.size() * c.size());
    for (const Matrix& a : kraus)
      for (const Matrix& b : c.kraus()) next.push_back(kron(a, b));
    kraus = std::move(next);
  }
  return Channel::from_kraus(std::move(kraus), c.trace_preserving());
}

inline Channel tensor(const Channel& a, const Channel& b) {
  std::vector<Matrix> kraus;
  for (const Matrix& x : a.kraus())
    for (const Matrix& y : b.kraus()) kraus.push_back(kron(x, y));
  return Channel::from_kraus(std::move(kraus), a.trace_preserving() && b.trace_preserving());
}

namespace pauli {
inline Matrix i2() { return identity(2); }
inline Matrix x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix y() { Matrix m(2, 2); m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Matrix z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }

inline Matrix single(char p) {
  switch (p) {
    case 'I': return i2();
    case 'X': return x();
    case 'Y': return y();
    case 'Z': return z();
    default: throw Error("bad-param", std::string("unknown Pauli letter ") + p);
  }
}

/// Tensor product for a string such as "XIZ" (leftmost letter is qubit 1).
inline Matrix string(const std::string& s) {
  if (s.empty()) throw Error("bad-param", "empty Pauli string");
  Matrix m = single(s[0]);
  for (std::size_t i = 1; i < s.size(); ++i) m = kron(m, single(s[i]));
  return m;
}
}  // namespace pauli

namespace noise {

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("bad-param", std::string(name) + " must lie in [0, 1]");
}

inline Channel amplitude_damping(double gamma) {
  check_probability(gamma, "gamma");
  Matrix e0(2, 2), e1(2, 2);
  e0 << 1, 0, 0, std::sqrt(1.0 - gamma);
  e1 << 0, std::sqrt(gamma), 0, 0;
  return Channel::from_kraus({e0, e1});
}

inline Channel bit_flip(double p) {
  check_probability(p, "p");
  return Channel::from_kraus({std::sqrt(1.0 - p) * pauli::i2(), std::sqrt(p) * pauli::x()});
}

inline Channel phase_flip(double p) {
  check_probability(p, "p");
  return Channel::from_kraus({std::sqrt(1.0 - p) * pauli::i2(), std::sqrt(p) * pauli::z()});
}

/// rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z); p = 3/4 is fully depolarizing.
inline Channel depolarizing(double p) {
  check_probability(p, "p");
  const double w = std::sqrt(p / 3.0);
  return Channel::from_kraus({std::sqrt(1.0 - p) * pauli::i2(), w * pauli::x(), w * pauli::y(), w * pauli::z()});
}

/// Weighted Pauli errors; weights are probabilities and must sum to 1.
inline Channel pauli_errors(const std::vector<std::pair<std::string, double>>& terms) {
  std::vector<Matrix> kraus;
  for (const auto& [s, w] : terms) {
    check_probability(w, "Pauli weight");
    kraus.push_back(std::sqrt(w) * pauli::string(s));
  }
  return Channel::from_kraus(std::move(kraus));
}

/// Identity plus every single-qubit X, Y, Z on n qubits, uniform weights.
inline Channel uniform_single_qubit_paulis(int n) {
  std::vector<std::pair<std::string, double>> terms;
  const double w = 1.0 / (1.0 + 3.0 * n);
  terms.emplace_back(std::string(static_cast<std::size_t>(n), 'I'), w);
  for (int q = 0; q < n; ++q) {
    for (char p : {'X', 'Y', 'Z'}) {
      std::string s(static_cast<std::size_t>(n), 'I');
      s[static_cast<std::size_t>(q)] = p;
      terms.emplace_back(s, w);
    }
  }
  return pauli_errors(terms);
}

/// Identity with weight 1 - n p plus X on each single qubit with weight p.
inline Channel single_x_errors(int n, double p) {
  check_probability(p * n, "total error weight");
  std::vector<std::pair<std::string, double>> terms;
  terms.emplace_back(std::string(static_cast<std::size_t>(n), 'I'), 1.0 - n * p);
  for (int q = 0; q < n; ++q) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(q)] = 'X';
    terms.emplace_back(s, p);
  }
  return pauli_errors(terms);
}

/// Completely dephasing map in the computational basis.
inline Channel dephasing(Index d) {
  std::vector<Matrix> kraus;
  for (Index k = 0; k < d; ++k) {
    Matrix p = Matrix::Zero(d, d);
    p(k, k) = 1.0;
    kraus.push_back(std::move(p));
  }
  return Channel::from_kraus(std::move(kraus));
}

}  // namespace noise

namespace codes {

inline Vector basis_ket(const std::string& bits) {
  Vector v = Vector::Zero(Index(1) << bits.size());
  v(static_cast<Index>(std::stoul(bits, nullptr, 2))) = 1.0;
  return v;
}

/// |0> -> |000>, |1> -> |111>
inline CodeIsometry bit_flip_code() {
  return CodeIsometry::from_codewords({basis_ket("000"), basis_ket("111")});
}

/// [[5,1,3]] code: |0_L> is the projection of |00000> onto the stabilizer
/// group of XZZXI and its cyclic shifts, |1_L> = XXXXX |0_L>.
inline CodeIsometry five_qubit_code() {
  const std::vector<std::string> generators = {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"};
  Matrix proj = identity(32);
  for (const std::string& g : generators) proj = proj * (identity(32) + pauli::string(g)) * 0.5;
  const Vector zero = proj * basis_ket("00000");
  const Vector one = pauli::string("XXXXX") * zero;
  return CodeIsometry::from_codewords({zero, one});
}

/// Four-qubit amplitude-damping code:
/// |0_L> = (|0000> + |1111>)/sqrt2, |1_L> = (|0011> + |1100>)/sqrt2.
inline CodeIsometry leung_code() {
  return CodeIsometry::from_codewords({basis_ket("0000") + basis_ket("1111"), basis_ket("0011") + basis_ket("1100")});
}

/// Trivial code V = I_d.
inline CodeIsometry trivial_code(Index d) {
  return CodeIsometry::from_matrix(identity(d));
}

}  // namespace codes

/// Noise after encoding as one channel: logical -> physical.
inline Channel encoded(const CodeIsometry& code, const Channel& noise) {
  if (noise.dim_in() != code.dim_physical()) throw Error("bad-dims", "noise input does not match the code's physical dimension");
  std::vector<Matrix> kraus;
  kraus.reserve(noise.size());
  for (const Matrix& e : noise.kraus()) kraus.push_back(e * code.v());
  return Channel::from_kraus(std::move(kraus), noise.trace_preserving());
}

}  // namespace aqec
