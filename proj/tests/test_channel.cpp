#include <gtest/gtest.h>

#include "support.hpp"

using namespace aqec;
using aqec::testing::action_distance;
using aqec::testing::max_abs_diff;

namespace {

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

Matrix ket_bra(Index d, Index i, Index j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

TEST(Channel, ValidatesKraus) {
  EXPECT_EQ(error_code([] { Channel::from_kraus({}); }), "bad-dims");
  EXPECT_EQ(error_code([] { Channel::from_kraus({identity(2), Matrix::Zero(3, 2)}); }), "bad-dims");
  EXPECT_EQ(error_code([] { Channel::from_kraus({0.5 * identity(2)}); }), "not-trace-preserving");
  EXPECT_EQ(error_code([] { Channel::from_kraus({2.0 * identity(2)}, false); }), "not-trace-decreasing");
  EXPECT_NO_THROW(Channel::from_kraus({0.5 * identity(2)}, false));
}

TEST(Apply, IdentityChannel) {
  random::Rng rng(1);
  const DensityMatrix rho = random::state(rng, 3);
  EXPECT_LT(max_abs_diff(aqec::apply(Channel::identity_channel(3), rho).matrix(), rho.matrix()), 1e-15);
}

TEST(Apply, FullDamping) {
  random::Rng rng(2);
  const DensityMatrix out = aqec::apply(noise::amplitude_damping(1.0), random::state(rng, 2));
  EXPECT_LT(max_abs_diff(out.matrix(), DensityMatrix::basis(2, 0).matrix()), 1e-14);
}

TEST(Apply, SymmetricBitFlip) {
  const DensityMatrix out = aqec::apply(noise::bit_flip(0.5), DensityMatrix::basis(2, 0));
  EXPECT_LT(max_abs_diff(out.matrix(), identity(2) / 2.0), 1e-15);
}

TEST(Compose, IdentityOuter) {
  random::Rng rng(3);
  const Channel n = random::channel(rng, 2, 3, 2);
  EXPECT_LT(action_distance(compose(Channel::identity_channel(3), n), n), 1e-14);
}

TEST(Compose, AmplitudeDampingSemigroup) {
  const double g1 = 0.3;
  const double g2 = 0.45;
  const Channel c = compose(noise::amplitude_damping(g1), noise::amplitude_damping(g2));
  EXPECT_LT(action_distance(c, noise::amplitude_damping(g1 + g2 - g1 * g2)), 1e-14);
}

TEST(Compose, MismatchedDims) {
  random::Rng rng(4);
  const Channel n = random::channel(rng, 2, 4, 1);
  const Channel m = random::channel(rng, 3, 5, 2);
  EXPECT_EQ(error_code([&] { compose(m, n); }), "bad-dims");
}

TEST(Complementary, IdentityLeaksNothing) {
  const Channel c = complementary(Channel::identity_channel(3));
  EXPECT_EQ(c.dim_out(), 1);
  random::Rng rng(5);
  EXPECT_NEAR(aqec::apply(c, random::state(rng, 3).matrix())(0, 0).real(), 1.0, 1e-14);
}

TEST(Complementary, UndampedEnvironmentStaysInGround) {
  const Channel c = complementary(noise::amplitude_damping(0.0));
  EXPECT_EQ(c.dim_out(), 2);
  random::Rng rng(6);
  EXPECT_LT(max_abs_diff(aqec::apply(c, random::state(rng, 2).matrix()), ket_bra(2, 0, 0)), 1e-14);
}

TEST(Complementary, FullDampingMovesStateToEnvironment) {
  const Channel c = complementary(noise::amplitude_damping(1.0));
  random::Rng rng(7);
  const Matrix rho = random::state(rng, 2).matrix();
  EXPECT_LT(max_abs_diff(aqec::apply(c, rho), rho), 1e-14);
}

TEST(Complementary, EntriesAreKrausOverlaps) {
  random::Rng rng(8);
  const Channel n = random::channel(rng, 3, 2, 4);
  const Matrix rho = random::state(rng, 3).matrix();
  EXPECT_LT(max_abs_diff(aqec::apply(complementary(n), rho), aqec::testing::reference_complement_output(n, rho)), 1e-12);
}

TEST(ConstantChannel, PreparesState) {
  const Channel c = constant_channel(DensityMatrix::basis(2, 0), 2);
  EXPECT_LT(max_abs_diff(aqec::apply(c, identity(2) / 2.0), ket_bra(2, 0, 0)), 1e-15);
  const Channel m = constant_channel(DensityMatrix::maximally_mixed(2), 3);
  random::Rng rng(9);
  EXPECT_LT(max_abs_diff(aqec::apply(m, random::state(rng, 3).matrix()), identity(2) / 2.0), 1e-14);
}

TEST(ConstantChannel, TraceThenPrepare) {
  random::Rng rng(10);
  const DensityMatrix sigma = random::state(rng, 2);
  const Channel prepare = constant_channel(sigma, 1);
  EXPECT_LT(action_distance(compose(prepare, trace_channel(3)), constant_channel(sigma, 3)), 1e-14);
}

TEST(FromIsometry, IdentityTimesGround) {
  Matrix v = Matrix::Zero(4, 2);
  v(0, 0) = 1.0;  // |0>_S |0>_E
  v(2, 1) = 1.0;  // |1>_S |0>_E
  const ChannelPair p = from_isometry(v, 2);
  EXPECT_LT(action_distance(p.channel, Channel::identity_channel(2)), 1e-15);
  EXPECT_LT(action_distance(p.complement, constant_channel(DensityMatrix::basis(2, 0), 2)), 1e-15);
}

TEST(FromIsometry, StackedAmplitudeDamping) {
  const Channel ad = noise::amplitude_damping(0.3);
  const ChannelPair p = from_isometry(stinespring(ad), 2);
  EXPECT_LT(action_distance(p.channel, ad), 1e-14);
}

TEST(FromIsometry, ComplementGramMatches) {
  random::Rng rng(11);
  const Matrix v = random::isometry(rng, 6, 2);
  const ChannelPair p = from_isometry(v, 3);
  for (int t = 0; t < 5; ++t) {
    const Matrix rho = random::state(rng, 2).matrix();
    EXPECT_LT(max_abs_diff(aqec::apply(p.complement, rho), aqec::apply(complementary(p.channel), rho)), 1e-12);
  }
}

TEST(Noise, UndampedIsIdentity) {
  EXPECT_LT(action_distance(noise::amplitude_damping(0.0), Channel::identity_channel(2)), 1e-15);
}

TEST(Noise, TensorPowerShape) {
  const Channel c = tensor_power(noise::amplitude_damping(0.2), 4);
  EXPECT_EQ(c.size(), 16u);
  EXPECT_EQ(c.dim_in(), 16);
  EXPECT_EQ(c.dim_out(), 16);
  EXPECT_TRUE(c.trace_preserving());
}

TEST(Noise, FullDepolarizing) {
  random::Rng rng(12);
  const DensityMatrix psi = random::pure_state(rng, 2);
  EXPECT_LT(max_abs_diff(aqec::apply(noise::depolarizing(0.75), psi).matrix(), identity(2) / 2.0), 1e-14);
}

TEST(Noise, RejectsBadProbability) {
  EXPECT_EQ(error_code([] { noise::amplitude_damping(1.5); }), "bad-param");
  EXPECT_EQ(error_code([] { noise::bit_flip(-0.1); }), "bad-param");
  EXPECT_EQ(error_code([] { tensor_power(noise::bit_flip(0.1), 0); }), "bad-param");
}

TEST(Codes, Isometries) {
  for (const CodeIsometry& c : {codes::bit_flip_code(), codes::five_qubit_code(), codes::leung_code()}) {
    EXPECT_LT(max_abs_diff(c.v().adjoint() * c.v(), identity(2)), 1e-10);
  }
}

TEST(Codes, LeungCodewordsOrthogonal) {
  const Matrix v = codes::leung_code().v();
  EXPECT_LT(std::abs(v.col(0).dot(v.col(1))), 1e-15);
}

TEST(Codes, FiveQubitStabilized) {
  const Matrix v = codes::five_qubit_code().v();
  for (const char* g : {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}) {
    EXPECT_LT(max_abs_diff(pauli::string(g) * v, v), 1e-12) << g;
  }
}

TEST(Codes, FiveQubitSinglePaulisGiveDiagonalLambda) {
  const KLExactResult r = kl_check_exact(codes::five_qubit_code(), noise::uniform_single_qubit_paulis(5));
  EXPECT_TRUE(r.passes);
  Matrix off = r.lambda;
  off.diagonal().setZero();
  EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Codes, RejectsNonIsometry) {
  EXPECT_EQ(error_code([] { CodeIsometry::from_matrix(2.0 * identity(2)); }), "not-isometry");
}

TEST(Choi, IdentityIsMaximallyEntangled) {
  const Matrix j = choi(Channel::identity_channel(2));
  EXPECT_NEAR(j.trace().real(), 2.0, 1e-15);
  const Eigh e = eigh(j);
  EXPECT_NEAR(e.values.maxCoeff(), 2.0, 1e-14);
  EXPECT_NEAR(e.values.minCoeff(), 0.0, 1e-14);
  EXPECT_NEAR(e.values.sum(), 2.0, 1e-14);
}

TEST(Choi, RoundTrip) {
  random::Rng rng(13);
  const Channel n = random::channel(rng, 3, 2, 3);
  EXPECT_LT(action_distance(kraus_from_choi(choi(n), 3, 2), n), 1e-12);
}

TEST(Choi, ConstantChannelIsIdentityTensorSigma) {
  random::Rng rng(14);
  const DensityMatrix sigma = random::state(rng, 2);
  const Matrix j = choi(constant_channel(sigma, 3));
  EXPECT_LT(max_abs_diff(j, kron(identity(3), sigma.matrix())), 1e-13);
}

TEST(Choi, ComplementIsCompletelyPositive) {
  random::Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const Channel n = random::channel(rng, 2, 3, 1 + t % 4);
    const Channel c = complementary(n);
    EXPECT_GT(min_eigenvalue(choi(c)), -1e-8);
    EXPECT_LT(max_abs_diff(c.kraus_sum(), identity(2)), 1e-12);
  }
}

TEST(Compose, Associative) {
  random::Rng rng(16);
  const Channel a = random::channel(rng, 2, 3, 2);
  const Channel b = random::channel(rng, 3, 2, 2);
  const Channel c = random::channel(rng, 2, 2, 3);
  EXPECT_LT(action_distance(compose(c, compose(b, a)), compose(compose(c, b), a)), 1e-12);
}

TEST(Tensor, ProductAction) {
  random::Rng rng(17);
  const Channel a = random::channel(rng, 2, 2, 2);
  const Channel b = random::channel(rng, 2, 3, 2);
  const Matrix ra = random::state(rng, 2).matrix();
  const Matrix rb = random::state(rng, 2).matrix();
  EXPECT_LT(max_abs_diff(aqec::apply(tensor(a, b), kron(ra, rb)), kron(aqec::apply(a, ra), aqec::apply(b, rb))), 1e-12);
}

TEST(Purify, ReducesToState) {
  random::Rng rng(18);
  const DensityMatrix rho = random::state(rng, 3);
  const Vector psi = purify(rho).vector;
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  EXPECT_LT(max_abs_diff(partial_trace(psi * psi.adjoint(), {3, 3}, Factor::second), rho.matrix()), 1e-12);
}
