#include <gtest/gtest.h>

#include "support.hpp"

using namespace aqec;
using aqec::testing::max_abs_diff;

namespace {

Channel weighted_x_errors(double p0, double p1, double p2, double p3) {
  return noise::pauli_errors({{"III", p0}, {"XII", p1}, {"IXI", p2}, {"IIX", p3}});
}

Channel leung_noise(double gamma) {
  return tensor_power(noise::amplitude_damping(gamma), 4);
}

}  // namespace

TEST(KLExact, BitFlipCodeWithWeightedXErrors) {
  const KLExactResult r = kl_check_exact(codes::bit_flip_code(), weighted_x_errors(0.4, 0.3, 0.2, 0.1));
  EXPECT_TRUE(r.passes);
  Matrix expected = Matrix::Zero(4, 4);
  expected.diagonal() << 0.4, 0.3, 0.2, 0.1;
  EXPECT_LT(max_abs_diff(r.lambda, expected), 1e-12);
}

TEST(KLExact, PhaseErrorFails) {
  const Channel n = noise::pauli_errors({{"III", 0.9}, {"ZII", 0.1}});
  EXPECT_FALSE(kl_check_exact(codes::bit_flip_code(), n).passes);
}

TEST(KLExact, FiveQubitCodePasses) {
  EXPECT_TRUE(kl_check_exact(codes::five_qubit_code(), noise::uniform_single_qubit_paulis(5), 1e-9).passes);
}

TEST(KLExact, DimensionMismatch) {
  EXPECT_THROW(kl_check_exact(codes::bit_flip_code(), noise::amplitude_damping(0.1)), Error);
}

TEST(KLResidual, ExactPairHasNoResidual) {
  const KLReport r = kl_residual(codes::bit_flip_code(), noise::single_x_errors(3, 0.1));
  EXPECT_LE(r.epsilon, 1e-9);
  EXPECT_TRUE(r.exact);
}

TEST(KLResidual, DefaultSigmaReproducesExactLambda) {
  const CodeIsometry code = codes::bit_flip_code();
  const Channel n = weighted_x_errors(0.4, 0.3, 0.2, 0.1);
  EXPECT_LT(max_abs_diff(kl_residual(code, n).lambda, kl_check_exact(code, n).lambda), 1e-9);
}

TEST(KLResidual, LeungWithinFactorTwoOfDelta) {
  const CodeIsometry code = codes::leung_code();
  const KLReport r = kl_residual(code, leung_noise(0.1));
  const RecoveryEstimate est = delta_estimate_id(encoded(code, leung_noise(0.1)));
  EXPECT_GT(r.epsilon, 0.0);
  EXPECT_FALSE(r.exact);
  EXPECT_LE(r.epsilon, 2.0 * est.delta + 1e-9);
  // With the encoded maximally mixed sigma both quantities are the same distance.
  EXPECT_NEAR(r.epsilon, est.delta, 1e-6);
}

TEST(KLResidual, ReportInvariants) {
  random::Rng rng(1);
  const CodeIsometry code = CodeIsometry::from_matrix(random::isometry(rng, 4, 2));
  const Channel n = random::channel(rng, 4, 4, 3);
  const KLReport r = kl_residual(code, n);
  EXPECT_GT(min_eigenvalue(r.lambda), -1e-9);
  EXPECT_NEAR(r.lambda.trace().real(), 1.0, 1e-8);
  const Index k = r.lambda.rows();
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) EXPECT_LT(max_abs_diff(r.b(i, j), r.b(j, i).adjoint()), 1e-9);
  EXPECT_EQ(r.exact, r.epsilon <= kl_exact_tol);
}

TEST(KLResidual, PerturbedMapIsComplementAfterEncoding) {
  random::Rng rng(2);
  const CodeIsometry code = CodeIsometry::from_matrix(random::isometry(rng, 6, 2));
  const Channel n = random::channel(rng, 6, 3, 4);
  const KLReport r = kl_residual(code, n, random::state(rng, 6));
  const Channel lb = lambda_plus_b_channel(r);
  const Channel reference = compose(complementary(n), code.encoding());
  for (int t = 0; t < 5; ++t) {
    const Matrix rho = random::state(rng, 2).matrix();
    EXPECT_LT(max_abs_diff(aqec::apply(lb, rho), aqec::apply(reference, rho)), 1e-9);
  }
}

TEST(KLResidual, RejectsWrongSigma) {
  EXPECT_THROW(kl_residual(codes::bit_flip_code(), noise::single_x_errors(3, 0.1), DensityMatrix::maximally_mixed(2)), Error);
}

TEST(KLResidual, OptimizedSigmaNeverWorse) {
  const CodeIsometry code = codes::leung_code();
  MinimizeConfig outer;
  outer.random_starts = 2;
  MinimizeConfig inner;
  inner.random_starts = 4;
  const double base = kl_residual(code, leung_noise(0.2), std::nullopt, inner).epsilon;
  EXPECT_LE(kl_residual_optimized(code, leung_noise(0.2), outer, inner).epsilon, base + 1e-9);
}

TEST(AlgebraCheck, IdentityGeneratorAlwaysCommutes) {
  random::Rng rng(3);
  const CodeIsometry code = CodeIsometry::from_matrix(random::isometry(rng, 4, 2));
  EXPECT_TRUE(algebra_check(random::channel(rng, 4, 4, 2), code, {identity(2)}));
}

TEST(AlgebraCheck, FullAlgebraMatchesExactCondition) {
  const std::vector<Matrix> full = {pauli::x(), pauli::y(), pauli::z()};
  const CodeIsometry code = codes::bit_flip_code();
  const Channel good = noise::single_x_errors(3, 0.1);
  const Channel bad = noise::pauli_errors({{"III", 0.9}, {"ZII", 0.1}});
  EXPECT_EQ(algebra_check(good, code, full), kl_check_exact(code, good).passes);
  EXPECT_EQ(algebra_check(bad, code, full), kl_check_exact(code, bad).passes);
  EXPECT_FALSE(algebra_check(bad, code, full));
}

TEST(AlgebraCheck, SubsystemNoiseOnSecondFactor) {
  // Logical space 2 (x) 2, noise acts only on the second factor.
  const CodeIsometry code = codes::trivial_code(4);
  const Channel n = tensor(Channel::identity_channel(2), noise::amplitude_damping(0.3));
  const std::vector<Matrix> first = {kron(pauli::x(), identity(2)), kron(pauli::z(), identity(2))};
  EXPECT_TRUE(algebra_check(n, code, first));
  const std::vector<Matrix> second = {kron(identity(2), pauli::x())};
  EXPECT_FALSE(algebra_check(n, code, second));
}

TEST(AlgebraCheck, RejectsWrongGeneratorSize) {
  EXPECT_THROW(algebra_check(noise::single_x_errors(3, 0.1), codes::bit_flip_code(), {identity(3)}), Error);
}
