#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "istab/spectral.hpp"

using namespace istab;
using namespace istab::testing;

namespace {

Matrix lifted_abs(const Matrix& A, const Matrix& B) { return lifted_transition(A, B).cwiseAbs(); }

}  // namespace

TEST(PowerIteration, ReferenceRadii) {
  EXPECT_NEAR(spectral_radius_power(build_cgn(oscillating_cgn()).lipschitz), 1.35, 1e-9);
  EXPECT_NEAR(spectral_radius_power(build_cgn(attracting_cgn()).lipschitz), 0.95, 1e-9);
  EXPECT_NEAR(spectral_radius_power(lifted_abs(mat2(0.6, 0, 0.35, 0.7), mat2(0.1, 0, 0.2, 0.1))),
              0.8216990566, 1e-8);
  EXPECT_NEAR(
      spectral_radius_power(lifted_abs(mat2(0.8, 0, 0.05, 0.9), mat2(-0.1, 0, -0.2, -0.1))), 1.0,
      1e-9);
}

TEST(PowerIteration, AgreesWithEigenSolverOnRandomMatrices) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 9;
    const Matrix M = random_nonnegative(rng, n, 0.4);
    EXPECT_NEAR(spectral_radius_power(M, {1e-12}), eigen_radius(M), 1e-6 * (1 + eigen_radius(M)))
        << M;
  }
}

TEST(PowerIteration, DegenerateStructures) {
  EXPECT_DOUBLE_EQ(spectral_radius_power(Matrix(Matrix::Zero(3, 3))), 0.0);
  Matrix nilpotent = Matrix::Zero(3, 3);
  nilpotent(0, 1) = 2;
  nilpotent(1, 2) = 5;
  EXPECT_DOUBLE_EQ(spectral_radius_power(nilpotent), 0.0);
  // Defective (Jordan-like) and reducible.
  EXPECT_NEAR(spectral_radius_power(mat2(0.1, 1, 0, 0.1)), 0.1, 1e-9);
  // Imprimitive: a cyclic permutation has every eigenvalue on the unit circle.
  Matrix cycle = Matrix::Zero(5, 5);
  for (int i = 0; i < 5; ++i) cycle(i, (i + 1) % 5) = 0.5;
  EXPECT_NEAR(spectral_radius_power(cycle), 0.5, 1e-9);
}

TEST(PowerIteration, ReportsBracketAndErrors) {
  const auto r = power_iteration(Matrix(mat2(0.6, 0.75, 0.75, 0.6)));
  EXPECT_TRUE(r.bracketed);
  EXPECT_LE(r.lower, 1.35 + 1e-12);
  EXPECT_GE(r.upper, 1.35 - 1e-12);
  EXPECT_GT(r.iterations, 0u);

  EXPECT_EQ(code_of([] { spectral_radius_power(Matrix(mat2(1, -1, 0, 1))); }),
            ErrorCode::NegativeEntry);
  EXPECT_EQ(code_of([] { spectral_radius_power(Matrix(Matrix::Ones(2, 3))); }),
            ErrorCode::NonSquareMatrix);
  std::mt19937_64 rng(5);
  const Matrix M = random_nonnegative(rng, 30, 1.0);
  PowerOptions tight;
  tight.max_iter = 1;
  tight.tol = 1e-15;
  EXPECT_EQ(code_of([&] { power_iteration(M, tight); }), ErrorCode::NoConvergence);
}

TEST(CharacteristicPolynomial, KnownCoefficients) {
  // det(lambda I - [[1,2],[3,4]]) = lambda^2 - 5 lambda - 2
  const auto p = characteristic_polynomial(mat2(1, 2, 3, 4));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], -2, 1e-12);
  EXPECT_NEAR(p[1], -5, 1e-12);
  EXPECT_NEAR(p[2], 1, 1e-12);
  EXPECT_EQ(code_of([] { characteristic_polynomial(Matrix::Ones(7, 7)); }),
            ErrorCode::DimensionTooLarge);
  EXPECT_EQ(code_of([] { characteristic_polynomial(Matrix::Ones(2, 3)); }),
            ErrorCode::NonSquareMatrix);
}

TEST(SpectralRadiusExact, MatchesKnownValues) {
  EXPECT_NEAR(spectral_radius_exact(mat2(0.6, 0.75, 0.75, 0.6)), 1.35, 1e-10);
  EXPECT_NEAR(spectral_radius_exact(mat2(0, -1, 1, 0)), 1.0, 1e-10);  // complex pair
  EXPECT_NEAR(spectral_radius_exact(Matrix(Matrix::Zero(3, 3))), 0.0, 1e-10);
  EXPECT_NEAR(spectral_radius_exact(lifted_abs(mat2(0.6, 0, 0.35, 0.7), mat2(0.1, 0, 0.2, 0.1))),
              0.8216990566, 1e-8);
}

TEST(Classify, Trichotomy) {
  EXPECT_EQ(classify(0.5, 1e-8), Verdict::Stable);
  EXPECT_EQ(classify(1.0 - 2e-8, 1e-8), Verdict::Stable);
  EXPECT_EQ(classify(1.0 - 5e-9, 1e-8), Verdict::Marginal);
  EXPECT_EQ(classify(1.0, 1e-8), Verdict::Marginal);
  EXPECT_EQ(classify(1.0 + 5e-9, 1e-8), Verdict::Marginal);
  EXPECT_EQ(classify(1.0 + 2e-8, 1e-8), Verdict::NotIntrinsicallyStable);
  EXPECT_STREQ(to_string(Verdict::NotIntrinsicallyStable), "not-intrinsically-stable");
}

TEST(IsIntrinsicallyStable, CertificateFields) {
  const auto cert = is_intrinsically_stable(build_cgn(attracting_cgn()).lipschitz);
  EXPECT_EQ(cert.verdict, Verdict::Stable);
  EXPECT_NEAR(cert.rho, 0.95, 1e-9);
  EXPECT_EQ(cert.provenance, Provenance::Analytic);
  EXPECT_FALSE(cert.heuristic);
  EXPECT_DOUBLE_EQ(cert.tol, 1e-8);

  const auto unstable = is_intrinsically_stable(build_cgn(oscillating_cgn()).lipschitz);
  EXPECT_EQ(unstable.verdict, Verdict::NotIntrinsicallyStable);
  const auto marginal = is_intrinsically_stable(LipschitzMatrix(
      lifted_abs(mat2(0.8, 0, 0.05, 0.9), mat2(-0.1, 0, -0.2, -0.1)), Provenance::Analytic));
  EXPECT_EQ(marginal.verdict, Verdict::Marginal);
}

TEST(MatrixSet, Validation) {
  EXPECT_EQ(code_of([] { MatrixSet({}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { MatrixSet({Matrix::Ones(2, 2), Matrix::Ones(3, 3)}); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { MatrixSet({mat2(1, -1, 0, 0)}); }), ErrorCode::NegativeEntry);
  const MatrixSet S({mat2(1, 0, 0, 1), mat2(0, 1, 1, 0)});
  EXPECT_EQ(S.labels(), (std::vector<std::string>{"S1", "S2"}));
  EXPECT_TRUE(S.contains(mat2(0, 1, 1, 0)));
  EXPECT_FALSE(S.contains(mat2(1, 1, 1, 1)));
}

TEST(RiClosure, SwitchedCgnPair) {
  const MatrixSet S({mat2(0.2, 0.75, 0.75, 0.2), mat2(0.7, 0.25, 0.25, 0.7)});
  EXPECT_EQ(ri_closure_size(S), 4u);
  const MatrixSet R = ri_closure(S);
  ASSERT_EQ(R.size(), 4u);
  for (const auto& m : S.members()) EXPECT_TRUE(R.contains(m));
  EXPECT_TRUE(R.contains(mat2(0.2, 0.75, 0.25, 0.7)));
  EXPECT_TRUE(R.contains(mat2(0.7, 0.25, 0.75, 0.2)));
  // Every member has row sums 0.95, so the bound is 0.95.
  const auto bounds = jsr_upper_bound_ri(S);
  EXPECT_NEAR(bounds.upper, 0.95, 1e-9);
  EXPECT_NEAR(bounds.lower, 0.95, 1e-9);
  EXPECT_EQ(bounds.method, JsrMethod::RiClosure);
  EXPECT_EQ(bounds.closure_size, 4u);
}

TEST(RiClosure, IdempotentAndContainsOriginal) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Matrix> members;
    for (int k = 0; k < 3; ++k) members.push_back(random_nonnegative(rng, 3, 0.5));
    const MatrixSet S(members);
    const MatrixSet R = ri_closure(S);
    const MatrixSet RR = ri_closure(R);
    EXPECT_EQ(R.size(), RR.size());
    for (const auto& m : RR.members()) EXPECT_TRUE(R.contains(m));
    for (const auto& m : S.members()) EXPECT_TRUE(R.contains(m));
  }
}

TEST(RiClosure, DuplicateRowsCollapse) {
  const MatrixSet S({mat2(1, 0, 0, 1), mat2(1, 0, 0, 1), mat2(1, 0, 1, 0)});
  EXPECT_EQ(ri_closure_size(S), 2u);
}

TEST(RiClosure, CapAbortsBeforeVisiting) {
  std::vector<Matrix> members;
  for (int k = 0; k < 4; ++k) members.push_back(Matrix::Constant(12, 12, 0.01 * (k + 1)));
  const MatrixSet S(members);
  EXPECT_EQ(ri_closure_size(S), std::size_t{1} << 24);
  int visits = 0;
  EXPECT_EQ(code_of([&] {
              for_each_ri_member(S, [&](const Matrix&, const std::string&) { ++visits; });
            }),
            ErrorCode::ClosureTooLarge);
  EXPECT_EQ(visits, 0);
  EXPECT_EQ(code_of([&] { ri_closure(S, 100); }), ErrorCode::ClosureTooLarge);
}

TEST(JsrBruteforce, CounterexamplePairExceedsOne) {
  const double e = 0.1;
  const MatrixSet S({mat2(e, 1, 0, e), mat2(e, 0, 1, e)});
  const auto b = jsr_bruteforce(S, 2);
  const double rho_u = 0.5 * (1 + 2 * e * e + std::sqrt(1 + 4 * e * e));
  EXPECT_NEAR(b.lower, std::sqrt(rho_u), 1e-9);
  EXPECT_GT(b.lower, 1.0);
  EXPECT_GE(b.upper, b.lower);
  EXPECT_EQ(b.method, JsrMethod::ProductBruteforce);
  EXPECT_EQ(b.depth, 2u);
}

TEST(JsrBruteforce, BracketsRiBoundForSwitchedPair) {
  const MatrixSet S({mat2(0.2, 0.75, 0.75, 0.2), mat2(0.7, 0.25, 0.25, 0.7)});
  const auto b = jsr_bruteforce(S, 6);
  EXPECT_LE(b.lower, 0.95 + 1e-9);
  EXPECT_GE(b.upper, 0.95 - 1e-9);
  EXPECT_LE(b.lower, jsr_upper_bound_ri(S).upper + 1e-9);
}

TEST(JsrBruteforce, EnumerationCap) {
  const MatrixSet S({mat2(1, 0, 0, 1), mat2(0, 1, 1, 0), mat2(1, 1, 0, 0)});
  EXPECT_EQ(code_of([&] { jsr_bruteforce(S, 10, 1000); }), ErrorCode::EnumerationCapExceeded);
  EXPECT_EQ(code_of([&] { jsr_bruteforce(S, 0); }), ErrorCode::InvalidArgument);
}
