#include <gtest/gtest.h>

#include <limits>

#include "fixtures.hpp"
#include "istab/lipschitz.hpp"

using namespace istab;
using namespace istab::testing;

TEST(LipschitzMatrix, ValidatesEntries) {
  EXPECT_EQ(code_of([] { LipschitzMatrix(mat2(1, -0.1, 0, 1), Provenance::Analytic); }),
            ErrorCode::NegativeEntry);
  EXPECT_EQ(code_of([] { LipschitzMatrix(Matrix::Ones(2, 3), Provenance::Analytic); }),
            ErrorCode::NonSquareMatrix);
  EXPECT_EQ(code_of([] { LipschitzMatrix(Matrix(0, 0), Provenance::Analytic); }),
            ErrorCode::InvalidArgument);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { LipschitzMatrix(bad, Provenance::Analytic); }),
            ErrorCode::NonFiniteInput);
}

TEST(LipschitzMatrix, AccessorsAndScaling) {
  const LipschitzMatrix A(mat2(0.5, 0, 0.25, 1), Provenance::UserSupplied);
  EXPECT_EQ(A.dimension(), 2);
  EXPECT_EQ(A.nonzeros(), 3);
  EXPECT_DOUBLE_EQ(A(1, 0), 0.25);
  EXPECT_FALSE(A.heuristic());
  EXPECT_DOUBLE_EQ(A.scaled(2.0)(1, 1), 2.0);
  EXPECT_STREQ(to_string(A.provenance()), "user-supplied");
}

TEST(LipschitzCgn, MatchesClosedForm) {
  const auto A = lipschitz_cgn(mat2(0, -0.75, 0.75, 0), 0.4, 1.0);
  EXPECT_TRUE(A.dense().isApprox(mat2(0.6, 0.75, 0.75, 0.6)));
  const auto B = lipschitz_cgn(mat2(0.5, -1, 2, 0), 1.5, 0.25);
  EXPECT_TRUE(B.dense().isApprox(mat2(0.5 + 0.125, 0.25, 0.5, 0.5)));
  EXPECT_EQ(A.provenance(), Provenance::Analytic);
}

TEST(LipschitzLinear, IsEntrywiseAbsoluteValue) {
  EXPECT_TRUE(lipschitz_linear(mat2(-1, 2, 0, -0.5)).dense().isApprox(mat2(1, 2, 0, 0.5)));
}

TEST(LipschitzSampled, ApproximatesAnalyticBoundFromBelowThenInflates) {
  const auto model = build_cgn(oscillating_cgn());
  SampledOptions opts;
  opts.grid = 41;
  const auto sampled = lipschitz_sampled(model.map, uniform_box(2, -3, 3), opts);
  EXPECT_EQ(sampled.provenance(), Provenance::Sampled);
  EXPECT_TRUE(sampled.heuristic());
  ASSERT_TRUE(sampled.sampling().has_value());
  EXPECT_EQ(sampled.sampling()->grid, 41u);
  const Matrix analytic = model.lipschitz.dense();
  // The grid contains x = 0 where tanh' = 1, so the supremum is attained.
  EXPECT_TRUE(sampled.dense().isApprox(analytic * opts.inflation, 1e-6));
}

TEST(LipschitzSampled, ZeroWidthAxisAndPointCap) {
  const auto map = linear_map(mat2(1, -2, 0, 3));
  const Box box{{0.0, 0.0}, {-1.0, 1.0}};
  SampledOptions opts;
  opts.inflation = 1.0;
  const auto A = lipschitz_sampled(map, box, opts);
  EXPECT_TRUE(A.dense().isApprox(mat2(1, 2, 0, 3), 1e-6));

  opts.max_points = 10;
  EXPECT_EQ(code_of([&] { lipschitz_sampled(map, uniform_box(2, -1, 1), opts); }),
            ErrorCode::DimensionTooLarge);
  EXPECT_EQ(code_of([&] { lipschitz_sampled(map, uniform_box(3, -1, 1)); }),
            ErrorCode::DimensionMismatch);
}

TEST(VerifyLipschitz, AcceptsValidRejectsTooSmall) {
  const auto model = build_cgn(attracting_cgn());
  const Box box = uniform_box(2, -5, 5);
  const auto ok = verify_lipschitz(model.map, model.lipschitz, 2000, box, 42);
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.samples, 2000u);
  EXPECT_LE(ok.worst_margin, 0.0);

  const auto bad = verify_lipschitz(model.map, model.lipschitz.scaled(0.5), 2000, box, 42);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.worst_margin, 0.0);
  ASSERT_TRUE(bad.witness_x && bad.witness_y);
  // The witness pair really violates the inequality for the reported row.
  const Vector fx = model.map.apply(*bad.witness_x);
  const Vector fy = model.map.apply(*bad.witness_y);
  const Index i = bad.worst_component;
  const double lhs = std::abs(fx[i] - fy[i]);
  const double rhs =
      (model.lipschitz.scaled(0.5).dense().row(i) * (*bad.witness_x - *bad.witness_y).cwiseAbs())(0);
  EXPECT_GT(lhs, rhs);
}

TEST(VerifyLipschitz, DeterministicForSeed) {
  const auto model = build_cgn(oscillating_cgn());
  const auto A = model.lipschitz.scaled(0.9);
  const auto r1 = verify_lipschitz(model.map, A, 300, uniform_box(2, -2, 2), 7);
  const auto r2 = verify_lipschitz(model.map, A, 300, uniform_box(2, -2, 2), 7);
  EXPECT_EQ(r1.passed, r2.passed);
  EXPECT_DOUBLE_EQ(r1.worst_margin, r2.worst_margin);
}
