#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "fixtures.hpp"
#include "istab/core.hpp"

using namespace istab;
using namespace istab::testing;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(StateVector, RejectsNonFiniteAndEmpty) {
  EXPECT_EQ(code_of([] { StateVector{1.0, kNaN}; }), ErrorCode::NonFiniteInput);
  EXPECT_EQ(code_of([] { StateVector{kInf}; }), ErrorCode::NonFiniteInput);
  EXPECT_EQ(code_of([] { StateVector(Vector(0)); }), ErrorCode::InvalidArgument);
  const StateVector x{1.0, -3.0};
  EXPECT_EQ(x.size(), 2);
  EXPECT_DOUBLE_EQ(x.max_abs(), 3.0);
}

TEST(DMax, ValuesAndDimensionCheck) {
  EXPECT_DOUBLE_EQ(d_max(StateVector{1, 2}, StateVector{1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(d_max(StateVector{0, 0}, StateVector{3, -4}), 4.0);
  EXPECT_EQ(code_of([] { d_max(StateVector{1}, StateVector{1, 2}); }),
            ErrorCode::DimensionMismatch);
}

TEST(DMax, MetricAxiomsOnRandomPoints) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    Vector x(4), y(4), z(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
      z[i] = g(rng);
    }
    EXPECT_GE(d_max(x, y), 0.0);
    EXPECT_DOUBLE_EQ(d_max(x, x), 0.0);
    EXPECT_DOUBLE_EQ(d_max(x, y), d_max(y, x));
    EXPECT_LE(d_max(x, z), d_max(x, y) + d_max(y, z) + 1e-12);
  }
}

TEST(NetworkMap, ChecksDimensionsAndFiniteness) {
  const NetworkMap id(2, [](const Vector& x) { return x; }, "id");
  EXPECT_EQ(id(StateVector{1, 2}), (StateVector{1, 2}));
  EXPECT_EQ(code_of([&] { id(StateVector{1, 2, 3}); }), ErrorCode::DimensionMismatch);

  const NetworkMap wrong(2, [](const Vector&) { return Vector(Vector::Zero(3)); });
  EXPECT_EQ(code_of([&] { wrong(StateVector{1, 2}); }), ErrorCode::DimensionMismatch);

  const NetworkMap blowup(1, [](const Vector& x) { return Vector(x / 0.0); });
  EXPECT_EQ(code_of([&] { blowup(StateVector{1}); }), ErrorCode::NonFiniteOutput);
}

TEST(IterateOrbit, ContractionConverges) {
  const auto half = linear_map(Matrix::Identity(2, 2) * 0.5);
  const Orbit orbit = iterate_orbit(half, StateVector{8, -8}, 10);
  ASSERT_EQ(orbit.states.size(), 11u);
  EXPECT_FALSE(orbit.exceeded_bound);
  EXPECT_DOUBLE_EQ(orbit.terminal()[0], 8.0 / 1024.0);
}

TEST(IterateOrbit, FlagsDivergenceAndHalts) {
  const auto twice = linear_map(Matrix::Identity(1, 1) * 2.0);
  OrbitOptions opts;
  opts.magnitude_bound = 100.0;
  const Orbit orbit = iterate_orbit(twice, StateVector{1}, 50, opts);
  EXPECT_TRUE(orbit.exceeded_bound);
  EXPECT_EQ(orbit.exceeded_at, 7u);  // 2^7 = 128 > 100
  EXPECT_EQ(orbit.states.size(), 8u);
}

TEST(IterateOrbit, WrapsEvaluatorFailuresWithStep) {
  int calls = 0;
  const NetworkMap flaky(1, [&calls](const Vector& x) {
    if (++calls == 3) return Vector(Vector::Constant(1, kNaN));
    return x;
  });
  try {
    iterate_orbit(flaky, StateVector{1}, 10);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.step(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteOutput);
  }
  EXPECT_EQ(code_of([] { iterate_orbit(linear_map(Matrix::Identity(1, 1)), StateVector{1}, 0); }),
            ErrorCode::InvalidArgument);
}

TEST(IterateSwitchedOrbit, AlternatesAndValidatesIndices) {
  const std::vector<NetworkMap> maps{linear_map(Matrix::Identity(1, 1) * 2.0),
                                     linear_map(Matrix::Identity(1, 1) * 3.0)};
  const Orbit orbit =
      iterate_switched_orbit(maps, [](std::size_t k) { return (k - 1) % 2; }, StateVector{1}, 4);
  EXPECT_DOUBLE_EQ(orbit.terminal()[0], 36.0);
  EXPECT_EQ(code_of([&] {
              iterate_switched_orbit(maps, [](std::size_t) { return std::size_t{2}; },
                                     StateVector{1}, 1);
            }),
            ErrorCode::ScheduleError);
}
