#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "istab/models.hpp"
#include "istab/spectral.hpp"

namespace istab::testing {

/// Runs f and returns the ErrorCode of the istab::Error it throws.
template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an istab::Error";
  return ErrorCode::InvalidArgument;
}

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

inline IntMatrix imat2(int a, int b, int c, int d) {
  IntMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

/// Oscillating two-neuron network: rho(A) = 1.35.
inline CgnSpec oscillating_cgn() {
  return {mat2(0, -0.75, 0.75, 0), 0.4, Activation::tanh(), Vector::Zero(2)};
}

/// Attracting two-neuron network: rho(A) = 0.95, fixed point (-0.386, 1.595).
inline CgnSpec attracting_cgn() {
  return {mat2(0, 0.75, -0.75, 0), 0.8, Activation::tanh(), Vector{{-1.0, 1.0}}};
}

/// Switched pair G, H: Lipschitz matrices [[.2,.75],[.75,.2]], [[.7,.25],[.25,.7]].
inline CgnSpec network_g(bool with_input = true) {
  return {mat2(0, -0.75, 0.75, 0), 0.8, Activation::tanh(),
          with_input ? Vector{{-1.0, 1.0}} : Vector::Zero(2)};
}

inline CgnSpec network_h(bool with_input = true) {
  return {mat2(0, 0.25, 0.25, 0), 0.3, Activation::tanh(),
          with_input ? Vector{{1.0, -1.0}} : Vector::Zero(2)};
}

inline NetworkMap linear_map(const Matrix& M, std::string label = "M") {
  return NetworkMap(M.rows(), [M](const Vector& x) { return Vector(M * x); }, std::move(label));
}

/// Random nonnegative matrix with roughly `density` of its entries nonzero.
inline Matrix random_nonnegative(std::mt19937_64& rng, Index n, double density = 0.6,
                                 double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix M = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (u(rng) < density) M(i, j) = scale * u(rng);
    }
  }
  return M;
}

inline Matrix random_signed(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix M(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) M(i, j) = u(rng);
  }
  return M;
}

inline IntMatrix random_delays(std::mt19937_64& rng, Index n, int L) {
  std::uniform_int_distribution<int> d(0, L);
  IntMatrix D(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) D(i, j) = d(rng);
  }
  return D;
}

/// Largest |eigenvalue| via Eigen's dense eigensolver.
inline double eigen_radius(const Matrix& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace istab::testing
