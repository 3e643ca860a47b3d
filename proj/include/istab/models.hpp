#pragma once

// Builders for the concrete model families: discrete-time Cohen-Grossberg
// networks, linear systems with a separately delayed term, and switched
// linear systems with state feedback control.

#include <functional>
#include <string>
#include <vector>

#include "istab/core.hpp"
#include "istab/lipschitz.hpp"
#include "istab/switched.hpp"

namespace istab {

enum class ActivationKind { Tanh, Logistic, User };

const char* to_string(ActivationKind k);

/// Bounded, monotone activation with Lipschitz constant K.
struct Activation {
  ActivationKind kind = ActivationKind::Tanh;
  std::function<double(double)> fn;
  double K = 1.0;

  static Activation tanh();
  /// 1 / (1 + e^-x), K = 1/4.
  static Activation logistic();
  /// K must be supplied; it is never inferred.
  static Activation user(std::function<double(double)> fn, double K);
};

struct CgnSpec {
  Matrix W;
  double epsilon = 0.0;
  Activation sigma = Activation::tanh();
  Vector c;
};

struct CgnModel {
  NetworkMap map;
  LipschitzMatrix lipschitz;
};

/// C_i(x) = (1 - eps) x_i + sum_j W_ij sigma(x_j) + c_i, with Lipschitz
/// matrix |1 - eps| I + K |W|.
CgnModel build_cgn(const CgnSpec& spec);

struct FixedPointOptions {
  double damping = 0.5;
  double tol = 1e-12;
  std::size_t max_iter = 1'000'000;
};

struct FixedPointResult {
  StateVector point;
  std::size_t iterations = 0;
  double residual = 0.0;  // d_max(F(x), x)
  bool converged = false;
};

/// Damped iteration x <- (1 - damping) x + damping F(x) from `start`.
FixedPointResult find_fixed_point(const NetworkMap& map, const StateVector& start,
                                  const FixedPointOptions& options = {});

/// [A B; I 0].
Matrix lifted_transition(const Matrix& A, const Matrix& B);

/// Delay schedule on the 2n-dimensional lifted state (x^k, x^{k-1}) that
/// reproduces x^{k+1} = A x^k + B x^{k - tau(k)}: the B block is delayed by
/// tau(k) - 1 further steps, so the lifted bound is L - 1. Throws
/// ScheduleError when tau(k) leaves [1, L].
DelaySchedule lifted_delay_schedule(Index n, int L, std::function<int(std::size_t)> tau,
                                    std::string description = "tau(k)");

struct LinearDelayedSpec {
  Matrix A;
  Matrix B;
  int L = 1;
  std::function<int(std::size_t)> tau;
};

struct LiftedLinearModel {
  NetworkMap map;
  LipschitzMatrix lipschitz;
  DelaySchedule delays;
  Matrix transition;
};

LiftedLinearModel build_lifted_linear(const LinearDelayedSpec& spec);

struct LinearMode {
  Matrix A;
  Matrix B;
};

/// x^{k+1} = A_m x^k + B_m x^{k - tau(k)} + c_s q^T x^k, switching over every
/// (mode m, control direction c_s) pair. An empty q or c_set means no control.
struct SwitchedControlSpec {
  std::vector<LinearMode> modes;
  Vector q;
  std::vector<Vector> c_set;
};

struct SwitchedControlModel {
  SwitchedSet set;
  /// One [A_m + c_s q^T, B_m; I, 0] per (mode, control) pair, mode-major.
  std::vector<Matrix> transitions;
};

SwitchedControlModel build_switched_control(const SwitchedControlSpec& spec);

}  // namespace istab
