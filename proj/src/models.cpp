#include "istab/models.hpp"

#include <cmath>

namespace istab {

const char* to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Logistic: return "logistic";
    case ActivationKind::User: return "user";
  }
  return "unknown";
}

Activation Activation::tanh() {
  return {ActivationKind::Tanh, [](double x) { return std::tanh(x); }, 1.0};
}

Activation Activation::logistic() {
  return {ActivationKind::Logistic, [](double x) { return 1.0 / (1.0 + std::exp(-x)); }, 0.25};
}

Activation Activation::user(std::function<double(double)> fn, double K) {
  if (!fn) throw Error(ErrorCode::InvalidArgument, "user activation needs a function");
  if (!(K >= 0.0) || !std::isfinite(K)) {
    throw Error(ErrorCode::InvalidArgument, "user activation needs a finite K >= 0");
  }
  return {ActivationKind::User, std::move(fn), K};
}

CgnModel build_cgn(const CgnSpec& spec) {
  const Index n = spec.W.rows();
  if (spec.W.cols() != n || n == 0) {
    throw Error(ErrorCode::NonSquareMatrix, "CGN weight matrix must be square");
  }
  if (spec.c.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "CGN input c has length " + std::to_string(spec.c.size()) + ", expected " +
                    std::to_string(n));
  }
  if (!spec.sigma.fn) throw Error(ErrorCode::InvalidArgument, "CGN activation is missing");
  if (spec.sigma.kind == ActivationKind::Tanh && spec.sigma.K != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "tanh has Lipschitz constant K = 1");
  }

  const Matrix W = spec.W;
  const Vector c = spec.c;
  const double leak = 1.0 - spec.epsilon;
  const auto sigma = spec.sigma.fn;
  NetworkMap map(
      n,
      [W, c, leak, sigma](const Vector& x) {
        const Vector s = x.unaryExpr(sigma);
        return Vector(leak * x + W * s + c);
      },
      "cgn");
  return CgnModel{std::move(map), lipschitz_cgn(spec.W, spec.epsilon, spec.sigma.K)};
}

FixedPointResult find_fixed_point(const NetworkMap& map, const StateVector& start,
                                  const FixedPointOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  }
  Vector x = start.values();
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const Vector fx = map.evaluate(StateVector(x)).values();
    const double residual = d_max(fx, x);
    if (residual <= options.tol) {
      return FixedPointResult{StateVector(x), it, residual, true};
    }
    x = (1.0 - options.damping) * x + options.damping * fx;
  }
  const double residual = d_max(map.evaluate(StateVector(x)).values(), x);
  return FixedPointResult{StateVector(x), options.max_iter, residual, residual <= options.tol};
}

Matrix lifted_transition(const Matrix& A, const Matrix& B) {
  const Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n || n == 0) {
    throw Error(ErrorCode::DimensionMismatch, "A and B must be square of equal size");
  }
  Matrix T = Matrix::Zero(2 * n, 2 * n);
  T.topLeftCorner(n, n) = A;
  T.topRightCorner(n, n) = B;
  T.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return T;
}

DelaySchedule lifted_delay_schedule(Index n, int L, std::function<int(std::size_t)> tau,
                                    std::string description) {
  if (L < 1) throw Error(ErrorCode::InvalidArgument, "delay bound L must be >= 1");
  if (!tau) throw Error(ErrorCode::InvalidArgument, "missing delay magnitude tau(k)");
  return DelaySchedule::from_rule(
      2 * n, L - 1,
      [n, L, tau](std::size_t k) {
        const int t = tau(k);
        if (t < 1 || t > L) {
          throw Error(ErrorCode::ScheduleError, "tau(" + std::to_string(k) + ") = " +
                                                    std::to_string(t) + " outside [1, " +
                                                    std::to_string(L) + "]");
        }
        IntMatrix d = IntMatrix::Zero(2 * n, 2 * n);
        d.topRightCorner(n, n).setConstant(t - 1);
        return d;
      },
      std::move(description));
}

LiftedLinearModel build_lifted_linear(const LinearDelayedSpec& spec) {
  Matrix T = lifted_transition(spec.A, spec.B);
  const Index n = spec.A.rows();
  NetworkMap map(
      2 * n, [T](const Vector& x) { return Vector(T * x); }, "lifted-linear");
  return LiftedLinearModel{std::move(map), lipschitz_linear(T),
                           lifted_delay_schedule(n, spec.L, spec.tau), std::move(T)};
}

SwitchedControlModel build_switched_control(const SwitchedControlSpec& spec) {
  if (spec.modes.empty()) {
    throw Error(ErrorCode::InvalidArgument, "switched control needs at least one mode");
  }
  const Index n = spec.modes.front().A.rows();
  std::vector<Vector> controls = spec.c_set;
  if (controls.empty()) controls.push_back(Vector::Zero(n));
  const Vector q = spec.q.size() == 0 ? Vector::Zero(n) : spec.q;
  if (q.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "feedback gain q has the wrong length");
  }

  std::vector<Matrix> transitions;
  std::vector<NetworkMap> maps;
  std::vector<Matrix> lipschitz;
  std::vector<std::string> labels;
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    const auto& mode = spec.modes[m];
    if (mode.A.rows() != n) {
      throw Error(ErrorCode::DimensionMismatch, "all modes must share a dimension");
    }
    for (std::size_t s = 0; s < controls.size(); ++s) {
      if (controls[s].size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "control direction has the wrong length");
      }
      const Matrix closed = mode.A + controls[s] * q.transpose();
      Matrix T = lifted_transition(closed, mode.B);
      std::string label = "m" + std::to_string(m + 1) + "c" + std::to_string(s + 1);
      maps.emplace_back(2 * n, [T](const Vector& x) { return Vector(T * x); }, label);
      lipschitz.push_back(T.cwiseAbs());
      labels.push_back(label);
      transitions.push_back(std::move(T));
    }
  }
  return SwitchedControlModel{
      SwitchedSet(std::move(maps), MatrixSet(std::move(lipschitz), std::move(labels))),
      std::move(transitions)};
}

}  // namespace istab
