#include "istab/core.hpp"

#include <cmath>
#include <utility>

namespace istab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::NonSquareMatrix: return "NonSquareMatrix";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::ClosureTooLarge: return "ClosureTooLarge";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::NegativeDelay: return "NegativeDelay";
    case ErrorCode::DelayExceedsBound: return "DelayExceedsBound";
    case ErrorCode::ScheduleError: return "ScheduleError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

bool all_finite(const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

StateVector::StateVector(Vector values) : values_(std::move(values)) {
  if (values_.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "state vector must be nonempty");
  }
  if (!all_finite(values_)) {
    throw Error(ErrorCode::NonFiniteInput, "state vector has non-finite entries");
  }
}

StateVector::StateVector(std::initializer_list<double> values)
    : StateVector(Vector(Eigen::Map<const Vector>(values.begin(),
                                                  static_cast<Index>(values.size())))) {}

double StateVector::max_abs() const { return values_.cwiseAbs().maxCoeff(); }

double d_max(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "d_max: lengths " + std::to_string(x.size()) + " and " +
                    std::to_string(y.size()) + " differ");
  }
  if (x.size() == 0) return 0.0;
  return (x - y).cwiseAbs().maxCoeff();
}

double d_max(const StateVector& x, const StateVector& y) {
  return d_max(x.values(), y.values());
}

NetworkMap::NetworkMap(Index dimension, Evaluator evaluator, std::string label)
    : dimension_(dimension), evaluator_(std::move(evaluator)), label_(std::move(label)) {
  if (dimension_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "network map dimension must be >= 1");
  }
  if (!evaluator_) {
    throw Error(ErrorCode::InvalidArgument, "network map needs an evaluator");
  }
}

StateVector NetworkMap::evaluate(const StateVector& x) const {
  if (x.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                "map '" + label_ + "' has dimension " + std::to_string(dimension_) +
                    ", got state of length " + std::to_string(x.size()));
  }
  Vector y = evaluator_(x.values());
  if (y.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                "map '" + label_ + "' returned a vector of length " +
                    std::to_string(y.size()));
  }
  if (!all_finite(y)) {
    throw Error(ErrorCode::NonFiniteOutput, "map '" + label_ + "' produced NaN/Inf");
  }
  return StateVector(std::move(y));
}

StateVector evaluate(const NetworkMap& map, const StateVector& x) {
  return map.evaluate(x);
}

namespace {

Orbit run_orbit(const std::function<const NetworkMap&(std::size_t)>& map_at,
                const StateVector& x0, std::size_t steps, const OrbitOptions& options) {
  if (steps < 1) {
    throw Error(ErrorCode::InvalidArgument, "iterate_orbit: steps must be >= 1");
  }
  Orbit orbit;
  orbit.states.reserve(steps + 1);
  orbit.states.push_back(x0);
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      orbit.states.push_back(map_at(k).evaluate(orbit.states.back()));
    } catch (const EvaluationError&) {
      throw;
    } catch (const Error& e) {
      throw EvaluationError(e.code(), e.what(), k);
    }
    if (orbit.states.back().max_abs() > options.magnitude_bound) {
      orbit.exceeded_bound = true;
      orbit.exceeded_at = k;
      break;
    }
  }
  return orbit;
}

}  // namespace

Orbit iterate_orbit(const NetworkMap& map, const StateVector& x0, std::size_t steps,
                    const OrbitOptions& options) {
  if (x0.size() != map.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "iterate_orbit: x0 has wrong length");
  }
  return run_orbit([&](std::size_t) -> const NetworkMap& { return map; }, x0, steps,
                   options);
}

Orbit iterate_switched_orbit(const std::vector<NetworkMap>& maps,
                             const std::function<std::size_t(std::size_t)>& select,
                             const StateVector& x0, std::size_t steps,
                             const OrbitOptions& options) {
  if (maps.empty()) {
    throw Error(ErrorCode::InvalidArgument, "switched orbit needs at least one map");
  }
  return run_orbit(
      [&](std::size_t k) -> const NetworkMap& {
        const std::size_t idx = select(k);
        if (idx >= maps.size()) {
          throw Error(ErrorCode::ScheduleError,
                      "switch selector returned index " + std::to_string(idx));
        }
        return maps[idx];
      },
      x0, steps, options);
}

}  // namespace istab
