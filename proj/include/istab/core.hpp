#pragma once

// State vectors, network maps and orbits on X = R^n with the max metric.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "istab/errors.hpp"

namespace istab {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Default magnitude above which an orbit is declared divergent.
inline constexpr double kDefaultDivergenceBound = 1e12;

bool all_finite(const Vector& v);

/// A point of R^n. Entries are finite by construction.
class StateVector {
 public:
  explicit StateVector(Vector values);
  StateVector(std::initializer_list<double> values);

  Index size() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  const Vector& values() const noexcept { return values_; }

  /// Largest absolute coordinate.
  double max_abs() const;

  friend bool operator==(const StateVector& a, const StateVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Vector values_;
};

/// d_max(x, y) = max_i |x_i - y_i|.
double d_max(const StateVector& x, const StateVector& y);
double d_max(const Vector& x, const Vector& y);

/// A deterministic map F : R^n -> R^n.
class NetworkMap {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  NetworkMap(Index dimension, Evaluator evaluator, std::string label = {});

  Index dimension() const noexcept { return dimension_; }
  const std::string& label() const noexcept { return label_; }

  /// Checked evaluation: input and output dimensions and finiteness.
  StateVector evaluate(const StateVector& x) const;
  StateVector operator()(const StateVector& x) const { return evaluate(x); }

  /// Raw evaluation without validation, for inner loops that have already
  /// checked their inputs.
  Vector apply(const Vector& x) const { return evaluator_(x); }

 private:
  Index dimension_;
  Evaluator evaluator_;
  std::string label_;
};

StateVector evaluate(const NetworkMap& map, const StateVector& x);

struct Orbit {
  std::vector<StateVector> states;
  bool exceeded_bound = false;
  /// Step at which |x_i| first exceeded the bound (valid if exceeded_bound).
  std::size_t exceeded_at = 0;

  const StateVector& terminal() const { return states.back(); }
};

struct OrbitOptions {
  double magnitude_bound = kDefaultDivergenceBound;
};

/// x^0, F(x^0), ..., F^steps(x^0). Stops early (flagging the orbit) once a
/// coordinate exceeds options.magnitude_bound.
Orbit iterate_orbit(const NetworkMap& map, const StateVector& x0,
                    std::size_t steps, const OrbitOptions& options = {});

/// Switched orbit: state k+1 = maps[select(k+1)](state k).
Orbit iterate_switched_orbit(const std::vector<NetworkMap>& maps,
                             const std::function<std::size_t(std::size_t)>& select,
                             const StateVector& x0, std::size_t steps,
                             const OrbitOptions& options = {});

}  // namespace istab
