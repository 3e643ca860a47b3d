#pragma once

// Lipschitz matrices: entrywise bounds |F_i(x) - F_i(y)| <= sum_j a_ij |x_j - y_j|.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "istab/core.hpp"

namespace istab {

enum class Provenance { Analytic, Sampled, UserSupplied };

const char* to_string(Provenance p);

/// How a sampled matrix was produced. Sampled matrices are lower estimates of a
/// supremum and therefore heuristic.
struct SamplingRecord {
  std::size_t grid = 0;
  double fd_step = 0.0;
  double inflation = 1.0;
};

/// Nonnegative square matrix stored sparsely (row-major).
class LipschitzMatrix {
 public:
  LipschitzMatrix(SparseMatrix entries, Provenance provenance,
                  std::optional<SamplingRecord> sampling = std::nullopt);
  LipschitzMatrix(const Matrix& entries, Provenance provenance,
                  std::optional<SamplingRecord> sampling = std::nullopt);

  Index dimension() const noexcept { return entries_.rows(); }
  const SparseMatrix& entries() const noexcept { return entries_; }
  Matrix dense() const { return Matrix(entries_); }
  double operator()(Index i, Index j) const { return entries_.coeff(i, j); }
  Index nonzeros() const { return entries_.nonZeros(); }

  Provenance provenance() const noexcept { return provenance_; }
  const std::optional<SamplingRecord>& sampling() const noexcept { return sampling_; }
  bool heuristic() const noexcept { return provenance_ == Provenance::Sampled; }

  LipschitzMatrix scaled(double factor) const;

 private:
  SparseMatrix entries_;
  Provenance provenance_;
  std::optional<SamplingRecord> sampling_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

Box uniform_box(Index n, double lo, double hi);

/// a_ii = |1 - eps| + K |W_ii|, a_ij = K |W_ij|.
LipschitzMatrix lipschitz_cgn(const Matrix& W, double epsilon, double K);

/// Entrywise |M|, the Lipschitz matrix of x -> M x.
LipschitzMatrix lipschitz_linear(const Matrix& M);

struct SampledOptions {
  std::size_t grid = 101;
  double fd_step = 1e-5;
  double inflation = 1.05;
  std::size_t max_points = 5'000'000;
};

/// Estimates sup |dF_i/dx_j| by central differences on a regular grid over
/// `box`, then multiplies by `inflation`.
LipschitzMatrix lipschitz_sampled(const NetworkMap& map, const Box& box,
                                  const SampledOptions& options = {});

struct LipschitzReport {
  bool passed = true;
  std::size_t samples = 0;
  /// max over samples and components of lhs - rhs; > 0 means a violation.
  double worst_margin = -std::numeric_limits<double>::infinity();
  Index worst_component = 0;
  std::optional<Vector> witness_x;
  std::optional<Vector> witness_y;
};

/// Checks the defining inequality on `samples` random pairs drawn uniformly
/// from `box`. Violations are reported, not thrown.
LipschitzReport verify_lipschitz(const NetworkMap& map, const LipschitzMatrix& A,
                                 std::size_t samples, const Box& box,
                                 std::uint64_t seed);

}  // namespace istab
