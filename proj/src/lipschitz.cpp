#include "istab/lipschitz.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace istab {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Sampled: return "sampled";
    case Provenance::UserSupplied: return "user-supplied";
  }
  return "unknown";
}

namespace {

void check_entries(const SparseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquareMatrix,
                "Lipschitz matrix must be square, got " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()));
  }
  if (m.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "Lipschitz matrix must be nonempty");
  }
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw Error(ErrorCode::NonFiniteInput, "Lipschitz matrix has non-finite entry");
      }
      if (it.value() < 0.0) {
        throw Error(ErrorCode::NegativeEntry,
                    "Lipschitz matrix entry (" + std::to_string(it.row()) + "," +
                        std::to_string(it.col()) + ") is negative");
      }
    }
  }
}

void require_square(const Matrix& M, const char* who) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw Error(ErrorCode::NonSquareMatrix,
                std::string(who) + ": matrix must be square and nonempty, got " +
                    std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

}  // namespace

LipschitzMatrix::LipschitzMatrix(SparseMatrix entries, Provenance provenance,
                                 std::optional<SamplingRecord> sampling)
    : entries_(std::move(entries)), provenance_(provenance), sampling_(sampling) {
  entries_.makeCompressed();
  check_entries(entries_);
}

LipschitzMatrix::LipschitzMatrix(const Matrix& entries, Provenance provenance,
                                 std::optional<SamplingRecord> sampling)
    : LipschitzMatrix(SparseMatrix(entries.sparseView()), provenance, sampling) {}

LipschitzMatrix LipschitzMatrix::scaled(double factor) const {
  if (!(factor >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be >= 0");
  }
  return LipschitzMatrix(SparseMatrix(entries_ * factor), provenance_, sampling_);
}

Box uniform_box(Index n, double lo, double hi) {
  return Box(static_cast<std::size_t>(n), Interval{lo, hi});
}

LipschitzMatrix lipschitz_cgn(const Matrix& W, double epsilon, double K) {
  require_square(W, "lipschitz_cgn");
  if (!(K >= 0.0) || !std::isfinite(K)) {
    throw Error(ErrorCode::InvalidArgument, "lipschitz_cgn: K must be finite and >= 0");
  }
  Matrix A = K * W.cwiseAbs();
  A.diagonal().array() += std::abs(1.0 - epsilon);
  return LipschitzMatrix(A, Provenance::Analytic);
}

LipschitzMatrix lipschitz_linear(const Matrix& M) {
  require_square(M, "lipschitz_linear");
  return LipschitzMatrix(Matrix(M.cwiseAbs()), Provenance::Analytic);
}

LipschitzMatrix lipschitz_sampled(const NetworkMap& map, const Box& box,
                                  const SampledOptions& options) {
  const Index n = map.dimension();
  if (static_cast<Index>(box.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "lipschitz_sampled: box has wrong dimension");
  }
  if (options.grid < 2) {
    throw Error(ErrorCode::InvalidArgument, "lipschitz_sampled: grid must be >= 2");
  }
  if (!(options.fd_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "lipschitz_sampled: fd_step must be > 0");
  }

  // Points per axis; a zero-width interval collapses to one point.
  std::vector<std::size_t> per_axis(static_cast<std::size_t>(n));
  double total = 1.0;
  for (Index j = 0; j < n; ++j) {
    const auto& iv = box[static_cast<std::size_t>(j)];
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw Error(ErrorCode::InvalidArgument, "lipschitz_sampled: box must be bounded");
    }
    per_axis[static_cast<std::size_t>(j)] = iv.hi > iv.lo ? options.grid : 1;
    total *= static_cast<double>(per_axis[static_cast<std::size_t>(j)]);
  }
  if (total > static_cast<double>(options.max_points)) {
    throw Error(ErrorCode::DimensionTooLarge,
                "lipschitz_sampled: grid has more than " +
                    std::to_string(options.max_points) + " points");
  }

  Matrix A = Matrix::Zero(n, n);
  std::vector<std::size_t> odometer(static_cast<std::size_t>(n), 0);
  Vector x(n);
  const double h = options.fd_step;
  for (;;) {
    for (Index j = 0; j < n; ++j) {
      const auto& iv = box[static_cast<std::size_t>(j)];
      const std::size_t m = per_axis[static_cast<std::size_t>(j)];
      x[j] = m == 1 ? iv.lo
                    : iv.lo + (iv.hi - iv.lo) * static_cast<double>(odometer[static_cast<std::size_t>(j)]) /
                                  static_cast<double>(m - 1);
    }
    for (Index j = 0; j < n; ++j) {
      Vector xp = x;
      Vector xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vector fp = map.apply(xp);
      const Vector fm = map.apply(xm);
      if (!all_finite(fp) || !all_finite(fm)) {
        throw Error(ErrorCode::NonFiniteOutput, "lipschitz_sampled: map produced NaN/Inf");
      }
      const Vector column = ((fp - fm) / (2.0 * h)).cwiseAbs();
      A.col(j) = A.col(j).cwiseMax(column);
    }
    Index axis = 0;
    while (axis < n) {
      auto& digit = odometer[static_cast<std::size_t>(axis)];
      if (++digit < per_axis[static_cast<std::size_t>(axis)]) break;
      digit = 0;
      ++axis;
    }
    if (axis == n) break;
  }

  A *= options.inflation;
  return LipschitzMatrix(A, Provenance::Sampled,
                         SamplingRecord{options.grid, options.fd_step, options.inflation});
}

LipschitzReport verify_lipschitz(const NetworkMap& map, const LipschitzMatrix& A,
                                 std::size_t samples, const Box& box, std::uint64_t seed) {
  const Index n = map.dimension();
  if (A.dimension() != n || static_cast<Index>(box.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "verify_lipschitz: dimensions disagree");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  axes.reserve(box.size());
  for (const auto& iv : box) axes.emplace_back(iv.lo, iv.hi);

  LipschitzReport report;
  report.samples = samples;
  Vector x(n);
  Vector y(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Index j = 0; j < n; ++j) {
      auto& dist = axes[static_cast<std::size_t>(j)];
      x[j] = dist(rng);
      y[j] = dist(rng);
    }
    const Vector lhs = (map.apply(x) - map.apply(y)).cwiseAbs();
    const Vector rhs = A.entries() * (x - y).cwiseAbs();
    for (Index i = 0; i < n; ++i) {
      const double margin = lhs[i] - rhs[i];
      if (margin > report.worst_margin) {
        report.worst_margin = margin;
        report.worst_component = i;
        report.witness_x = x;
        report.witness_y = y;
      }
      // Rounding slack proportional to the magnitudes involved.
      const double slack = 1e-12 * (1.0 + rhs[i] + lhs[i]);
      if (margin > slack) report.passed = false;
    }
  }
  return report;
}

}  // namespace istab
