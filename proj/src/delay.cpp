#include "istab/delay.hpp"

#include <utility>
#include <vector>

namespace istab {

DelayDistribution::DelayDistribution(IntMatrix entries, int bound)
    : entries_(std::move(entries)), bound_(bound) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorCode::NonSquareMatrix, "delay distribution must be square and nonempty");
  }
  if (bound_ < 0) {
    throw Error(ErrorCode::NegativeDelay, "delay bound must be >= 0");
  }
  for (Index i = 0; i < entries_.rows(); ++i) {
    for (Index j = 0; j < entries_.cols(); ++j) {
      const int d = entries_(i, j);
      if (d < 0) {
        throw Error(ErrorCode::NegativeDelay, "delay d_" + std::to_string(i + 1) +
                                                  std::to_string(j + 1) + " is negative");
      }
      if (d > bound_) {
        throw Error(ErrorCode::DelayExceedsBound,
                    "delay d_" + std::to_string(i + 1) + std::to_string(j + 1) + " = " +
                        std::to_string(d) + " exceeds bound L = " + std::to_string(bound_));
      }
    }
  }
}

DelayDistribution DelayDistribution::zero(Index n, int bound) {
  return DelayDistribution(IntMatrix::Zero(n, n), bound);
}

DelayDistribution DelayDistribution::uniform(Index n, int delay, int bound) {
  return DelayDistribution(IntMatrix::Constant(n, n, delay), bound);
}

bool DelayDistribution::dominated_by(const DelayDistribution& other) const {
  if (other.dimension() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "delay distributions differ in dimension");
  }
  return (entries_.array() <= other.entries_.array()).all();
}

DelayDistribution validate_delay_distribution(const IntMatrix& D, int L) {
  return DelayDistribution(D, L);
}

LiftedState::LiftedState(Vector values, Index n, int bound)
    : values_(std::move(values)), n_(n), bound_(bound) {
  if (n_ < 1 || bound_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "lifted state needs n >= 1 and L >= 0");
  }
  if (values_.size() != n_ * (bound_ + 1)) {
    throw Error(ErrorCode::DimensionMismatch,
                "lifted state length " + std::to_string(values_.size()) + " != n(L+1) = " +
                    std::to_string(n_ * (bound_ + 1)));
  }
  if (!all_finite(values_)) {
    throw Error(ErrorCode::NonFiniteInput, "lifted state has non-finite entries");
  }
}

LiftedState extend_point(const StateVector& x, int L) {
  if (L < 0) throw Error(ErrorCode::InvalidArgument, "extend_point: L must be >= 0");
  return LiftedState(x.values().replicate(L + 1, 1), x.size(), L);
}

void apply_delayed(const NetworkMap& F, const DelayDistribution& D, const Vector& lifted,
                   Vector& out) {
  const Index n = F.dimension();
  const int L = D.bound();
  out.resize(lifted.size());

  // Rows with identical delay patterns share one evaluation of F.
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  Vector input(n);
  for (Index i = 0; i < n; ++i) {
    if (done[static_cast<std::size_t>(i)]) continue;
    for (Index j = 0; j < n; ++j) input[j] = lifted[static_cast<Index>(D(i, j)) * n + j];
    const Vector y = F.apply(input);
    for (Index r = i; r < n; ++r) {
      if (done[static_cast<std::size_t>(r)]) continue;
      if (r == i || D.entries().row(r) == D.entries().row(i)) {
        out[r] = y[r];
        done[static_cast<std::size_t>(r)] = true;
      }
    }
  }
  if (L > 0) {
    out.segment(n, static_cast<Index>(L) * n) = lifted.segment(0, static_cast<Index>(L) * n);
  }
}

DelayedMap::DelayedMap(NetworkMap base, DelayDistribution delays)
    : base_(std::move(base)), delays_(std::move(delays)) {
  if (base_.dimension() != delays_.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "map dimension " + std::to_string(base_.dimension()) +
                    " != delay distribution dimension " +
                    std::to_string(delays_.dimension()));
  }
}

LiftedState DelayedMap::evaluate(const LiftedState& x) const {
  if (x.n() != base_.dimension() || x.bound() != delays_.bound()) {
    throw Error(ErrorCode::DimensionMismatch, "lifted state does not match the delayed map");
  }
  Vector out;
  apply_delayed(base_, delays_, x.values(), out);
  if (!all_finite(out)) {
    throw Error(ErrorCode::NonFiniteOutput, "delayed map produced NaN/Inf");
  }
  return LiftedState(std::move(out), x.n(), x.bound());
}

NetworkMap DelayedMap::as_network_map() const {
  auto base = base_;
  auto delays = delays_;
  return NetworkMap(
      dimension(),
      [base, delays](const Vector& x) {
        Vector out;
        apply_delayed(base, delays, x, out);
        return out;
      },
      base_.label() + "_D");
}

DelayedMap lift_map(const NetworkMap& F, const DelayDistribution& D) { return DelayedMap(F, D); }

LipschitzMatrix lift_lipschitz(const LipschitzMatrix& A, const DelayDistribution& D) {
  const Index n = A.dimension();
  if (D.dimension() != n) {
    throw Error(ErrorCode::DimensionMismatch, "lift_lipschitz: dimensions disagree");
  }
  const int L = D.bound();
  const Index size = n * (L + 1);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(A.nonzeros() + n * L));
  const SparseMatrix& entries = A.entries();
  for (Index i = 0; i < entries.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(entries, i); it; ++it) {
      const Index j = it.col();
      triplets.emplace_back(i, static_cast<Index>(D(i, j)) * n + j, it.value());
    }
  }
  for (Index r = n; r < size; ++r) triplets.emplace_back(r, r - n, 1.0);
  SparseMatrix lifted(size, size);
  lifted.setFromTriplets(triplets.begin(), triplets.end());
  return LipschitzMatrix(std::move(lifted), A.provenance(), A.sampling());
}

LipschitzMatrix max_delay_lipschitz(const LipschitzMatrix& A, int L) {
  if (L < 0) throw Error(ErrorCode::InvalidArgument, "max_delay_lipschitz: L must be >= 0");
  return lift_lipschitz(A, DelayDistribution::uniform(A.dimension(), L, L));
}

}  // namespace istab
