#pragma once

// Delay-space lifting. A state of X_L is stored block-wise as
// (x_{1,0},...,x_{n,0}, x_{1,1},...,x_{n,1}, ..., x_{n,L}); block l holds the
// state l steps in the past.

#include <Eigen/Core>

#include "istab/core.hpp"
#include "istab/lipschitz.hpp"

namespace istab {

using IntMatrix = Eigen::MatrixXi;

/// n x n matrix of integer delays d_ij in [0, L]; d_ij delays the influence of
/// element j on element i.
class DelayDistribution {
 public:
  DelayDistribution(IntMatrix entries, int bound);

  static DelayDistribution zero(Index n, int bound = 0);
  static DelayDistribution uniform(Index n, int delay, int bound);

  Index dimension() const noexcept { return entries_.rows(); }
  int bound() const noexcept { return bound_; }
  int operator()(Index i, Index j) const { return entries_(i, j); }
  const IntMatrix& entries() const noexcept { return entries_; }

  /// Entrywise D <= other.
  bool dominated_by(const DelayDistribution& other) const;

  friend bool operator==(const DelayDistribution& a, const DelayDistribution& b) {
    return a.bound_ == b.bound_ && a.entries_.rows() == b.entries_.rows() &&
           a.entries_ == b.entries_;
  }

 private:
  IntMatrix entries_;
  int bound_;
};

/// Accepts D iff every entry lies in [0, L].
DelayDistribution validate_delay_distribution(const IntMatrix& D, int L);

class LiftedState {
 public:
  LiftedState(Vector values, Index n, int bound);

  Index n() const noexcept { return n_; }
  int bound() const noexcept { return bound_; }
  Index size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }

  /// x_{., l}: the state l steps back.
  Vector block(int l) const { return values_.segment(static_cast<Index>(l) * n_, n_); }
  double at(Index i, int l) const { return values_[static_cast<Index>(l) * n_ + i]; }

  StateVector current() const { return StateVector(block(0)); }
  StateVector as_state() const { return StateVector(values_); }

  friend bool operator==(const LiftedState& a, const LiftedState& b) {
    return a.n_ == b.n_ && a.bound_ == b.bound_ && a.values_ == b.values_;
  }

 private:
  Vector values_;
  Index n_;
  int bound_;
};

/// E_L(x): L+1 stacked copies of x.
LiftedState extend_point(const StateVector& x, int L);

/// Writes F_D(lifted) into `out` (resized as needed) without validation.
/// Block 0 row i is F_i evaluated at (x_{1,d_i1}, ..., x_{n,d_in}); block l+1
/// is block l of the input.
void apply_delayed(const NetworkMap& F, const DelayDistribution& D, const Vector& lifted,
                   Vector& out);

/// The delayed version (F_D, X_L) of a network map.
class DelayedMap {
 public:
  DelayedMap(NetworkMap base, DelayDistribution delays);

  Index dimension() const noexcept { return base_.dimension() * (delays_.bound() + 1); }
  const NetworkMap& base() const noexcept { return base_; }
  const DelayDistribution& delays() const noexcept { return delays_; }

  LiftedState evaluate(const LiftedState& x) const;
  LiftedState operator()(const LiftedState& x) const { return evaluate(x); }

  /// F_D as an ordinary map on R^{n(L+1)}.
  NetworkMap as_network_map() const;

 private:
  NetworkMap base_;
  DelayDistribution delays_;
};

DelayedMap lift_map(const NetworkMap& F, const DelayDistribution& D);

/// A_D: block row 0 is [A_0 ... A_L] with (A_l)_ij = a_ij [d_ij == l],
/// identity blocks on the block subdiagonal, zeros elsewhere. Stored sparsely
/// with nnz(A) + nL entries.
LipschitzMatrix lift_lipschitz(const LipschitzMatrix& A, const DelayDistribution& D);

/// A_L: A in the top-right block, identity of size nL below; the lift of A
/// under the uniform maximal delay D = L.
LipschitzMatrix max_delay_lipschitz(const LipschitzMatrix& A, int L);

}  // namespace istab
