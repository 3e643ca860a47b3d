#include "istab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numeric>

namespace istab {

namespace {

void require_nonnegative_square(const SparseMatrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw Error(ErrorCode::NonSquareMatrix, "spectral radius needs a nonempty square matrix");
  }
  for (Index r = 0; r < A.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
        throw Error(ErrorCode::NegativeEntry,
                    "power iteration needs a finite nonnegative matrix");
      }
    }
  }
}

double row_sum_norm(const SparseMatrix& A) {
  double best = 0.0;
  for (Index r = 0; r < A.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) s += it.value();
    best = std::max(best, s);
  }
  return best;
}

// Nonnegative nilpotent matrices are structurally strictly triangular, so
// A^n 1 is exactly zero. Only probed for small n, where it is cheap.
bool is_nilpotent_small(const SparseMatrix& A) {
  const Index n = A.rows();
  if (n > 64) return false;
  Vector v = Vector::Ones(n);
  for (Index k = 0; k < n; ++k) {
    v = A * v;
    const double m = v.maxCoeff();
    if (m == 0.0) return true;
    v /= m;
  }
  return false;
}

// Strongly connected components of the graph i -> j for a_ij > 0
// (iterative Tarjan; lifted matrices have very long chains). Returns the
// component id of every node.
std::vector<Index> strong_components(const SparseMatrix& A, Index& count) {
  const Index n = A.rows();
  constexpr Index unvisited = -1;
  std::vector<Index> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<Index> stack;
  std::vector<std::pair<Index, SparseMatrix::InnerIterator>> frames;
  Index next = 0;
  count = 0;
  for (Index root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(root, SparseMatrix::InnerIterator(A, root));
    index[root] = low[root] = next++;
    stack.push_back(root);
    while (!frames.empty()) {
      auto& [v, it] = frames.back();
      if (it) {
        const Index w = it.col();
        const bool edge = it.value() > 0.0;
        ++it;
        if (!edge) continue;
        if (index[w] == unvisited) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          frames.emplace_back(w, SparseMatrix::InnerIterator(A, w));
        } else if (comp[w] == unvisited) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const Index done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const Index parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        Index w;
        do {
          w = stack.back();
          stack.pop_back();
          comp[w] = count;
        } while (w != done);
        ++count;
      }
    }
  }
  return comp;
}

// Power iteration on a matrix whose graph is strongly connected: the Perron
// vector is positive, so the Collatz-Wielandt bracket closes.
PowerResult power_iteration_irreducible(const SparseMatrix& A, const PowerOptions& options) {
  const Index n = A.rows();
  const double norm = row_sum_norm(A);
  if (norm == 0.0 || is_nilpotent_small(A)) {
    return PowerResult{0.0, 0, 0.0, 0.0, true};
  }

  const double shift = 0.5 * norm;
  Vector v = Vector::Ones(n);
  Vector w(n);
  std::deque<double> deltas;
  double prev_mu = std::numeric_limits<double>::quiet_NaN();
  double prev_prev_mu = prev_mu;

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    w.noalias() = A * v;
    w += shift * v;
    const double mu = w.maxCoeff();  // w > 0, ||v||_inf == 1

    // Collatz-Wielandt bracket; v stays positive because B has a positive
    // diagonal, but entries of decoupled components may underflow.
    const bool bracket_defined = v.minCoeff() > 1e-250;
    if (bracket_defined) {
      const Vector ratio = w.cwiseQuotient(v);
      const double lo = ratio.minCoeff();
      const double hi = ratio.maxCoeff();
      const double threshold = options.tol * std::max(1.0, hi - shift);
      if (hi - lo <= threshold) {
        const double rho = std::max(0.0, 0.5 * (lo + hi) - shift);
        return PowerResult{rho, it, std::max(0.0, lo - shift), hi - shift, true};
      }
    }

    if (std::isfinite(prev_mu)) {
      deltas.push_back(std::abs(mu - prev_mu));
      if (deltas.size() > options.window) deltas.pop_front();
    }
    // The ratio window is only a fallback: on lifted matrices the all-ones
    // start keeps ||Bv|| exactly constant for about L steps, which would fool it.
    if (!bracket_defined && deltas.size() == options.window) {
      const double threshold = options.tol * std::max(1.0, mu - shift);
      const double worst = *std::max_element(deltas.begin(), deltas.end());
      if (worst <= threshold) {
        double q = 0.0;
        for (std::size_t i = 1; i < deltas.size(); ++i) {
          if (deltas[i - 1] > 0.0) q = std::max(q, deltas[i] / deltas[i - 1]);
        }
        q = std::min(q, 0.999);
        const double tail = deltas.back() * q / (1.0 - q);
        if (tail <= threshold) {
          const double rho = std::max(0.0, mu - shift);
          return PowerResult{rho, it, rho, rho, false};
        }
      }
    }

    prev_prev_mu = prev_mu;
    prev_mu = mu;
    v = w / mu;
  }
  throw NoConvergenceError(options.max_iter, prev_prev_mu - shift, prev_mu - shift);
}

}  // namespace

PowerResult power_iteration(const SparseMatrix& A, const PowerOptions& options) {
  require_nonnegative_square(A);
  if (!(options.tol > 0.0) || options.max_iter == 0 || options.window == 0) {
    throw Error(ErrorCode::InvalidArgument, "power iteration: bad options");
  }
  // rho(A) is the largest Perron root over the irreducible diagonal blocks of
  // the Frobenius normal form; iterating the blocks separately keeps the
  // bracket valid for reducible matrices (zero rows, triangular coupling).
  Index count = 0;
  const std::vector<Index> comp = strong_components(A, count);
  if (count == 1) return power_iteration_irreducible(A, options);

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(count));
  for (Index i = 0; i < A.rows(); ++i) members[static_cast<std::size_t>(comp[i])].push_back(i);
  std::vector<Index> local(static_cast<std::size_t>(A.rows()));
  PowerResult best{0.0, 0, 0.0, 0.0, true};
  for (const auto& nodes : members) {
    for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<Index>(k);
    std::vector<Eigen::Triplet<double>> triplets;
    for (const Index i : nodes) {
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
        if (it.value() > 0.0 && comp[it.col()] == comp[i]) {
          triplets.emplace_back(local[i], local[it.col()], it.value());
        }
      }
    }
    if (triplets.empty()) continue;  // single node without a self-loop
    const Index m = static_cast<Index>(nodes.size());
    SparseMatrix block(m, m);
    block.setFromTriplets(triplets.begin(), triplets.end());
    const PowerResult r = power_iteration_irreducible(block, options);
    best.iterations += r.iterations;
    best.bracketed = best.bracketed && r.bracketed;
    best.lower = std::max(best.lower, r.lower);
    best.upper = std::max(best.upper, r.upper);
    best.rho = std::max(best.rho, r.rho);
  }
  return best;
}

PowerResult power_iteration(const Matrix& A, const PowerOptions& options) {
  return power_iteration(SparseMatrix(A.sparseView()), options);
}

double spectral_radius_power(const SparseMatrix& A, const PowerOptions& options) {
  return power_iteration(A, options).rho;
}

double spectral_radius_power(const Matrix& A, const PowerOptions& options) {
  return power_iteration(A, options).rho;
}

double spectral_radius_power(const LipschitzMatrix& A, const PowerOptions& options) {
  return power_iteration(A.entries(), options).rho;
}

// ---------------------------------------------------------------------------
// Exact oracle

namespace {

using Poly = std::vector<double>;  // lowest degree first

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

void poly_add(Poly& acc, const Poly& term, double sign) {
  if (acc.size() < term.size()) acc.resize(term.size(), 0.0);
  for (std::size_t i = 0; i < term.size(); ++i) acc[i] += sign * term[i];
}

// Entry (r, c) of lambda I - A as a polynomial in lambda.
Poly entry(const Matrix& A, Index r, Index c) {
  if (r == c) return Poly{-A(r, c), 1.0};
  return Poly{-A(r, c)};
}

// Laplace expansion along the first of `rows`, over the columns in `cols`.
Poly cofactor_det(const Matrix& A, const std::vector<Index>& rows,
                  const std::vector<Index>& cols) {
  if (rows.size() == 1) return entry(A, rows[0], cols[0]);
  const std::vector<Index> sub_rows(rows.begin() + 1, rows.end());
  Poly det{0.0};
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const Poly e = entry(A, rows[0], cols[k]);
    if (std::all_of(e.begin(), e.end(), [](double c) { return c == 0.0; })) continue;
    std::vector<Index> sub_cols;
    sub_cols.reserve(cols.size() - 1);
    for (std::size_t m = 0; m < cols.size(); ++m) {
      if (m != k) sub_cols.push_back(cols[m]);
    }
    poly_add(det, poly_mul(e, cofactor_det(A, sub_rows, sub_cols)), k % 2 == 0 ? 1.0 : -1.0);
  }
  return det;
}

std::complex<double> horner(const Poly& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

std::vector<double> characteristic_polynomial(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw Error(ErrorCode::NonSquareMatrix, "characteristic_polynomial: matrix must be square");
  }
  if (A.rows() > 6) {
    throw Error(ErrorCode::DimensionTooLarge, "exact spectral radius supports n <= 6");
  }
  std::vector<Index> idx(static_cast<std::size_t>(A.rows()));
  std::iota(idx.begin(), idx.end(), Index{0});
  Poly p = cofactor_det(A, idx, idx);
  p.resize(static_cast<std::size_t>(A.rows()) + 1, 0.0);
  return p;
}

double spectral_radius_exact(const Matrix& A) {
  const Poly p = characteristic_polynomial(A);  // monic, degree n
  const std::size_t n = p.size() - 1;
  if (n == 1) return std::abs(p[0]);

  double bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(p[i]));
  const double radius = 1.0 + bound;

  std::vector<std::complex<double>> z(n);
  const std::complex<double> seed(0.4, 0.9);
  for (std::size_t k = 0; k < n; ++k) z[k] = radius * std::pow(seed / std::abs(seed), static_cast<double>(k) + 0.25);

  // Durand-Kerner (Weierstrass) simultaneous iteration.
  for (int iter = 0; iter < 5000; ++iter) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> denom = 1.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m != k) denom *= (z[k] - z[m]);
      }
      if (std::abs(denom) == 0.0) denom = 1e-300;
      const std::complex<double> step = horner(p, z[k]) / denom;
      z[k] -= step;
      change = std::max(change, std::abs(step) / (1.0 + std::abs(z[k])));
    }
    if (change < 1e-15) break;
  }

  // Newton polish on simple roots.
  Poly dp(n);
  for (std::size_t i = 1; i <= n; ++i) dp[i - 1] = static_cast<double>(i) * p[i];
  for (auto& root : z) {
    for (int iter = 0; iter < 8; ++iter) {
      const std::complex<double> d = horner(dp, root);
      if (std::abs(d) < 1e-8) break;
      const std::complex<double> step = horner(p, root) / d;
      root -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(root))) break;
    }
  }

  double rho = 0.0;
  for (const auto& root : z) rho = std::max(rho, std::abs(root));
  return rho;
}

// ---------------------------------------------------------------------------
// Certificates

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Marginal: return "marginal";
    case Verdict::NotIntrinsicallyStable: return "not-intrinsically-stable";
  }
  return "unknown";
}

Verdict classify(double rho, double tol) {
  if (rho < 1.0 - tol) return Verdict::Stable;
  if (rho > 1.0 + tol) return Verdict::NotIntrinsicallyStable;
  return Verdict::Marginal;
}

StabilityCertificate is_intrinsically_stable(const LipschitzMatrix& A, double tol,
                                             const PowerOptions& power) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  StabilityCertificate cert;
  cert.rho = spectral_radius_power(A, power);
  cert.verdict = classify(cert.rho, tol);
  cert.provenance = A.provenance();
  cert.heuristic = A.heuristic();
  cert.tol = tol;
  cert.power_tol = power.tol;
  return cert;
}

}  // namespace istab
