#pragma once

// Spectral radius (power iteration and an exact small-n oracle), stability
// certificates, row-independence closure and joint-spectral-radius bounds.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "istab/core.hpp"
#include "istab/lipschitz.hpp"

namespace istab {

struct PowerOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100'000;
  /// Number of consecutive estimates that must agree before the ratio
  /// criterion accepts.
  std::size_t window = 10;
};

struct PowerResult {
  double rho = 0.0;
  std::size_t iterations = 0;
  /// Collatz-Wielandt bracket when it closed, else both equal rho.
  double lower = 0.0;
  double upper = 0.0;
  bool bracketed = false;
};

/// Power iteration for a nonnegative square matrix.
///
/// The matrix is split into strongly connected components; rho is the largest
/// Perron root over the irreducible diagonal blocks. Each block is iterated as
/// B = A + sI with s = ||A||_inf / 2 from the all-ones vector. The shift
/// leaves the Perron root unchanged (up to s) but breaks the periodicity of
/// imprimitive matrices such as the block-cyclic max-delay lift, where plain
/// power iteration oscillates forever.
///
/// Stops when the Collatz-Wielandt bounds min/max (Bv)_i / v_i agree to
/// tol * max(1, rho). If entries of v underflow so the bounds are undefined,
/// falls back to requiring ||Bv||_inf stable for `window` steps with a
/// geometric tail estimate below the same threshold. Throws
/// NoConvergenceError after max_iter iterations.
PowerResult power_iteration(const SparseMatrix& A, const PowerOptions& options = {});
PowerResult power_iteration(const Matrix& A, const PowerOptions& options = {});

double spectral_radius_power(const SparseMatrix& A, const PowerOptions& options = {});
double spectral_radius_power(const Matrix& A, const PowerOptions& options = {});
double spectral_radius_power(const LipschitzMatrix& A, const PowerOptions& options = {});

/// Coefficients c_0..c_n of det(lambda I - A), lowest degree first, by
/// cofactor expansion. n <= 6.
std::vector<double> characteristic_polynomial(const Matrix& A);

/// Max |root| of the characteristic polynomial (Durand-Kerner, Newton
/// polished). Independent of power_iteration; intended as a test oracle.
double spectral_radius_exact(const Matrix& A);

// ---------------------------------------------------------------------------
// Certificates

enum class Verdict { Stable, Marginal, NotIntrinsicallyStable };

const char* to_string(Verdict v);

/// rho < 1 - tol -> Stable, rho > 1 + tol -> NotIntrinsicallyStable,
/// otherwise Marginal.
Verdict classify(double rho, double tol);

struct StabilityCertificate {
  Verdict verdict = Verdict::Marginal;
  /// rho(A) of the undelayed Lipschitz matrix, or the RI-closure bound max
  /// rho(A) over RI(S) for switched sets.
  double rho = 0.0;
  /// rho(A_L) (max over RI(S) for switched sets): the exponential rate at
  /// which orbits of every delayed instance with delays <= L converge.
  std::optional<double> convergence_rate;
  std::optional<int> delay_bound;
  Provenance provenance = Provenance::Analytic;
  /// True when the matrix was sampled rather than derived.
  bool heuristic = false;
  std::optional<std::size_t> closure_size;
  double tol = 1e-8;
  double power_tol = 1e-10;
};

StabilityCertificate is_intrinsically_stable(const LipschitzMatrix& A, double tol = 1e-8,
                                             const PowerOptions& power = {});

// ---------------------------------------------------------------------------
// Matrix sets

/// Finite nonempty set of nonnegative n x n matrices (a Lipschitz set).
class MatrixSet {
 public:
  MatrixSet(std::vector<Matrix> members, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return members_.size(); }
  Index dimension() const noexcept { return members_.front().rows(); }
  const std::vector<Matrix>& members() const noexcept { return members_; }
  const Matrix& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Exact membership test (entrywise equality).
  bool contains(const Matrix& m) const;

 private:
  std::vector<Matrix> members_;
  std::vector<std::string> labels_;
};

inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

/// Number of distinct members of RI(S): product over rows of the number of
/// distinct i-th rows.
std::size_t ri_closure_size(const MatrixSet& S);

/// Visits every member of RI(S) without materializing the set. Throws
/// ClosureTooLarge before visiting anything if |RI(S)| > cap.
void for_each_ri_member(const MatrixSet& S,
                        const std::function<void(const Matrix&, const std::string&)>& visit,
                        std::size_t cap = kDefaultClosureCap);

/// All matrices whose i-th row is the i-th row of some member of S.
MatrixSet ri_closure(const MatrixSet& S, std::size_t cap = kDefaultClosureCap);

enum class JsrMethod { RiClosure, ProductBruteforce };

const char* to_string(JsrMethod m);

struct JsrBounds {
  double lower = 0.0;
  double upper = 0.0;
  JsrMethod method = JsrMethod::RiClosure;
  std::size_t depth = 0;
  std::size_t closure_size = 0;
};

/// upper = max over RI(S) of rho, lower = max over S of rho.
JsrBounds jsr_upper_bound_ri(const MatrixSet& S, const PowerOptions& power = {},
                             std::size_t cap = kDefaultClosureCap);

/// lower = max_{k<=depth, |P|=k} rho(P)^(1/k),
/// upper = min_{k<=depth} max_{|P|=k} ||P||_inf^(1/k).
JsrBounds jsr_bruteforce(const MatrixSet& S, std::size_t depth,
                         std::size_t cap = kDefaultClosureCap);

}  // namespace istab
