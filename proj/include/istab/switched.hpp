#pragma once

// Switched networks under time-varying delays: schedules, simulation of
// instances, empirical contraction, and RI-closure certification.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "istab/core.hpp"
#include "istab/delay.hpp"
#include "istab/lipschitz.hpp"
#include "istab/spectral.hpp"

namespace istab {

struct VerifyOptions {
  std::size_t samples = 1000;
  double half_width = 10.0;
  std::uint64_t seed = 0;
};

/// A finite set of maps on R^n with one Lipschitz matrix per map.
class SwitchedSet {
 public:
  SwitchedSet(std::vector<NetworkMap> maps, MatrixSet lipschitz);

  /// Also runs verify_lipschitz on each (map, matrix) pair over the box
  /// [-half_width, half_width]^n; throws InvalidArgument on a violation.
  static SwitchedSet verified(std::vector<NetworkMap> maps, MatrixSet lipschitz,
                              const VerifyOptions& options = {});
  static SwitchedSet singleton(NetworkMap map, const LipschitzMatrix& A);

  std::size_t size() const noexcept { return maps_.size(); }
  Index dimension() const noexcept { return maps_.front().dimension(); }
  const std::vector<NetworkMap>& maps() const noexcept { return maps_; }
  const NetworkMap& map(std::size_t i) const { return maps_.at(i); }
  const MatrixSet& lipschitz_set() const noexcept { return lipschitz_; }

 private:
  std::vector<NetworkMap> maps_;
  MatrixSet lipschitz_;
};

/// Deterministic per-step seed: random schedules draw step k from an RNG
/// seeded with step_seed(seed, k), so at(k) never depends on earlier calls.
std::uint64_t step_seed(std::uint64_t seed, std::size_t k);

enum class DelayScheduleKind { Constant, Periodic, Stochastic, Explicit };

const char* to_string(DelayScheduleKind k);

/// k -> D^(k) for k >= 1. Every emitted distribution shares the bound L.
class DelaySchedule {
 public:
  using Rule = std::function<IntMatrix(std::size_t)>;

  static DelaySchedule constant(const DelayDistribution& D);
  /// Arbitrary periodic rule; `rule(k)` must have period `period`.
  static DelaySchedule periodic(Index n, int bound, Rule rule, std::size_t period,
                                std::string description);
  /// d_ij(k) = k mod m_ij, bound max(m) - 1, period lcm(m).
  static DelaySchedule periodic_modulo(const IntMatrix& moduli);
  /// Entries i.i.d. uniform on {low, ..., high}; reproducible from `seed`.
  /// at(k) depends only on (seed, k).
  static DelaySchedule stochastic_uniform(Index n, int low, int high, std::uint64_t seed);
  /// Cycles through `sequence` (D^(1) = sequence[0]).
  static DelaySchedule explicit_sequence(std::vector<DelayDistribution> sequence);
  /// General rule with a declared bound (used by the lifted linear builders).
  static DelaySchedule from_rule(Index n, int bound, Rule rule, std::string description);

  DelayDistribution at(std::size_t k) const;

  DelayScheduleKind kind() const noexcept { return kind_; }
  int bound() const noexcept { return bound_; }
  Index dimension() const noexcept { return n_; }
  const std::string& description() const noexcept { return description_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  std::optional<std::size_t> period() const noexcept { return period_; }

 private:
  DelaySchedule(DelayScheduleKind kind, Index n, int bound, Rule rule, std::string description)
      : kind_(kind), n_(n), bound_(bound), rule_(std::move(rule)),
        description_(std::move(description)) {}

  DelayScheduleKind kind_;
  Index n_;
  int bound_;
  Rule rule_;
  std::string description_;
  std::optional<std::uint64_t> seed_;
  std::optional<std::size_t> period_;
};

/// k -> index of the map applied at step k (k >= 1).
struct SwitchSchedule {
  std::function<std::size_t(std::size_t)> selector;
  std::string description;

  static SwitchSchedule constant(std::size_t index);
  /// `block` consecutive steps of map 0, then of map 1, ..., cycling through
  /// `count` maps. block = 1 alternates.
  static SwitchSchedule cyclic(std::size_t count, std::size_t block = 1);
  static SwitchSchedule random(std::size_t count, std::uint64_t seed);
  static SwitchSchedule explicit_sequence(std::vector<std::size_t> sequence);
};

struct SimulationOptions {
  double magnitude_bound = kDefaultDivergenceBound;
  /// When set, gaps[k] = d_max(state_k, E_L(reference)).
  std::optional<StateVector> reference;
  bool keep_states = true;
};

struct Trajectory {
  std::vector<LiftedState> states;
  std::vector<double> gaps;
  bool diverged = false;
  std::size_t diverged_at = 0;
  std::size_t steps_taken = 0;
  std::optional<std::uint64_t> seed;

  const LiftedState& terminal() const { return states.back(); }
};

/// states[k+1] = F_{D^(k+1)} applied to states[k] with F = maps[switch(k+1)].
/// Halts and flags divergence once a coordinate exceeds the magnitude bound.
Trajectory simulate_instance(const SwitchedSet& set, const SwitchSchedule& switching,
                             const DelaySchedule& delays, const LiftedState& x0,
                             std::size_t steps, const SimulationOptions& options = {});

struct ContractionEstimate {
  /// g_k = d_max(state_k(x0), state_k(y0)), k = 0..steps (shorter on divergence).
  std::vector<double> gaps;
  /// exp of the least-squares slope of log g_k over the fit window.
  std::optional<double> rate;
  std::size_t fit_begin = 0;
  std::size_t fit_end = 0;
  bool diverged = false;
  std::size_t diverged_at = 0;
};

/// Gaps below this fraction of max(1, g_0) are treated as merged orbits.
inline constexpr double kGapFloor = 1e-12;

/// Fits the log-slope over the tail half of the prefix of `gaps` that stays
/// above the noise floor.
ContractionEstimate fit_contraction(std::vector<double> gaps);

ContractionEstimate contraction_estimate(const SwitchedSet& set, const SwitchSchedule& switching,
                                         const DelaySchedule& delays, const LiftedState& x0,
                                         const LiftedState& y0, std::size_t steps,
                                         const SimulationOptions& options = {});

struct SharedFixedPointReport {
  bool shared = true;
  /// d_max(F(x*), x*) per map.
  std::vector<double> residuals;
};

SharedFixedPointReport shared_fixed_point_check(const SwitchedSet& set, const StateVector& x_star,
                                                double tol);

struct CertifyOptions {
  double tol = 1e-8;
  PowerOptions power{};
  std::size_t closure_cap = kDefaultClosureCap;
};

/// Bound max_{A in RI(S)} rho(A_L) on the joint spectral radius of every
/// delayed instance with delays <= L. Verdict classifies that bound; rho holds
/// max_{A in RI(S)} rho(A).
StabilityCertificate certify_switched(const MatrixSet& lipschitz_set, int L,
                                      const CertifyOptions& options = {});
StabilityCertificate certify_switched(const SwitchedSet& set, int L,
                                      const CertifyOptions& options = {});

}  // namespace istab
