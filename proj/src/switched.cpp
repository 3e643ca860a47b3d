#include "istab/switched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace istab {

SwitchedSet::SwitchedSet(std::vector<NetworkMap> maps, MatrixSet lipschitz)
    : maps_(std::move(maps)), lipschitz_(std::move(lipschitz)) {
  if (maps_.empty()) throw Error(ErrorCode::InvalidArgument, "switched set needs a map");
  if (maps_.size() != lipschitz_.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "switched set has " + std::to_string(maps_.size()) + " maps but " +
                    std::to_string(lipschitz_.size()) + " Lipschitz matrices");
  }
  const Index n = maps_.front().dimension();
  for (const auto& m : maps_) {
    if (m.dimension() != n) {
      throw Error(ErrorCode::DimensionMismatch, "switched maps must share a dimension");
    }
  }
  if (lipschitz_.dimension() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Lipschitz set dimension differs from the maps");
  }
}

SwitchedSet SwitchedSet::verified(std::vector<NetworkMap> maps, MatrixSet lipschitz,
                                  const VerifyOptions& options) {
  SwitchedSet set(std::move(maps), std::move(lipschitz));
  const Box box = uniform_box(set.dimension(), -options.half_width, options.half_width);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const LipschitzMatrix A(set.lipschitz_set()[i], Provenance::UserSupplied);
    const auto report =
        verify_lipschitz(set.map(i), A, options.samples, box, options.seed + i);
    if (!report.passed) {
      throw Error(ErrorCode::InvalidArgument,
                  "matrix " + set.lipschitz_set().labels()[i] + " is not a Lipschitz matrix of '" +
                      set.map(i).label() + "' (margin " + std::to_string(report.worst_margin) +
                      ")");
    }
  }
  return set;
}

SwitchedSet SwitchedSet::singleton(NetworkMap map, const LipschitzMatrix& A) {
  MatrixSet lipschitz({A.dense()}, {map.label().empty() ? "A" : map.label()});
  std::vector<NetworkMap> maps{std::move(map)};
  return SwitchedSet(std::move(maps), std::move(lipschitz));
}

// ---------------------------------------------------------------------------
// Delay schedules

const char* to_string(DelayScheduleKind k) {
  switch (k) {
    case DelayScheduleKind::Constant: return "constant";
    case DelayScheduleKind::Periodic: return "periodic";
    case DelayScheduleKind::Stochastic: return "stochastic";
    case DelayScheduleKind::Explicit: return "explicit";
  }
  return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t step_seed(std::uint64_t seed, std::size_t k) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k)));
}

DelaySchedule DelaySchedule::constant(const DelayDistribution& D) {
  IntMatrix entries = D.entries();
  DelaySchedule s(DelayScheduleKind::Constant, D.dimension(), D.bound(),
                  [entries](std::size_t) { return entries; }, "constant");
  s.period_ = 1;
  return s;
}

DelaySchedule DelaySchedule::periodic(Index n, int bound, Rule rule, std::size_t period,
                                      std::string description) {
  if (period == 0) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  DelaySchedule s(DelayScheduleKind::Periodic, n, bound, std::move(rule), std::move(description));
  s.period_ = period;
  return s;
}

DelaySchedule DelaySchedule::periodic_modulo(const IntMatrix& moduli) {
  if (moduli.rows() != moduli.cols() || moduli.rows() == 0) {
    throw Error(ErrorCode::NonSquareMatrix, "moduli must be square");
  }
  if ((moduli.array() < 1).any()) {
    throw Error(ErrorCode::InvalidArgument, "moduli must be >= 1");
  }
  std::size_t period = 1;
  for (Index i = 0; i < moduli.size(); ++i) {
    period = std::lcm(period, static_cast<std::size_t>(moduli.data()[i]));
  }
  const int bound = moduli.maxCoeff() - 1;
  return periodic(
      moduli.rows(), bound,
      [moduli](std::size_t k) {
        IntMatrix d(moduli.rows(), moduli.cols());
        for (Index i = 0; i < moduli.rows(); ++i) {
          for (Index j = 0; j < moduli.cols(); ++j) {
            d(i, j) = static_cast<int>(k % static_cast<std::size_t>(moduli(i, j)));
          }
        }
        return d;
      },
      period, "k mod m_ij");
}

DelaySchedule DelaySchedule::stochastic_uniform(Index n, int low, int high, std::uint64_t seed) {
  if (low < 0 || high < low) {
    throw Error(ErrorCode::InvalidArgument, "stochastic delays need 0 <= low <= high");
  }
  DelaySchedule s(
      DelayScheduleKind::Stochastic, n, high,
      [n, low, high, seed](std::size_t k) {
        std::mt19937_64 rng(step_seed(seed, k));
        std::uniform_int_distribution<int> dist(low, high);
        IntMatrix d(n, n);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < n; ++j) d(i, j) = dist(rng);
        }
        return d;
      },
      "uniform on {" + std::to_string(low) + ".." + std::to_string(high) + "}");
  s.seed_ = seed;
  return s;
}

DelaySchedule DelaySchedule::explicit_sequence(std::vector<DelayDistribution> sequence) {
  if (sequence.empty()) throw Error(ErrorCode::InvalidArgument, "empty delay sequence");
  const Index n = sequence.front().dimension();
  const int bound = sequence.front().bound();
  std::vector<IntMatrix> entries;
  for (const auto& d : sequence) {
    if (d.dimension() != n || d.bound() != bound) {
      throw Error(ErrorCode::DimensionMismatch,
                  "explicit delay sequence needs a common dimension and bound");
    }
    entries.push_back(d.entries());
  }
  DelaySchedule s(DelayScheduleKind::Explicit, n, bound,
                  [entries](std::size_t k) { return entries[(k - 1) % entries.size()]; },
                  "explicit sequence");
  s.period_ = entries.size();
  return s;
}

DelaySchedule DelaySchedule::from_rule(Index n, int bound, Rule rule, std::string description) {
  return DelaySchedule(DelayScheduleKind::Explicit, n, bound, std::move(rule),
                       std::move(description));
}

DelayDistribution DelaySchedule::at(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::ScheduleError, "delay schedules start at k = 1");
  IntMatrix d = rule_(k);
  if (d.rows() != n_ || d.cols() != n_) {
    throw Error(ErrorCode::ScheduleError, "delay schedule emitted a matrix of the wrong size");
  }
  return DelayDistribution(std::move(d), bound_);
}

// ---------------------------------------------------------------------------
// Switch schedules

SwitchSchedule SwitchSchedule::constant(std::size_t index) {
  return {[index](std::size_t) { return index; }, "constant " + std::to_string(index)};
}

SwitchSchedule SwitchSchedule::cyclic(std::size_t count, std::size_t block) {
  if (count == 0 || block == 0) {
    throw Error(ErrorCode::InvalidArgument, "cyclic switching needs count, block >= 1");
  }
  return {[count, block](std::size_t k) { return ((k - 1) / block) % count; },
          "cyclic, blocks of " + std::to_string(block)};
}

SwitchSchedule SwitchSchedule::random(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "random switching needs count >= 1");
  return {[count, seed](std::size_t k) {
            return static_cast<std::size_t>(step_seed(seed, k) % count);
          },
          "random, seed " + std::to_string(seed)};
}

SwitchSchedule SwitchSchedule::explicit_sequence(std::vector<std::size_t> sequence) {
  if (sequence.empty()) throw Error(ErrorCode::InvalidArgument, "empty switch sequence");
  return {[sequence](std::size_t k) { return sequence[(k - 1) % sequence.size()]; },
          "explicit sequence"};
}

// ---------------------------------------------------------------------------
// Simulation

Trajectory simulate_instance(const SwitchedSet& set, const SwitchSchedule& switching,
                             const DelaySchedule& delays, const LiftedState& x0,
                             std::size_t steps, const SimulationOptions& options) {
  const Index n = set.dimension();
  if (x0.n() != n || delays.dimension() != n) {
    throw Error(ErrorCode::DimensionMismatch, "simulate_instance: dimensions disagree");
  }
  if (x0.bound() != delays.bound()) {
    throw Error(ErrorCode::DimensionMismatch,
                "initial lifted state has L = " + std::to_string(x0.bound()) +
                    " but the delay schedule has L = " + std::to_string(delays.bound()));
  }
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (!switching.selector) throw Error(ErrorCode::ScheduleError, "missing switch selector");

  std::optional<Vector> reference;
  if (options.reference) {
    if (options.reference->size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "reference point has the wrong length");
    }
    reference = extend_point(*options.reference, x0.bound()).values();
  }

  Trajectory traj;
  traj.seed = delays.seed();
  if (options.keep_states) traj.states.reserve(steps + 1);
  traj.states.push_back(x0);
  if (reference) traj.gaps.push_back(d_max(x0.values(), *reference));

  Vector current = x0.values();
  Vector next;
  for (std::size_t k = 1; k <= steps; ++k) {
    const std::size_t idx = switching.selector(k);
    if (idx >= set.size()) {
      throw Error(ErrorCode::ScheduleError, "switch selector returned index " +
                                                std::to_string(idx) + " at step " +
                                                std::to_string(k));
    }
    const DelayDistribution D = delays.at(k);
    try {
      apply_delayed(set.map(idx), D, current, next);
    } catch (const Error& e) {
      throw EvaluationError(e.code(), e.what(), k);
    }
    if (!all_finite(next)) {
      throw EvaluationError(ErrorCode::NonFiniteOutput, "simulation produced NaN/Inf", k);
    }
    current.swap(next);
    traj.steps_taken = k;
    const bool exceeded = current.cwiseAbs().maxCoeff() > options.magnitude_bound;
    if (options.keep_states || k == steps || exceeded) {
      if (!options.keep_states) traj.states.erase(traj.states.begin() + 1, traj.states.end());
      traj.states.emplace_back(current, n, x0.bound());
    }
    if (reference) traj.gaps.push_back(d_max(current, *reference));
    if (exceeded) {
      traj.diverged = true;
      traj.diverged_at = k;
      break;
    }
  }
  return traj;
}

ContractionEstimate fit_contraction(std::vector<double> gaps) {
  ContractionEstimate est;
  est.gaps = std::move(gaps);
  if (est.gaps.empty()) return est;
  const double floor = kGapFloor * std::max(1.0, est.gaps.front());
  std::size_t usable = 0;
  while (usable < est.gaps.size() && est.gaps[usable] > floor) ++usable;
  est.fit_begin = usable / 2;
  est.fit_end = usable;
  if (est.fit_end - est.fit_begin < 2) return est;

  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  const double m = static_cast<double>(est.fit_end - est.fit_begin);
  for (std::size_t k = est.fit_begin; k < est.fit_end; ++k) {
    const double x = static_cast<double>(k);
    const double y = std::log(est.gaps[k]);
    sk += x;
    sy += y;
    skk += x * x;
    sky += x * y;
  }
  const double slope = (m * sky - sk * sy) / (m * skk - sk * sk);
  est.rate = std::exp(slope);
  return est;
}

ContractionEstimate contraction_estimate(const SwitchedSet& set, const SwitchSchedule& switching,
                                         const DelaySchedule& delays, const LiftedState& x0,
                                         const LiftedState& y0, std::size_t steps,
                                         const SimulationOptions& options) {
  if (x0.size() != y0.size() || x0.bound() != y0.bound()) {
    throw Error(ErrorCode::DimensionMismatch, "contraction_estimate: x0 and y0 differ in shape");
  }
  if (x0 == y0) {
    throw Error(ErrorCode::InvalidArgument, "contraction_estimate needs x0 != y0");
  }
  SimulationOptions sim = options;
  sim.reference.reset();
  sim.keep_states = true;
  const Trajectory tx = simulate_instance(set, switching, delays, x0, steps, sim);
  const Trajectory ty = simulate_instance(set, switching, delays, y0, steps, sim);

  const std::size_t len = std::min(tx.states.size(), ty.states.size());
  std::vector<double> gaps;
  gaps.reserve(len);
  for (std::size_t k = 0; k < len; ++k) {
    gaps.push_back(d_max(tx.states[k].values(), ty.states[k].values()));
  }
  ContractionEstimate est = fit_contraction(std::move(gaps));
  if (tx.diverged || ty.diverged) {
    est.diverged = true;
    est.diverged_at = tx.diverged && ty.diverged ? std::min(tx.diverged_at, ty.diverged_at)
                                                 : (tx.diverged ? tx.diverged_at : ty.diverged_at);
  }
  return est;
}

SharedFixedPointReport shared_fixed_point_check(const SwitchedSet& set, const StateVector& x_star,
                                                double tol) {
  SharedFixedPointReport report;
  for (const auto& map : set.maps()) {
    const double r = d_max(map.evaluate(x_star), x_star);
    report.residuals.push_back(r);
    if (!(r <= tol)) report.shared = false;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Certification

StabilityCertificate certify_switched(const MatrixSet& lipschitz_set, int L,
                                      const CertifyOptions& options) {
  if (L < 0) throw Error(ErrorCode::InvalidArgument, "certify_switched: L must be >= 0");
  StabilityCertificate cert;
  cert.tol = options.tol;
  cert.power_tol = options.power.tol;
  cert.delay_bound = L;
  cert.provenance = Provenance::UserSupplied;
  double bound = 0.0;
  std::size_t count = 0;
  for_each_ri_member(
      lipschitz_set,
      [&](const Matrix& member, const std::string&) {
        const LipschitzMatrix A(member, Provenance::UserSupplied);
        cert.rho = std::max(cert.rho, spectral_radius_power(A, options.power));
        bound = std::max(bound, spectral_radius_power(max_delay_lipschitz(A, L), options.power));
        ++count;
      },
      options.closure_cap);
  cert.convergence_rate = bound;
  cert.closure_size = count;
  cert.verdict = classify(bound, options.tol);
  return cert;
}

StabilityCertificate certify_switched(const SwitchedSet& set, int L, const CertifyOptions& options) {
  return certify_switched(set.lipschitz_set(), L, options);
}

}  // namespace istab
