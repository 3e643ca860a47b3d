#include "istab/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace istab::cli {

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Stable: return kExitStable;
    case Verdict::NotIntrinsicallyStable: return kExitNotStable;
    case Verdict::Marginal: return kExitMarginal;
  }
  return kExitError;
}

int exit_code(ErrorCode e) {
  return e == ErrorCode::ClosureTooLarge ? kExitClosureTooLarge : kExitError;
}

namespace {

std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

Provenance provenance_of(const RunConfig& config) {
  return config.model.kind == ModelKind::Generic ? Provenance::UserSupplied : Provenance::Analytic;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

struct SimulationRun {
  Trajectory trajectory;
  std::optional<std::uint64_t> seed;
  std::optional<ContractionEstimate> contraction;
};

std::optional<std::uint64_t> effective_seed(const RunConfig& config,
                                            std::optional<std::uint64_t> override_seed) {
  const bool random_delay = config.delay.kind == DelayKind::Stochastic;
  const bool random_switch = config.switching.kind == SwitchKind::Random;
  if (!random_delay && !random_switch) return std::nullopt;
  if (override_seed) return override_seed;
  return random_delay ? config.delay.seed : config.switching.seed;
}

LiftedState initial_state(const BuiltModel& model, const Vector& x) {
  Vector base = x;
  if (model.companion_lifted) base = x.replicate(2, 1);
  return extend_point(StateVector(base), model.delays.bound());
}

SimulationRun run_simulation(const RunConfig& config, const SimulationConfig& sim,
                             std::size_t steps, std::optional<std::uint64_t> seed_override) {
  const BuiltModel model = build_model(config, seed_override);
  const SwitchSchedule sw = build_switch(config, model.set.size(), seed_override);
  const Vector x0 = sim.x0 ? *sim.x0 : Vector::Zero(model.base_dimension);

  SimulationOptions opts;
  opts.magnitude_bound = sim.divergence_bound;
  opts.reference = model.fixed_point;
  SimulationRun run;
  run.trajectory = simulate_instance(model.set, sw, model.delays, initial_state(model, x0), steps,
                                     opts);
  run.seed = effective_seed(config, seed_override);
  if (sim.y0 && *sim.y0 != x0) {
    SimulationOptions copts;
    copts.magnitude_bound = sim.divergence_bound;
    run.contraction = contraction_estimate(model.set, sw, model.delays, initial_state(model, x0),
                                           initial_state(model, *sim.y0), steps, copts);
  }
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// certify

CertifyResult certify_config(const RunConfig& config, const CertifyFlags& flags) {
  const BuiltModel model = build_model(config, std::uint64_t{0});
  CertifyResult r;
  r.L = flags.L ? *flags.L : configured_bound(config);
  r.map_L = map_delay_bound(config, r.L);
  if (r.map_L < 0) throw Error(ErrorCode::ConfigError, "linear models need L >= 1");
  r.maps = model.set.size();

  CertifyOptions opts;
  opts.tol = flags.tol ? *flags.tol : config.tolerances.certificate;
  opts.power.tol = config.tolerances.power;
  opts.power.max_iter = flags.max_iter ? *flags.max_iter : config.tolerances.max_iter;
  opts.closure_cap = config.tolerances.closure_cap;
  r.certificate = certify_switched(model.set, r.map_L, opts);
  // Intrinsic stability is decided by rho(A); rho(A_L) = rho(A)^(1/(L+1))
  // would drift into the marginal band as L grows.
  r.certificate.verdict = classify(r.certificate.rho, opts.tol);
  r.certificate.provenance = provenance_of(config);
  r.certificate.heuristic = false;
  return r;
}

void write_certificate(std::ostream& os, const RunConfig& config, const CertifyResult& r) {
  const auto& c = r.certificate;
  const bool switched = r.maps > 1;
  os << "model: " << to_string(config.model.kind) << "\n";
  if (!config.name.empty()) os << "name: " << config.name << "\n";
  os << "maps: " << r.maps << "\n";
  os << "verdict: " << to_string(c.verdict) << "\n";
  os << (switched ? "ri_closure_bound: " : "rho_A: ") << fmt(c.rho) << "\n";
  if (switched) os << "ri_closure_size: " << c.closure_size.value_or(0) << "\n";
  os << "L: " << r.L << "\n";
  if (r.map_L != r.L) os << "lifted_L: " << r.map_L << "\n";
  os << "rho_A_L: " << fmt(c.convergence_rate.value_or(0.0)) << "\n";
  os << "matrix_provenance: " << to_string(c.provenance) << "\n";
  os << "certificate_tol: " << fmt(c.tol, 6) << "\n";
  os << "power_tol: " << fmt(c.power_tol, 6) << "\n";
  switch (c.verdict) {
    case Verdict::Stable:
      os << "note: stable for all L (the certificate does not depend on the delay bound); "
            "rho_A_L is the convergence rate for this L\n";
      break;
    case Verdict::Marginal:
      os << "note: rho within tolerance of 1; intrinsic stability is not certified\n";
      break;
    case Verdict::NotIntrinsicallyStable:
      os << "note: not intrinsically stable; delay bound unknown\n";
      break;
  }
}

int cmd_certify(const std::string& path, const CertifyFlags& flags, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(path);
    const CertifyResult r = certify_config(config, flags);
    write_certificate(out, config, r);
    return exit_code(r.certificate.verdict);
  });
}

// ---------------------------------------------------------------------------
// simulate

void write_trajectory_csv(std::ostream& os, const Trajectory& t, Index n,
                          std::optional<std::uint64_t> seed) {
  os << kCsvHeader << "\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const auto& s = t.states[k];
    const std::string gap = k < t.gaps.size() ? fmt(t.gaps[k], 12) : "";
    for (int l = 0; l <= s.bound(); ++l) {
      for (Index i = 0; i < n; ++i) {
        os << k << ',' << l << ',' << (i + 1) << ',' << fmt(s.at(i, l), 12) << ',' << gap << "\n";
      }
    }
  }
  if (t.diverged) os << "# diverged at step " << t.diverged_at << "\n";
  if (seed) os << "# seed " << *seed << "\n";
}

int cmd_simulate(const std::string& path, const SimulateFlags& flags, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(path);
    const SimulationConfig sim = config.simulation.value_or(SimulationConfig{});
    const std::size_t steps = flags.steps ? *flags.steps : sim.steps;
    if (steps < 1) throw Error(ErrorCode::ConfigError, "--steps must be >= 1");
    const SimulationRun run = run_simulation(config, sim, steps, flags.seed);
    const auto& t = run.trajectory;

    std::ofstream file(flags.out);
    if (!file) throw Error(ErrorCode::ConfigError, flags.out + ": cannot write trajectory");
    write_trajectory_csv(file, t, t.states.front().n(), run.seed);

    out << "trajectory: " << flags.out << "\n";
    out << "steps: " << t.steps_taken << "\n";
    if (!t.gaps.empty()) out << "final_gap_to_fixed_point: " << fmt(t.gaps.back()) << "\n";
    if (t.diverged) out << "diverged_at_step: " << t.diverged_at << "\n";
    if (run.seed) out << "seed: " << *run.seed << "\n";
    return kExitStable;
  });
}

// ---------------------------------------------------------------------------
// closure

int cmd_closure(const std::string& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(path);
    const BuiltModel model = build_model(config, std::uint64_t{0});
    const MatrixSet& S = model.set.lipschitz_set();
    PowerOptions power;
    power.tol = config.tolerances.power;
    power.max_iter = config.tolerances.max_iter;

    out << "set_size: " << S.size() << "\n";
    for (std::size_t i = 0; i < S.size(); ++i) {
      out << "set_member " << S.labels()[i] << ": rho = " << fmt(spectral_radius_power(S[i], power))
          << "\n";
    }
    std::ostringstream listing;
    double bound = 0.0;
    std::size_t count = 0;
    for_each_ri_member(
        S,
        [&](const Matrix& member, const std::string& label) {
          const double rho = spectral_radius_power(member, power);
          bound = std::max(bound, rho);
          ++count;
          listing << "closure_member " << count << " (" << label
                  << (S.contains(member) ? "" : ", added by closure") << "): rho = " << fmt(rho)
                  << "\n";
        },
        config.tolerances.closure_cap);
    out << "closure_size: " << count << "\n";
    out << listing.str();
    out << "bound: " << fmt(bound) << "\n";
    return kExitStable;
  });
}

// ---------------------------------------------------------------------------
// report

std::vector<ComparisonRow> comparison_rows(const std::string& key) {
  const std::string lmi = "delay-dependent LMI / Lyapunov-Krasovskii method";
  const std::string published = "published";
  if (key == "linear-intrinsic") {
    return {{"Theorem 3.1, " + lmi, "10", published},
            {"Theorems 1 and 2, " + lmi, "13", published},
            {"Theorem 3.2, " + lmi, "12", published},
            {"Theorem 1, " + lmi, "15", published},
            {"Theorem 2, " + lmi, "10*10^21", published}};
  }
  if (key == "linear-marginal") {
    return {{"Theorem 2, " + lmi, "9.61e8", published}};
  }
  if (key == "switched-rows") {
    return {{"switched-system " + lmi, "13", published}};
  }
  if (key == "switched-control") {
    return {{"switched-system " + lmi, "2", published}};
  }
  return {};
}

std::string this_tool_bound(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "∞";
    case Verdict::Marginal: return "marginal; delay bound unknown";
    case Verdict::NotIntrinsicallyStable: return "not intrinsically stable; delay bound unknown";
  }
  return "unknown";
}

int cmd_report(const std::string& path, const ReportFlags& flags, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig config = load_config(path);
    const CertifyResult cert = certify_config(config);
    const std::filesystem::path dir(flags.out);
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;

    {
      std::ofstream f(dir / "certificate.txt");
      write_certificate(f, config, cert);
      written.push_back("certificate.txt");
    }
    {
      std::ofstream f(dir / "comparison.txt");
      f << "# Largest delay bound L for which stability is established.\n";
      f << "# Literature rows are published values shown for comparison; they are not "
           "recomputed.\n";
      f << "method | max upper bound L | source\n";
      for (const auto& row : comparison_rows(config.compare)) {
        f << row.method << " | " << row.bound << " | " << row.source << "\n";
      }
      f << "this tool: " << this_tool_bound(cert.certificate.verdict) << "\n";
      written.push_back("comparison.txt");
    }
    if (config.simulation) {
      const SimulationRun run = run_simulation(config, *config.simulation,
                                               config.simulation->steps, flags.seed);
      std::ofstream f(dir / "trajectory.csv");
      write_trajectory_csv(f, run.trajectory, run.trajectory.states.front().n(), run.seed);
      written.push_back("trajectory.csv");
      if (run.contraction) {
        std::ofstream g(dir / "contraction.csv");
        g << "step,gap\n";
        for (std::size_t k = 0; k < run.contraction->gaps.size(); ++k) {
          g << k << ',' << fmt(run.contraction->gaps[k], 12) << "\n";
        }
        if (run.contraction->rate) g << "# fitted rate " << fmt(*run.contraction->rate) << "\n";
        if (run.contraction->diverged) {
          g << "# diverged at step " << run.contraction->diverged_at << "\n";
        }
        written.push_back("contraction.csv");
      }
    }

    write_certificate(out, config, cert);
    out << "this tool: " << this_tool_bound(cert.certificate.verdict) << "\n";
    for (const auto& w : written) out << "wrote: " << (dir / w).string() << "\n";
    return exit_code(cert.certificate.verdict);
  });
}

}  // namespace istab::cli
