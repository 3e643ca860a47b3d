#pragma once

// Declarative run configuration (YAML) and the model it describes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "istab/core.hpp"
#include "istab/delay.hpp"
#include "istab/models.hpp"
#include "istab/spectral.hpp"
#include "istab/switched.hpp"

namespace istab::cli {

enum class ModelKind { Cgn, LinearDelayed, SwitchedControl, Generic };

const char* to_string(ModelKind k);

struct CgnNetwork {
  Matrix W;
  double epsilon = 0.0;
  std::string activation = "tanh";  // tanh | logistic
  Vector c;

  friend bool operator==(const CgnNetwork&, const CgnNetwork&) = default;
};

struct ModelConfig {
  ModelKind kind = ModelKind::Generic;
  /// cgn: one network per switched map.
  std::vector<CgnNetwork> networks;
  /// linear-delayed (exactly one mode) and switched-control.
  std::vector<LinearMode> modes;
  Vector q;
  std::vector<Vector> controls;
  /// generic: linear maps x -> M x with Lipschitz matrix |M|.
  std::vector<Matrix> matrices;
  std::vector<std::string> labels;
};

bool operator==(const ModelConfig& a, const ModelConfig& b);

enum class DelayKind { None, Constant, Periodic, Stochastic };

const char* to_string(DelayKind k);

/// For cgn/generic models the schedule acts on the n x n delay matrix:
/// constant uses `matrix`, periodic uses `matrix` as moduli (d_ij = k mod m_ij),
/// stochastic draws each entry uniformly from {low..high}.
/// For linear-delayed/switched-control models it sets the delay magnitude
/// tau(k) in [1, L]: constant uses taus[0], periodic cycles through `taus`,
/// stochastic draws tau uniformly from {low..high}.
struct DelayConfig {
  DelayKind kind = DelayKind::None;
  std::optional<int> L;
  IntMatrix matrix;
  std::vector<int> taus;
  int low = 0;
  int high = 0;
  std::optional<std::uint64_t> seed;
};

bool operator==(const DelayConfig& a, const DelayConfig& b);

enum class SwitchKind { Constant, Cyclic, Random, Sequence };

const char* to_string(SwitchKind k);

struct SwitchConfig {
  SwitchKind kind = SwitchKind::Cyclic;
  std::size_t index = 0;
  std::size_t block = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> sequence;

  friend bool operator==(const SwitchConfig&, const SwitchConfig&) = default;
};

struct SimulationConfig {
  std::size_t steps = 500;
  /// Initial point in R^n (the unlifted model dimension); zeros if absent.
  std::optional<Vector> x0;
  /// Second initial point for the contraction estimate.
  std::optional<Vector> y0;
  double divergence_bound = kDefaultDivergenceBound;
};

bool operator==(const SimulationConfig& a, const SimulationConfig& b);

struct Tolerances {
  double power = 1e-10;
  double certificate = 1e-8;
  std::size_t max_iter = 100'000;
  std::size_t closure_cap = kDefaultClosureCap;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  std::string name;
  ModelConfig model;
  DelayConfig delay;
  SwitchConfig switching;
  std::optional<SimulationConfig> simulation;
  Tolerances tolerances;
  /// Key into the literature comparison data (see comparison_rows).
  std::string compare;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Parses YAML text. `origin` prefixes error messages ("origin:line:col: ...")
/// and `base_dir` resolves sidecar CSV paths. Throws Error(ConfigError).
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                       const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// YAML text that parse_config maps back to an equal RunConfig.
std::string emit_config(const RunConfig& config);

/// Reads a comma-separated numeric matrix (one row per line, '#' comments).
Matrix read_csv_matrix(const std::string& path);

/// Names accepted by example_config.
std::vector<std::string> example_names();
RunConfig example_config(const std::string& name);

/// The model a RunConfig describes, ready to certify or simulate.
struct BuiltModel {
  SwitchedSet set;
  DelaySchedule delays;
  /// Dimension of the unlifted system (n); set.dimension() is 2n for the
  /// linear families.
  Index base_dimension = 0;
  /// True for linear-delayed/switched-control: the map state is (x^k, x^{k-1}).
  bool companion_lifted = false;
  /// Shared fixed point of every map, when one was found.
  std::optional<StateVector> fixed_point;
};

/// `seed_override` replaces the config's delay and switch seeds.
BuiltModel build_model(const RunConfig& config,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Delay bound of the map-level schedule for a user-facing bound L: L for
/// cgn/generic, L - 1 for the companion-lifted linear families.
int map_delay_bound(const RunConfig& config, int L);

/// Effective user-facing bound: delay.L, else 1 for linear families, else 0.
int configured_bound(const RunConfig& config);

SwitchSchedule build_switch(const RunConfig& config, std::size_t count,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace istab::cli
