#pragma once

// The certify | simulate | closure | report subcommands. Each returns the
// process exit code and writes its human-readable report to `out`.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "istab/cli/config.hpp"

namespace istab::cli {

enum ExitCode : int {
  kExitStable = 0,
  kExitError = 1,
  kExitNotStable = 2,
  kExitMarginal = 3,
  kExitClosureTooLarge = 4,
};

int exit_code(Verdict v);
int exit_code(ErrorCode e);

struct CertifyFlags {
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<int> L;
};

struct SimulateFlags {
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  std::string out = "trajectory.csv";
};

struct ReportFlags {
  std::string out = "report";
  std::optional<std::uint64_t> seed;
};

/// Certificate for the configured model. The verdict classifies the
/// RI-closure bound max rho(A) (rho(A) for a single map), which decides
/// intrinsic stability independently of L; convergence_rate holds
/// max rho(A_L) for the configured L.
struct CertifyResult {
  StabilityCertificate certificate;
  int L = 0;
  int map_L = 0;
  std::size_t maps = 0;
};

CertifyResult certify_config(const RunConfig& config, const CertifyFlags& flags = {});
void write_certificate(std::ostream& os, const RunConfig& config, const CertifyResult& result);

/// CSV columns: step,block,component,value,gap_to_fixed_point. Blocks count
/// from 0 (current state), components from 1. gap is empty when no shared
/// fixed point is known.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, Index n,
                          std::optional<std::uint64_t> seed);

inline constexpr const char* kCsvHeader = "step,block,component,value,gap_to_fixed_point";

struct ComparisonRow {
  std::string method;
  std::string bound;
  std::string source;
};

/// Published delay bounds for the bundled comparison cases (documentation
/// data, never recomputed). Empty for unknown keys.
std::vector<ComparisonRow> comparison_rows(const std::string& key);

/// "∞" when stable, otherwise the not-intrinsically-stable message.
std::string this_tool_bound(Verdict v);

int cmd_certify(const std::string& path, const CertifyFlags& flags, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const std::string& path, const SimulateFlags& flags, std::ostream& out,
                 std::ostream& err);
int cmd_closure(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_report(const std::string& path, const ReportFlags& flags, std::ostream& out,
               std::ostream& err);

}  // namespace istab::cli
