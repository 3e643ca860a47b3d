#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "istab/cli/commands.hpp"
#include "istab/cli/config.hpp"

using namespace istab;
using namespace istab::cli;
using namespace istab::testing;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = ISTAB_CONFIG_DIR;
const std::string kData = ISTAB_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "expected a ConfigError for:\n" << text;
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("istab-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kMinimal = "cgn:\n  W: [[0, 0.75], [-0.75, 0]]\n  epsilon: 0.8\n  c: [-1, 1]\n";

}  // namespace

TEST(Config, EmitParseRoundTripForEveryPreset) {
  for (const auto& name : example_names()) {
    const RunConfig c = example_config(name);
    EXPECT_EQ(parse_config(emit_config(c)), c) << name;
  }
}

TEST(Config, CheckedInPresetsMatchBuiltIns) {
  for (const auto& name : example_names()) {
    EXPECT_EQ(load_config(kConfigs + "/" + name + ".yaml"), example_config(name)) << name;
  }
  EXPECT_EQ(code_of([] { example_config("nope"); }), ErrorCode::ConfigError);
}

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.model.kind, ModelKind::Cgn);
  EXPECT_EQ(c.delay.kind, DelayKind::None);
  EXPECT_FALSE(c.simulation.has_value());
  EXPECT_EQ(configured_bound(c), 0);
  EXPECT_EQ(c.model.networks.front().activation, "tanh");
}

TEST(Config, ErrorsCarryLineAndColumn) {
  EXPECT_NE(config_error(std::string(kMinimal) + "bogus: 1\n").find("t.yaml:5:1: unknown key 'bogus'"),
            std::string::npos);
  EXPECT_NE(config_error("cgn:\n  W: [[0, 1], [1, 0]]\n  epsilon: 0.5\n  c: [1, 2, 3]\n")
                .find("t.yaml:4:"),
            std::string::npos);
  EXPECT_NE(config_error("cgn: [unclosed\n").find("t.yaml:"), std::string::npos);
  EXPECT_NE(config_error("name: x\n").find("exactly one model section"), std::string::npos);
  EXPECT_NE(config_error(std::string(kMinimal) +
                         "delay:\n  kind: constant\n  L: 1\n  matrix: [[0, 2], [0, 0]]\n")
                .find("t.yaml:"),
            std::string::npos);
  EXPECT_NE(config_error(std::string(kMinimal) + "delay:\n  kind: weekly\n").find("t.yaml:6:9: delay kind"),
            std::string::npos);
}

TEST(Config, CsvSidecarResolvesRelativeToConfig) {
  const RunConfig c = load_config(kData + "/sidecar.yaml");
  ASSERT_EQ(c.model.matrices.size(), 1u);
  EXPECT_EQ(c.model.matrices[0], mat2(0.5, 0.25, 0, 0.5));
  EXPECT_EQ(code_of([] { read_csv_matrix("/nonexistent/m.csv"); }), ErrorCode::ConfigError);
}

TEST(Config, MissingSeedIsAnError) {
  const RunConfig c = load_config(kData + "/unseeded.yaml");
  EXPECT_EQ(code_of([&] { build_model(c); }), ErrorCode::ConfigError);
  EXPECT_NO_THROW(build_model(c, std::uint64_t{11}));
}

TEST(Config, BuiltModelsHaveExpectedShapes) {
  const auto lin = build_model(example_config("linear-intrinsic"));
  EXPECT_TRUE(lin.companion_lifted);
  EXPECT_EQ(lin.base_dimension, 2);
  EXPECT_EQ(lin.set.dimension(), 4);
  EXPECT_EQ(lin.delays.bound(), 19);
  const auto sw = build_model(example_config("switched-cgn"));
  EXPECT_EQ(sw.set.size(), 2u);
  ASSERT_FALSE(sw.fixed_point.has_value());
  const auto att = build_model(example_config("cgn-attracting"));
  ASSERT_TRUE(att.fixed_point.has_value());
  EXPECT_NEAR((*att.fixed_point)[0], -0.386, 1e-3);
}

TEST(ExitCodes, Table) {
  EXPECT_EQ(exit_code(Verdict::Stable), 0);
  EXPECT_EQ(exit_code(Verdict::NotIntrinsicallyStable), 2);
  EXPECT_EQ(exit_code(Verdict::Marginal), 3);
  EXPECT_EQ(exit_code(ErrorCode::ClosureTooLarge), 4);
  EXPECT_EQ(exit_code(ErrorCode::ConfigError), 1);
  EXPECT_EQ(exit_code(ErrorCode::NoConvergence), 1);
}

TEST(Commands, CertifyVerdictsAndExitCodes) {
  const std::pair<const char*, int> cases[] = {
      {"cgn-attracting", 0},   {"cgn-oscillating", 2}, {"linear-intrinsic", 0},
      {"linear-marginal", 3},  {"switched-rows", 0},   {"switched-control", 0},
      {"switched-cgn", 0},     {"switched-counter", 2}, {"singleton", 0}};
  for (const auto& [name, code] : cases) {
    std::ostringstream out, err;
    EXPECT_EQ(cmd_certify(kConfigs + "/" + name + ".yaml", {}, out, err), code) << name;
    EXPECT_TRUE(err.str().empty()) << err.str();
  }
}

TEST(Commands, CertifyReportsRadii) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_certify(kConfigs + "/cgn-oscillating.yaml", {}, out, err), 2);
  EXPECT_NE(out.str().find("rho_A: 1.35"), std::string::npos);
  EXPECT_NE(out.str().find("not intrinsically stable; delay bound unknown"), std::string::npos);
  std::ostringstream out2;
  CertifyFlags flags;
  flags.L = 7;
  ASSERT_EQ(cmd_certify(kConfigs + "/cgn-attracting.yaml", flags, out2, err), 0);
  EXPECT_NE(out2.str().find("L: 7"), std::string::npos);
  EXPECT_NE(out2.str().find("stable for all L"), std::string::npos);
}

TEST(Commands, CertifyFailsOnMissingFile) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_certify("/nonexistent.yaml", {}, out, err), 1);
  EXPECT_NE(err.str().find("error:"), std::string::npos);
}

TEST(Commands, ClosureListing) {
  std::ostringstream out, err;
  ASSERT_EQ(cmd_closure(kConfigs + "/switched-cgn.yaml", out, err), 0);
  EXPECT_NE(out.str().find("closure_size: 4"), std::string::npos);
  EXPECT_NE(out.str().find("added by closure"), std::string::npos);
  EXPECT_NE(out.str().find("bound: 0.95"), std::string::npos);
}

TEST(Commands, ClosureTooLargeExitsFour) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_certify(kData + "/small-cap.yaml", {}, out, err), 4);
  EXPECT_EQ(cmd_closure(kData + "/small-cap.yaml", out, err), 4);
}

TEST(Commands, SimulateMatchesGoldenCsv) {
  const fs::path dir = scratch("golden");
  SimulateFlags flags;
  flags.out = (dir / "t.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(kData + "/golden-attracting.yaml", flags, out, err), 0) << err.str();
  EXPECT_EQ(slurp(flags.out), slurp(kData + "/golden-attracting.csv"));
}

TEST(Commands, SimulateFlagsDivergence) {
  const fs::path dir = scratch("diverge");
  SimulateFlags flags;
  flags.out = (dir / "t.csv").string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_simulate(kConfigs + "/switched-counter.yaml", flags, out, err), 0) << err.str();
  const std::string csv = slurp(flags.out);
  EXPECT_EQ(csv.rfind(kCsvHeader, 0), 0u);
  EXPECT_NE(csv.find("# diverged at step"), std::string::npos);
  EXPECT_NE(out.str().find("diverged_at_step"), std::string::npos);
}

TEST(Commands, SimulateSeedOverrideAndMissingSeed) {
  const fs::path dir = scratch("seed");
  SimulateFlags flags;
  flags.out = (dir / "t.csv").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_simulate(kData + "/unseeded.yaml", flags, out, err), 1);
  flags.seed = 5;
  ASSERT_EQ(cmd_simulate(kData + "/unseeded.yaml", flags, out, err), 0);
  const std::string first = slurp(flags.out);
  EXPECT_NE(first.find("# seed 5"), std::string::npos);
  ASSERT_EQ(cmd_simulate(kData + "/unseeded.yaml", flags, out, err), 0);
  EXPECT_EQ(slurp(flags.out), first);
}

TEST(Commands, ReportBundle) {
  const fs::path dir = scratch("report");
  ReportFlags flags;
  flags.out = (dir / "intrinsic").string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_report(kConfigs + "/linear-intrinsic.yaml", flags, out, err), 0) << err.str();
  EXPECT_TRUE(fs::exists(dir / "intrinsic" / "certificate.txt"));
  EXPECT_TRUE(fs::exists(dir / "intrinsic" / "trajectory.csv"));
  const std::string cmp = slurp(dir / "intrinsic" / "comparison.txt");
  EXPECT_NE(cmp.find("this tool: ∞"), std::string::npos);
  EXPECT_NE(cmp.find("10*10^21"), std::string::npos);
  EXPECT_NE(out.str().find("this tool: ∞"), std::string::npos);

  flags.out = (dir / "counter").string();
  EXPECT_EQ(cmd_report(kConfigs + "/switched-counter.yaml", flags, out, err), 2);
  EXPECT_NE(slurp(dir / "counter" / "comparison.txt").find("not intrinsically stable; delay bound unknown"),
            std::string::npos);

  flags.out = (dir / "singleton").string();
  ASSERT_EQ(cmd_report(kConfigs + "/singleton.yaml", flags, out, err), 0);
  EXPECT_TRUE(fs::exists(dir / "singleton" / "certificate.txt"));
  EXPECT_FALSE(fs::exists(dir / "singleton" / "trajectory.csv"));

  flags.out = (dir / "pair").string();
  ASSERT_EQ(cmd_report(kConfigs + "/switched-cgn.yaml", flags, out, err), 0);
  const std::string contraction = slurp(dir / "pair" / "contraction.csv");
  EXPECT_EQ(contraction.rfind("step,gap", 0), 0u);
  EXPECT_NE(contraction.find("# fitted rate"), std::string::npos);
}

TEST(Commands, ComparisonRows) {
  EXPECT_EQ(comparison_rows("linear-intrinsic").size(), 5u);
  EXPECT_EQ(comparison_rows("switched-control").front().bound, "2");
  EXPECT_TRUE(comparison_rows("unknown").empty());
  EXPECT_EQ(this_tool_bound(Verdict::Stable), "∞");
}

TEST(Tool, ExitCodesFromBinary) {
  const std::string tool = ISTAB_TOOL;
  auto run = [&](const std::string& args) {
    const int status = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(run("certify " + kConfigs + "/singleton.yaml"), 0);
  EXPECT_EQ(run("certify " + kConfigs + "/cgn-oscillating.yaml"), 2);
  EXPECT_EQ(run("certify " + kConfigs + "/linear-marginal.yaml"), 3);
  EXPECT_EQ(run("closure " + kData + "/small-cap.yaml"), 4);
  EXPECT_EQ(run("certify --no-such-flag x.yaml"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}
