#include <iostream>

#include "CLI11.hpp"
#include "istab/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace istab::cli;
  CLI::App app{"istab: intrinsic-stability certifier for delayed and switched networks"};
  app.require_subcommand(1);

  std::string config;
  CertifyFlags certify;
  auto* c = app.add_subcommand("certify", "certify intrinsic stability of a configured model");
  c->add_option("config", config, "run configuration (YAML)")->required();
  c->add_option("--tol", certify.tol, "certificate tolerance");
  c->add_option("--max-iter", certify.max_iter, "power iteration limit");
  c->add_option("--L", certify.L, "delay bound");

  SimulateFlags simulate;
  auto* s = app.add_subcommand("simulate", "simulate a delayed/switched instance to CSV");
  s->add_option("config", config, "run configuration (YAML)")->required();
  s->add_option("--steps", simulate.steps, "number of steps");
  s->add_option("--seed", simulate.seed, "seed for stochastic delays and random switching");
  s->add_option("--out", simulate.out, "trajectory CSV path")->capture_default_str();

  auto* cl = app.add_subcommand("closure", "list the row-independence closure with spectral radii");
  cl->add_option("config", config, "run configuration (YAML)")->required();

  ReportFlags report;
  auto* r = app.add_subcommand("report", "write certificate, trajectories and comparison table");
  r->add_option("config", config, "run configuration (YAML)")->required();
  r->add_option("--out", report.out, "output directory")->capture_default_str();
  r->add_option("--seed", report.seed, "seed for stochastic delays and random switching");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  if (c->parsed()) return cmd_certify(config, certify, std::cout, std::cerr);
  if (s->parsed()) return cmd_simulate(config, simulate, std::cout, std::cerr);
  if (cl->parsed()) return cmd_closure(config, std::cout, std::cerr);
  return cmd_report(config, report, std::cout, std::cerr);
}
