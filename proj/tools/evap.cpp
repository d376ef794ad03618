#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evap/commands.hpp"
#include "evap/presets.hpp"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  long audit_every = 0;
  bool lenient = false;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config, "Configuration file (TOML subset)");
  auto* pre = cmd->add_option("--preset", c.preset, "Built-in problem instead of a file")
                  ->check(CLI::IsMember(evap::preset_names()));
  cfg->excludes(pre);
  cmd->add_option("--out", c.out, "Output directory (overrides output.dir)");
  cmd->add_option("--audit-every", c.audit_every, "Audit cadence in steps")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--lenient", c.lenient, "Downgrade unknown config keys to warnings");
}

evap::RunManifest resolve(const Common& c) {
  evap::RunManifest m;
  if (!c.config.empty()) {
    m = evap::load_config(c.config, c.lenient);
  } else if (!c.preset.empty()) {
    m.problem = evap::preset(c.preset);
  } else {
    throw evap::ConfigError("one of --config or --preset is required");
  }
  if (!c.out.empty()) m.output.dir = c.out;
  if (c.audit_every > 0) m.problem.solver.audit_every = c.audit_every;
  evap::validate_problem(m.problem);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-stable SBP-SAT solver for 1D two-phase evaporation"};
  app.require_subcommand(1);

  Common run_opts, conv_opts, audit_opts;
  auto* run = app.add_subcommand("run", "Integrate a problem and write snapshots, ledger, summary");
  add_common(run, run_opts);

  evap::VerifyOptions vopts;
  std::string inject;
  auto* verify = app.add_subcommand("verify", "Run the stability and consistency property suite");
  verify->add_option("--seed", vopts.seed, "Seed for randomized properties");
  verify->add_option("--samples", vopts.samples, "Random states per property")
      ->check(CLI::PositiveNumber);
  verify->add_option("--inject", inject, "Mutation hook")
      ->check(CLI::IsMember({"penalty-sign", "q-perturbation"}))
      ->group("");

  std::vector<long> levels;
  bool serial = false;
  auto* converge = app.add_subcommand("converge", "Manufactured-solution refinement study");
  add_common(converge, conv_opts);
  converge->add_option("--levels", levels, "Node counts per phase, e.g. 33 65 129")
      ->delimiter(',');
  converge->add_flag("--serial", serial, "Run levels one after another");

  std::string snapshots;
  auto* audit = app.add_subcommand("audit", "Recompute the energy ledger over a snapshots.csv");
  add_common(audit, audit_opts);
  audit->add_option("--snapshots", snapshots, "Snapshot file written by `run`")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return evap::cmd_run(resolve(run_opts), std::cout, std::cerr);
    if (verify->parsed()) {
      vopts.inject_penalty_sign_flip = inject == "penalty-sign";
      vopts.inject_q_perturbation = inject == "q-perturbation";
      return evap::cmd_verify(vopts, std::cout);
    }
    if (converge->parsed()) {
      auto m = resolve(conv_opts);
      if (!levels.empty()) m.levels = levels;
      return evap::cmd_converge(m, std::cout, std::cerr, !serial);
    }
    if (audit->parsed()) return evap::cmd_audit(resolve(audit_opts), snapshots, std::cout, std::cerr);
  } catch (const evap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
