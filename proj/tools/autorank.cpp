// autorank: command-line front end for profiling, rank assignment,
// federated simulation and run comparison.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "autorank/cli.hpp"
#include "autorank/config.hpp"

namespace {

std::string config_keys_help() {
  std::string s = "Config file keys (`key = value`, `#` comments):\n";
  for (const auto& [key, help] : autorank::config::keys()) s += "  " + key + ": " + help + "\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace autorank::cli;

  CLI::App app{"AutoRank federated LoRA rank personalization"};
  app.set_version_flag("--version", std::string(autorank::config::kToolVersion));
  app.footer(config_keys_help());
  app.require_subcommand(1);

  ProfileOptions profile;
  auto* p = app.add_subcommand("profile", "Run profiling epochs and write per-client complexity CSV");
  p->add_option("--config", profile.config_path, "Experiment config file")->required();
  p->add_option("--out", profile.out, "Output CSV path")->capture_default_str();
  p->add_option("--seed", profile.seed, "Override the master seed");
  p->add_option("--threads", profile.threads, "Client-training parallelism")->capture_default_str();

  AssignRanksOptions assign;
  auto* a = app.add_subcommand("assign-ranks", "CRITIC/TOPSIS rank assignment from a complexity CSV");
  a->add_option("--input", assign.input, "Complexity CSV")->required();
  a->add_option("--global-rank", assign.global_rank, "Global LoRA rank R_g")->capture_default_str();
  a->add_option("--floor", assign.floor, "Minimum rank ratio rho")->capture_default_str();
  a->add_option("--mode", assign.mode, "autorank_finegrain | autorank_alt1 | autorank_alt2 | homogeneous")
      ->capture_default_str();
  a->add_option("--rank-ratio", assign.rank_ratio, "Homogeneous rank ratio")->capture_default_str();
  a->add_option("--out", assign.out_dir, "Output directory")->capture_default_str();

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Run a full federated experiment");
  s->add_option("--config", sim.config_path, "Experiment config file")->required();
  s->add_option("--mode", sim.mode, "Rank mode override");
  s->add_option("--rounds", sim.rounds, "Federated rounds override");
  s->add_option("--seed", sim.seed, "Master seed override (config default 42)");
  s->add_option("--rank-ratio", sim.rank_ratio, "Homogeneous rank ratio override");
  s->add_option("--threads", sim.threads, "Client-training parallelism")->capture_default_str();
  s->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();

  ReportOptions report;
  auto* r = app.add_subcommand("report", "Compare finished runs");
  r->add_option("runs", report.run_dirs, "Run directories")->required();
  r->add_option("--out", report.out_dir, "Directory for report.csv and report_smoothed.csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*p) return cmd_profile(profile, std::cout, std::cerr);
  if (*a) return cmd_assign_ranks(assign, std::cout, std::cerr);
  if (*s) return cmd_simulate(sim, std::cout, std::cerr);
  if (*r) return cmd_report(report, std::cout, std::cerr);
  return kExitUsage;
}
