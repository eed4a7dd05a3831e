// platoonlab command line: trains the longitudinal policy and runs the
// platoon/fundamental-diagram/fuel experiments from JSON configs.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "platoonlab/data_io.hpp"
#include "platoonlab/experiments.hpp"

using namespace platoonlab;

namespace {

struct GlobalArgs {
  std::string config_file;
  std::string preset = "desk";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool seed_set = false;
  bool out_set = false;
};

ExperimentConfig resolve_config(const GlobalArgs& args, const std::string& scenario) {
  ExperimentConfig cfg;
  if (!args.config_file.empty()) {
    cfg = ExperimentConfig::from_file(args.config_file);
    if (cfg.preset != args.preset && args.preset != "desk") cfg.preset = args.preset;
  } else {
    cfg = make_preset(args.preset);
    cfg.seed = args.seed;
    cfg.out_dir = args.out_dir;
  }
  if (args.seed_set) cfg.seed = args.seed;
  if (args.out_set) cfg.out_dir = args.out_dir;
  cfg.scenario = scenario;
  return cfg;
}

int run_and_report(ExperimentConfig cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  cfg.save((std::filesystem::path(cfg.out_dir) / "config.json").string());
  const ResultTable table = run_scenario(cfg);
  std::cout << "scenario " << table.scenario << " fingerprint " << table.fingerprint
            << " -> " << cfg.out_dir << " (" << table.rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"car-following RL platoon laboratory"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_file, "JSON experiment config file");
  app.add_option("--preset", args.preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  auto* seed_opt = app.add_option("--seed", args.seed, "master seed");
  auto* out_opt = app.add_option("--out-dir", args.out_dir, "output directory");

  auto* train = app.add_subcommand("train", "train the TD3 policy");
  std::string train_ngsim;
  train->add_option("--ngsim", train_ngsim, "NGSIM-format CSV of training leaders");

  auto* het = app.add_subcommand("heterogeneity", "FD per safe time gap (all-RL platoons)");
  auto* tpen = app.add_subcommand("t-penetration", "FD for mixed time-gap compositions");
  auto* rlpen = app.add_subcommand("rl-penetration", "FD for RL/IDM shares");
  auto* fuel = app.add_subcommand("fuel", "paired RL/IDM fuel comparison");
  std::string policy_file;
  std::string fuel_ngsim;
  for (auto* sc : {het, tpen, rlpen, fuel}) {
    sc->add_option("--policy", policy_file, "trained policy file (policy.json)");
  }
  fuel->add_option("--ngsim", fuel_ngsim, "NGSIM-format CSV of test leaders");

  auto* fd = app.add_subcommand("fd", "fundamental diagram from trajectory CSVs");
  std::string traj_dir;
  fd->add_option("--traj-dir", traj_dir, "directory of trajectory CSVs")->required();

  auto* extract = app.add_subcommand("ngsim-extract", "extract car-following events");
  std::string extract_input;
  double min_duration = 30.0, max_gap = 120.0;
  extract->add_option("--input", extract_input, "NGSIM-format CSV")->required();
  extract->add_option("--min-duration", min_duration, "minimum event duration, s");
  extract->add_option("--max-gap", max_gap, "maximum gap, m");

  CLI11_PARSE(app, argc, argv);
  args.seed_set = seed_opt->count() > 0;
  args.out_set = out_opt->count() > 0;

  try {
    if (train->parsed()) {
      ExperimentConfig cfg = resolve_config(args, "train");
      if (!train_ngsim.empty()) cfg.ngsim_file = train_ngsim;
      return run_and_report(cfg);
    }
    for (auto* sc : {het, tpen, rlpen}) {
      if (!sc->parsed()) continue;
      const std::string name = sc == het ? "heterogeneity"
                               : sc == tpen ? "t_penetration"
                                            : "rl_penetration";
      ExperimentConfig cfg = resolve_config(args, name);
      if (!policy_file.empty()) cfg.policy_file = policy_file;
      return run_and_report(cfg);
    }
    if (fuel->parsed()) {
      ExperimentConfig cfg = resolve_config(args, "fuel");
      if (!policy_file.empty()) cfg.policy_file = policy_file;
      if (!fuel_ngsim.empty()) cfg.ngsim_file = fuel_ngsim;
      if (cfg.ngsim_file.empty()) cfg.ngsim_file = "data/ngsim_fixture.csv";
      return run_and_report(cfg);
    }
    if (fd->parsed()) {
      ExperimentConfig cfg = resolve_config(args, "fd");
      cfg.trajectory_dir = traj_dir;
      return run_and_report(cfg);
    }
    if (extract->parsed()) {
      ExperimentConfig cfg = resolve_config(args, "ngsim_extract");
      std::filesystem::create_directories(cfg.out_dir);
      const NgsimData data = parse_ngsim(extract_input);
      CfCriteria criteria;
      criteria.min_duration_s = min_duration;
      criteria.max_gap_m = max_gap;
      const auto events = extract_cf_events(data, criteria);
      write_event_index(
          (std::filesystem::path(cfg.out_dir) / "cf_events.csv").string(), events);
      std::cout << "parsed " << data.vehicles.size() << " vehicles ("
                << data.skipped_rows << " rows skipped), extracted " << events.size()
                << " car-following events -> " << cfg.out_dir << "/cf_events.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
