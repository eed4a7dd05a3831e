#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "platoonlab/data_io.hpp"
#include "platoonlab/edie.hpp"
#include "platoonlab/fuel_model.hpp"
#include "platoonlab/idm.hpp"
#include "platoonlab/ou_leader.hpp"
#include "platoonlab/platoon.hpp"
#include "platoonlab/reward.hpp"
#include "platoonlab/td3.hpp"

namespace platoonlab {

/// Everything a scenario run needs, serializable to a JSON config file.
/// A run is fully determined by this struct: re-running a config with the
/// same fingerprint reproduces its outputs byte for byte.
struct ExperimentConfig {
  std::string scenario = "heterogeneity";
  std::string preset = "desk";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string policy_file;
  std::string ngsim_file;      // NGSIM-format input (training / fuel comparison)
  std::string trajectory_dir;  // ad-hoc FD input

  int n_followers = 30;
  std::vector<double> heterogeneity_gaps{1.0, 1.5, 2.0};
  std::vector<double> rl_penetrations{0.0, 0.25, 0.5, 0.75, 1.0};
  double mixed_time_gap = 1.5;

  // synthetic training leaders when no NGSIM file is given
  int train_leader_pool = 40;
  double train_leader_duration_s = 60.0;
  int eval_episodes = 50;

  OuLeaderConfig leader;        // FD scenario leader profile
  OuLeaderConfig train_leader;  // training/evaluation episode profile
  RewardConfig reward;
  FuelParams fuel_params;
  TrainerConfig trainer;
  IdmParams idm;
  FdGeometry fd;

  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  void save(const std::string& path) const;

  /// FNV-1a hash of the canonical JSON form, as 16 hex digits.
  std::string fingerprint() const;
};

/// Baseline configuration for the given preset name ("desk" or "paper").
ExperimentConfig make_preset(const std::string& preset);

/// Named-column result rows plus the provenance needed to replay the run.
struct ResultTable {
  std::string scenario;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write_csv(const std::string& path) const;
};

std::string format_cell(double value);

/// All-RL platoons at each configured time gap; writes per-gap FD curve CSVs,
/// the summary table, and an overlay SVG into out_dir.
ResultTable run_heterogeneity(const ExperimentConfig& cfg);

/// Mixed time-gap compositions (60/20/20 rotations plus the equal split).
ResultTable run_t_penetration(const ExperimentConfig& cfg);

/// RL shares {0, 25, 50, 75, 100}% against IDM at the fixed mixed time gap,
/// with percent capacity gain versus the all-IDM row.
ResultTable run_rl_penetration(const ExperimentConfig& cfg);

/// Paired RL/IDM rollouts behind each test leader; per-speed-bin fuel
/// efficiency and positive-acceleration fractions for both controllers.
ResultTable run_fuel_comparison(const ExperimentConfig& cfg);

/// Trains a policy on the configured leader source; writes the policy file
/// and the per-episode reward curve CSV.
ResultTable run_train(const ExperimentConfig& cfg);

/// Ad-hoc fundamental diagram over a directory of trajectory CSVs.
ResultTable run_fd(const ExperimentConfig& cfg);

/// Dispatches on cfg.scenario.
ResultTable run_scenario(const ExperimentConfig& cfg);

}  // namespace platoonlab
