#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "platoonlab/cf_env.hpp"
#include "platoonlab/mlp.hpp"
#include "platoonlab/replay.hpp"
#include "platoonlab/trajectory.hpp"

namespace platoonlab {

/// Scales mapping physical observations onto the network input range and the
/// normalized action in [-1, 1] onto physical acceleration.
struct NormalizationSpec {
  double v_scale = 25.0;    // m/s; the speed limit
  double gap_scale = 100.0; // m
  double t_scale = 2.0;     // s
  double a_min = -4.0;      // m/s^2
  double a_max = 2.0;       // m/s^2
};

Eigen::Vector4d normalize_state(const KinematicState& state, const NormalizationSpec& n);
KinematicState denormalize_state(const Eigen::Vector4d& x, const NormalizationSpec& n);

inline double denormalize_action(double u, const NormalizationSpec& n) {
  return n.a_min + (u + 1.0) * 0.5 * (n.a_max - n.a_min);
}
inline double normalize_action(double accel, const NormalizationSpec& n) {
  return 2.0 * (accel - n.a_min) / (n.a_max - n.a_min) - 1.0;
}

/// Trained deterministic actor with its embedded normalization.
struct Policy {
  Mlp actor;
  NormalizationSpec norm;
  std::string config_fingerprint;

  double act(const KinematicState& state) const;
};

void save_policy(const std::string& path, const Policy& policy);
Policy load_policy(const std::string& path);

struct TrainerConfig {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double explore_sigma = 0.2;
  double smooth_sigma = 0.2;
  double smooth_clip = 0.5;
  int batch_size = 256;
  std::size_t buffer_capacity = 200000;
  int episodes = 2000;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int hidden_units = 256;
  int start_steps = 5000;       // uniform-random warmup actions
  int update_every = 1;         // gradient updates per environment step
  double pre_tanh_penalty = 1e-3;  // keeps the actor's output layer unsaturated
  std::vector<double> train_time_gaps{1.0, 1.5, 2.0};
  double runaway_gap = 200.0; // m; ends episodes that hang back forever
  std::uint64_t seed = 0;

  void validate() const;
};

/// Exploration action: actor output plus Gaussian noise in normalized space,
/// clipped to [-1, 1], then mapped to m/s^2. Deterministic when explore=false.
Action select_action(const Policy& policy, const KinematicState& state, bool explore,
                     double explore_sigma, RandomStream& rng);

struct TrainResult {
  Policy policy;
  std::vector<double> episode_rewards;
  std::vector<double> normalized_rolling;  // min-max of the 100-episode rolling mean
  int collision_episodes = 0;
};

struct EvalMetrics {
  int episodes = 0;
  int collision_count = 0;
  double mean_reward = 0.0;
  double mean_ttc_margin = 0.0;  // per-episode min TTC, capped at the threshold
};

class Td3Trainer {
 public:
  Td3Trainer(const TrainerConfig& cfg, const RewardConfig& reward, const FuelParams& fuel);

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    bool actor_updated = false;
    bool skipped = false;  // buffer below batch size
  };

  /// One TD3 gradient step on a sampled batch. step_index drives the delayed
  /// actor/target updates.
  UpdateStats update(const ReplayBuffer& buffer, long step_index, RandomStream& rng);

  TrainResult train(const std::vector<Trajectory>& leader_episodes);

  Policy policy() const;
  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic1() const { return target_critic1_; }
  const Mlp& target_critic2() const { return target_critic2_; }

 private:
  TrainerConfig cfg_;
  RewardConfig reward_;
  FuelParams fuel_;
  Mlp actor_, critic1_, critic2_;
  Mlp target_actor_, target_critic1_, target_critic2_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  NormalizationSpec norm_;
};

/// Deterministic rollouts of a trained policy over held-out leader episodes.
EvalMetrics evaluate(const Policy& policy, const std::vector<Trajectory>& test_episodes,
                     const RewardConfig& reward, const FuelParams& fuel,
                     double time_gap, std::uint64_t seed);

/// Rolling mean over a trailing window, then min-max normalized to [0, 1].
std::vector<double> normalized_rolling_rewards(const std::vector<double>& rewards,
                                               int window = 100);

}  // namespace platoonlab
