#pragma once

#include "platoonlab/fuel_model.hpp"
#include "platoonlab/reward.hpp"
#include "platoonlab/vehicle_dynamics.hpp"

namespace platoonlab {

/// Car-following episode mechanics shared by training, evaluation, and
/// paired-rollout experiments: one kinematic step plus the reward computed
/// from the post-step state and the applied action.
struct EnvStepResult {
  KinematicState next;
  RewardBreakdown reward;
  bool collided = false;
};

EnvStepResult step_with_reward(const KinematicState& state, Action action,
                               double leader_v_next, double prev_accel,
                               const RewardConfig& rcfg, const FuelParams& fuel);

}  // namespace platoonlab
