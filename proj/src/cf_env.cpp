#include "platoonlab/cf_env.hpp"

namespace platoonlab {

EnvStepResult step_with_reward(const KinematicState& state, Action action,
                               double leader_v_next, double prev_accel,
                               const RewardConfig& rcfg, const FuelParams& fuel) {
  EnvStepResult out;
  out.next = step(state, action, leader_v_next, rcfg.dt);
  out.collided = detect_collision(out.next);
  if (out.collided) {
    out.reward = total_reward(0.0, 0.0, 0.0, 0.0, 0.0, true, rcfg);
    return out;
  }
  const double ttc_term = f_ttc(time_to_collision(out.next), rcfg);
  const double eff_term = f_eff(out.next.gap, out.next.v, out.next.time_gap, rcfg);
  const double jerk_term = f_jerk(jerk(action.accel, prev_accel, rcfg.dt), rcfg);
  const double speed_term = f_speed(out.next.v, rcfg);
  const double distance = out.next.v * rcfg.dt;
  const double rate = fuel_rate(driveline_power(out.next.v, action.accel, fuel));
  const double fuel_term = f_fuel(distance, rate, rcfg);
  out.reward = total_reward(ttc_term, eff_term, jerk_term, speed_term, fuel_term,
                            false, rcfg);
  return out;
}

}  // namespace platoonlab
