#include "platoonlab/ou_leader.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "platoonlab/rng.hpp"
#include "platoonlab/vehicle_dynamics.hpp"

namespace platoonlab {

Trajectory generate_ou_leader(const OuLeaderConfig& cfg) {
  if (!(cfg.v_min_kmh < cfg.v_max_kmh)) {
    throw std::invalid_argument("ou leader: v_min must be below v_max");
  }
  if (!(cfg.speed_step_kmh > 0.0) ||
      std::abs(std::remainder(cfg.v_max_kmh - cfg.v_min_kmh, cfg.speed_step_kmh)) > 1e-9) {
    throw std::invalid_argument("ou leader: speed_step must divide the speed range");
  }
  if (!(cfg.phase_min_s > 0.0) || cfg.phase_max_s < cfg.phase_min_s) {
    throw std::invalid_argument("ou leader: invalid phase duration range");
  }
  if (!(cfg.dt > 0.0) || !(cfg.total_duration_s > 0.0)) {
    throw std::invalid_argument("ou leader: dt and duration must be positive");
  }

  RandomStream rng(cfg.seed);
  const int n_steps = static_cast<int>(std::llround(cfg.total_duration_s / cfg.dt));
  const int n_targets =
      static_cast<int>(std::llround((cfg.v_max_kmh - cfg.v_min_kmh) / cfg.speed_step_kmh)) + 1;
  const double v_max = cfg.v_max_kmh / 3.6;
  const double sqrt_dt = std::sqrt(cfg.dt);

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.samples.reserve(n_steps + 1);

  double v = 0.0;
  double x = 0.0;
  double v_target = 0.0;
  int steps_left = 0;
  traj.samples.push_back({0.0, x, v, 0.0});

  for (int k = 0; k < n_steps; ++k) {
    if (steps_left == 0) {
      const int pick = static_cast<int>(rng.uniform_int(n_targets));
      v_target = (cfg.v_min_kmh + pick * cfg.speed_step_kmh) / 3.6;
      const double duration = rng.uniform(cfg.phase_min_s, cfg.phase_max_s);
      steps_left = std::max(1, static_cast<int>(std::llround(duration / cfg.dt)));
    }
    --steps_left;

    double delta = cfg.theta * (v_target - v) * cfg.dt + cfg.sigma * sqrt_dt * rng.normal();
    delta = std::clamp(delta, Action::kMin * cfg.dt, Action::kMax * cfg.dt);
    double v_next = std::clamp(v + delta, 0.0, v_max);
    const double accel = (v_next - v) / cfg.dt;
    traj.samples.back().a = accel;
    v = v_next;
    x += v * cfg.dt;
    traj.samples.push_back({(k + 1) * cfg.dt, x, v, 0.0});
  }
  return traj;
}

}  // namespace platoonlab
