#pragma once

#include <cstdint>

#include "platoonlab/trajectory.hpp"

namespace platoonlab {

/// Staged Ornstein-Uhlenbeck leader generator: a sequence of constant-target
/// phases whose targets are drawn from {v_min, v_min+step, ..., v_max} km/h.
struct OuLeaderConfig {
  double v_min_kmh = 0.0;
  double v_max_kmh = 90.0;
  double speed_step_kmh = 5.0;
  double phase_min_s = 20.0;
  double phase_max_s = 60.0;
  double theta = 0.5;     // mean reversion rate, 1/s
  double sigma = 0.5;     // noise scale, m/s per sqrt(s)
  double total_duration_s = 900.0;
  double dt = 0.1;
  std::uint64_t seed = 0;
};

/// Deterministic given the seed. Speeds stay in [0, v_max]; per-step speed
/// changes respect the shared acceleration bounds [-4, 2] m/s^2.
Trajectory generate_ou_leader(const OuLeaderConfig& cfg);

}  // namespace platoonlab
