#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace platoonlab {

/// Observed car-following state. v is the ego speed [m/s], dv the relative
/// velocity leader-minus-ego [m/s], gap the bumper-to-bumper spacing [m],
/// time_gap the desired safe time gap T [s].
struct KinematicState {
  double v = 0.0;
  double dv = 0.0;
  double gap = 0.0;
  double time_gap = 1.5;
};

/// Longitudinal acceleration command, clamped to the feasible range on
/// construction.
struct Action {
  static constexpr double kMin = -4.0;  // emergency braking, dry road
  static constexpr double kMax = 2.0;   // comfortable acceleration

  double accel = 0.0;

  Action() = default;
  explicit Action(double a) : accel(std::clamp(a, kMin, kMax)) {}
};

/// Kinematic transition over one step of dt seconds. Speed is clamped at
/// zero; the gap update uses the pre-step relative velocity.
inline KinematicState step(const KinematicState& state, Action action,
                           double leader_v_next, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  KinematicState next;
  next.v = std::max(0.0, state.v + action.accel * dt);
  next.dv = leader_v_next - next.v;
  next.gap = state.gap + state.dv * dt;
  next.time_gap = state.time_gap;
  return next;
}

/// Seconds until contact at current speeds; +infinity when the gap is opening
/// or steady. Defined only for positive gaps.
inline double time_to_collision(const KinematicState& state) {
  if (!(state.gap > 0.0)) {
    throw std::domain_error("time_to_collision: gap must be positive");
  }
  if (state.dv >= 0.0) return std::numeric_limits<double>::infinity();
  return state.gap / (-state.dv);
}

inline double jerk(double a_curr, double a_prev, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("jerk: dt must be positive");
  return (a_curr - a_prev) / dt;
}

inline bool detect_collision(const KinematicState& state) { return state.gap <= 0.0; }

}  // namespace platoonlab
