#pragma once

namespace platoonlab {

/// Intelligent Driver Model parameters; represents human-driven vehicles.
struct IdmParams {
  double v0 = 25.0;    // desired speed, m/s
  double T = 1.5;      // safe time gap, s
  double s0 = 2.0;     // minimum standstill gap, m
  double a = 2.0;      // maximum acceleration, m/s^2
  double b = 2.0;      // comfortable deceleration, m/s^2
  double delta = 4.0;  // acceleration exponent
};

/// IDM acceleration for ego speed v, relative velocity dv = v_leader - v_ego,
/// and bumper-to-bumper gap. Output clamped to the shared action range
/// [-4, 2] m/s^2 so both controller families face identical actuator limits.
double idm_accel(double v, double dv, double gap, const IdmParams& p);

/// Steady-state gap behind a constant-speed leader at v; diverges as v -> v0.
/// Throws for v >= v0.
double idm_equilibrium_gap(double v, const IdmParams& p);

}  // namespace platoonlab
