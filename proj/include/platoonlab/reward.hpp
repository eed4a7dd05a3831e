#pragma once

namespace platoonlab {

struct RewardWeights {
  double w_ttc = 1.0;
  double w_eff = 1.0;
  double w_jerk = 1.0;
  double w_speed = 1.0;
  double w_fuel = 1.0;
  double w_collision = 1.0;
};

struct RewardConfig {
  double ttc_threshold = 4.0;     // s
  double s0 = 2.0;                // minimum standstill gap, m
  double v_limit = 25.0;          // speed limit, m/s (90 km/h)
  double log_base_m = 10.0;       // base of the fuel-efficiency logarithm
  double sigma = 1.0;             // lognormal shape of the spacing reward
  RewardWeights weights;
  double collision_penalty = -50.0;
  double a_min = -4.0;            // m/s^2
  double a_max = 2.0;             // m/s^2
  double dt = 0.1;                // s
};

struct RewardBreakdown {
  double f_ttc = 0.0;
  double f_eff = 0.0;
  double f_jerk = 0.0;
  double f_speed = 0.0;
  double f_fuel = 0.0;
  double total = 0.0;
  bool collided = false;
};

/// Quadratic time-to-collision penalty in [-1, 0]; zero at or beyond the
/// threshold. Accepts +infinity.
double f_ttc(double ttc, const RewardConfig& cfg);

/// Comfort penalty in [-1, 0]; |jerk| is normalized by the largest swing the
/// action bounds allow in one step. Inputs beyond that clamp to -1.
double f_jerk(double j, const RewardConfig& cfg);

/// Desired space headway S* = s0 + v * T.
double desired_gap(double v, double time_gap, const RewardConfig& cfg);

/// Spacing reward in (0, 1]: lognormal density at the actual gap relative to
/// the density at the desired gap, which is the mode. gap must be positive.
double f_eff(double gap, double v, double time_gap, const RewardConfig& cfg);

/// Quadratic overspeed penalty; zero at or below the limit.
double f_speed(double v, const RewardConfig& cfg);

/// Fuel-efficiency reward: (log_m(distance / fuel_rate + 1))^5.
/// distance in m, fuel_rate in L/s (strictly positive).
double f_fuel(double distance, double fuel_rate, const RewardConfig& cfg);

/// Weighted sum of the component rewards, or the collision branch.
RewardBreakdown total_reward(double ttc_term, double eff_term, double jerk_term,
                             double speed_term, double fuel_term, bool collided,
                             const RewardConfig& cfg);

}  // namespace platoonlab
