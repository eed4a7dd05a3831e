#include "platoonlab/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace platoonlab {

double f_ttc(double ttc, const RewardConfig& cfg) {
  if (ttc < 0.0) throw std::invalid_argument("f_ttc: ttc must be >= 0");
  if (ttc >= cfg.ttc_threshold) return 0.0;
  const double ratio = ttc / cfg.ttc_threshold;
  return ratio * ratio - 1.0;
}

double f_jerk(double j, const RewardConfig& cfg) {
  const double max_jerk = (cfg.a_max - cfg.a_min) / cfg.dt;
  const double normalized = std::min(std::abs(j) / max_jerk, 1.0);
  return -std::pow(normalized, 0.25);
}

double desired_gap(double v, double time_gap, const RewardConfig& cfg) {
  return cfg.s0 + v * time_gap;
}

double f_eff(double gap, double v, double time_gap, const RewardConfig& cfg) {
  if (!(gap > 0.0)) throw std::domain_error("f_eff: gap must be positive");
  const double s_star = desired_gap(v, time_gap, cfg);
  const double sigma2 = cfg.sigma * cfg.sigma;
  const double mu = std::log(s_star) + sigma2;
  // log of the lognormal density, constants cancel in the ratio
  const auto log_density = [&](double s) {
    const double z = std::log(s) - mu;
    return -std::log(s) - z * z / (2.0 * sigma2);
  };
  return std::exp(log_density(gap) - log_density(s_star));
}

double f_speed(double v, const RewardConfig& cfg) {
  if (v <= cfg.v_limit) return 0.0;
  const double excess = (v - cfg.v_limit) / cfg.v_limit;
  return -excess * excess;
}

double f_fuel(double distance, double fuel_rate, const RewardConfig& cfg) {
  if (distance < 0.0) throw std::invalid_argument("f_fuel: distance must be >= 0");
  if (!(fuel_rate > 0.0)) throw std::invalid_argument("f_fuel: fuel_rate must be > 0");
  const double log_term = std::log1p(distance / fuel_rate) / std::log(cfg.log_base_m);
  return std::pow(log_term, 5.0);
}

RewardBreakdown total_reward(double ttc_term, double eff_term, double jerk_term,
                             double speed_term, double fuel_term, bool collided,
                             const RewardConfig& cfg) {
  RewardBreakdown out;
  out.f_ttc = ttc_term;
  out.f_eff = eff_term;
  out.f_jerk = jerk_term;
  out.f_speed = speed_term;
  out.f_fuel = fuel_term;
  out.collided = collided;
  const auto& w = cfg.weights;
  if (collided) {
    out.total = w.w_collision * cfg.collision_penalty;
  } else {
    out.total = w.w_ttc * ttc_term + w.w_eff * eff_term + w.w_jerk * jerk_term +
                w.w_speed * speed_term + w.w_fuel * fuel_term;
  }
  return out;
}

}  // namespace platoonlab
