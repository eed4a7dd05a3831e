#include "platoonlab/fuel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace platoonlab {

namespace {

constexpr double kMaxBinSpeedKmh = 90.0;

int bin_count(double bin_width_kmh) {
  return static_cast<int>(std::ceil(kMaxBinSpeedKmh / bin_width_kmh - 1e-12));
}

int bin_index(double v_kmh, double bin_width_kmh) {
  const int n = bin_count(bin_width_kmh);
  const int idx = static_cast<int>(std::floor(v_kmh / bin_width_kmh));
  return std::clamp(idx, 0, n - 1);
}

}  // namespace

double resistance(double v, const FuelParams& p) {
  if (v < 0.0) throw std::invalid_argument("resistance: speed must be >= 0");
  const double v_kmh = 3.6 * v;
  const double aero = p.rho / 25.92 * p.c_d * p.c_h * p.a_f * v_kmh * v_kmh;
  const double rolling = p.g * p.mass * (p.c_r / 1000.0) * (p.c1 * v_kmh + p.c2);
  const double grade = p.g * p.mass * p.grade;
  return aero + rolling + grade;
}

double driveline_power(double v, double a, const FuelParams& p) {
  if (v < 0.0) throw std::invalid_argument("driveline_power: speed must be >= 0");
  const double v_kmh = 3.6 * v;
  const double demand = (resistance(v, p) + 1.04 * p.mass * a) / (3600.0 * p.eta_d) * v_kmh;
  return std::max(0.0, demand);
}

double fuel_rate(double power_kw) {
  if (power_kw < 0.0) throw std::invalid_argument("fuel_rate: power must be >= 0");
  return 0.000341 + 0.0000583 * power_kw + 0.000001 * power_kw * power_kw;
}

std::pair<double, double> trajectory_fuel(const Trajectory& traj, const FuelParams& p) {
  traj.validate();
  double fuel_l = 0.0;
  double distance_m = 0.0;
  // left-endpoint integration over the N-1 sample intervals
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const auto& s = traj[i];
    fuel_l += fuel_rate(driveline_power(s.v, s.a, p)) * traj.dt;
    distance_m += s.v * traj.dt;
  }
  return {fuel_l, distance_m / 1000.0};
}

std::vector<FuelRecord> fuel_efficiency_by_bin(const std::vector<Trajectory>& trajs,
                                               double bin_width_kmh,
                                               const FuelParams& p) {
  if (trajs.empty()) throw std::invalid_argument("fuel_efficiency_by_bin: no trajectories");
  if (!(bin_width_kmh > 0.0)) throw std::invalid_argument("bin width must be positive");
  const int n = bin_count(bin_width_kmh);
  std::vector<double> fuel(n, 0.0), dist(n, 0.0);
  std::vector<long> counts(n, 0);
  for (const auto& traj : trajs) {
    traj.validate();
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const auto& s = traj[i];
      const int b = bin_index(3.6 * s.v, bin_width_kmh);
      fuel[b] += fuel_rate(driveline_power(s.v, s.a, p)) * traj.dt;
      dist[b] += s.v * traj.dt / 1000.0;
      ++counts[b];
    }
  }
  std::vector<FuelRecord> out;
  for (int b = 0; b < n; ++b) {
    if (counts[b] == 0) continue;
    FuelRecord rec;
    rec.bin_lo_kmh = b * bin_width_kmh;
    rec.bin_hi_kmh = std::min((b + 1) * bin_width_kmh, kMaxBinSpeedKmh);
    rec.distance_km = dist[b];
    rec.fuel_l = fuel[b];
    rec.efficiency_km_per_l = dist[b] / fuel[b];
    out.push_back(rec);
  }
  return out;
}

std::vector<AccelFractionRecord> positive_accel_fraction_by_bin(
    const std::vector<Trajectory>& trajs, double bin_width_kmh, double threshold) {
  if (trajs.empty()) {
    throw std::invalid_argument("positive_accel_fraction_by_bin: no trajectories");
  }
  if (!(bin_width_kmh > 0.0)) throw std::invalid_argument("bin width must be positive");
  const int n = bin_count(bin_width_kmh);
  std::vector<long> hits(n, 0), counts(n, 0);
  for (const auto& traj : trajs) {
    traj.validate();
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
      const auto& s = traj[i];
      const int b = bin_index(3.6 * s.v, bin_width_kmh);
      ++counts[b];
      if (s.a >= threshold) ++hits[b];
    }
  }
  std::vector<AccelFractionRecord> out;
  for (int b = 0; b < n; ++b) {
    if (counts[b] == 0) continue;
    AccelFractionRecord rec;
    rec.bin_lo_kmh = b * bin_width_kmh;
    rec.bin_hi_kmh = std::min((b + 1) * bin_width_kmh, kMaxBinSpeedKmh);
    rec.fraction = static_cast<double>(hits[b]) / static_cast<double>(counts[b]);
    rec.n_samples = counts[b];
    out.push_back(rec);
  }
  return out;
}

}  // namespace platoonlab
