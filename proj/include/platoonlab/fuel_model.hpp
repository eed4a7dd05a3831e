#pragma once

#include <utility>
#include <vector>

#include "platoonlab/trajectory.hpp"

namespace platoonlab {

/// VT-CPFM-1 vehicle and environment parameters (light-duty defaults).
struct FuelParams {
  double rho = 1.225;    // air density at sea level, kg/m^3
  double c_d = 0.3;      // drag coefficient
  double c_h = 0.85;     // altitude correction factor
  double a_f = 2.015;    // frontal area, m^2
  double g = 9.806;      // m/s^2
  double c_r = 1.750;    // rolling resistance conversion factor
  double c1 = 0.0328;    // rolling resistance speed coefficient
  double c2 = 4.575;     // rolling resistance constant
  double mass = 2000.0;  // kg
  double eta_d = 0.92;   // driveline efficiency
  double grade = 0.0;    // road gradient
};

/// Aggregate fuel use for one speed bin.
struct FuelRecord {
  double bin_lo_kmh = 0.0;
  double bin_hi_kmh = 0.0;
  double distance_km = 0.0;
  double fuel_l = 0.0;
  double efficiency_km_per_l = 0.0;
};

/// Total resistance force [N] at speed v [m/s]: aerodynamic drag, rolling
/// resistance, and grade. The polynomial constants take speed in km/h.
double resistance(double v, const FuelParams& p);

/// Driveline power [kW]; zero while braking or coasting demands no propulsion.
double driveline_power(double v, double a, const FuelParams& p);

/// Instantaneous fuel consumption [L/s] as a quadratic in power [kW].
/// The constant term is the idle rate, so the result is strictly positive.
double fuel_rate(double power_kw);

/// Integrated fuel [L] and distance [km] over a trajectory.
std::pair<double, double> trajectory_fuel(const Trajectory& traj, const FuelParams& p);

/// Distance per fuel within half-open speed bins of bin_width km/h covering
/// [0, 90]; speeds at or beyond 90 km/h pool into the last bin. Bins that
/// collect no samples are omitted.
std::vector<FuelRecord> fuel_efficiency_by_bin(const std::vector<Trajectory>& trajs,
                                               double bin_width_kmh,
                                               const FuelParams& p);

struct AccelFractionRecord {
  double bin_lo_kmh = 0.0;
  double bin_hi_kmh = 0.0;
  double fraction = 0.0;
  long n_samples = 0;
};

/// Per speed bin, the fraction of timesteps with acceleration >= threshold.
std::vector<AccelFractionRecord> positive_accel_fraction_by_bin(
    const std::vector<Trajectory>& trajs, double bin_width_kmh, double threshold);

}  // namespace platoonlab
