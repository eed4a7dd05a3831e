#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "platoonlab/trajectory.hpp"

namespace platoonlab {

/// Time-space measurement cell: two sides parallel to the shockwave speed w
/// with total spatial projection extent_w_m, two sides parallel to the target
/// speed v_star with temporal projection extent_v_s.
struct Parallelogram {
  double t0 = 0.0;           // anchor time, s
  double x0 = 0.0;           // anchor position, m
  double w_kmh = -18.0;      // shockwave speed
  double v_star_kmh = 0.0;   // target speed
  double extent_w_m = 200.0;
  double extent_v_s = 5.0;

  double w_ms() const { return w_kmh / 3.6; }
  double v_star_ms() const { return v_star_kmh / 3.6; }
  /// Temporal span of the w-parallel side.
  double t_span_w() const { return extent_w_m / std::abs(w_ms()); }
  /// Total temporal footprint.
  double t_span() const { return t_span_w() + extent_v_s; }
  /// Area in m*s.
  double area() const { return extent_v_s * (extent_w_m + v_star_ms() * t_span_w()); }

  bool contains(double t, double x) const;
  bool overlaps(const Parallelogram& other) const;
};

/// Region filter and sweep settings for fundamental-diagram construction.
struct FdGeometry {
  double shockwave_kmh = -18.0;
  double extent_w_m = 200.0;
  double extent_v_s = 5.0;
  int min_vehicles = 5;
  double speed_tol_kmh = 2.5;  // half the sweep step
  double anchor_dt_s = 2.5;    // candidate grid stride in time
  double anchor_dx_m = 100.0;  // candidate grid stride in space
  double v_star_min_kmh = 0.0;
  double v_star_max_kmh = 90.0;
  double v_star_step_kmh = 5.0;
};

struct FDPoint {
  double k_veh_km = 0.0;
  double q_veh_h = 0.0;
  double v_kmh = 0.0;
  int n_vehicles = 0;
  Parallelogram region;
};

struct FDGroup {
  double v_star_kmh = 0.0;
  double mean_k_veh_km = 0.0;
  double mean_q_veh_h = 0.0;
  int n_regions = 0;
};

struct FDCurve {
  std::vector<FDGroup> groups;  // sorted by v_star
};

struct FDSummary {
  double optimal_density_veh_km = 0.0;
  double capacity_veh_h = 0.0;
};

/// Equilibrium relation from average spacing [m] and speed [km/h]:
/// k = 1000 / S, v = v_e, q = k * v_e.
std::tuple<double, double, double> micro_fd(double spacing_m, double v_e_kmh);

/// Scans a time-space anchor grid and keeps non-overlapping parallelograms
/// with at least min_vehicles traversing trajectories whose mean in-region
/// speed is within speed_tol of v_star.
std::vector<Parallelogram> generate_regions(const std::vector<Trajectory>& trajs,
                                            double v_star_kmh, const FdGeometry& cfg);

/// Edie's definitions with each vehicle's actual in-region travel time and
/// distance.
FDPoint measure_exact(const Parallelogram& region, const std::vector<Trajectory>& trajs);

/// Parallelogram approximation: every traversing vehicle contributes the
/// projections of the v_star-parallel side, so v equals v_star exactly.
FDPoint measure_approx(const Parallelogram& region, const std::vector<Trajectory>& trajs);

/// Sweeps v_star, measures every retained region exactly, and averages (k, q)
/// per target speed. Target speeds with no regions are omitted.
FDCurve fd_curve(const std::vector<Trajectory>& trajs, const FdGeometry& cfg);

/// Capacity = max mean flow; optimal density its k. Ties resolve to lower k.
FDSummary fd_summary(const FDCurve& curve);

}  // namespace platoonlab
