#include "platoonlab/edie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace platoonlab {

bool Parallelogram::contains(double t, double x) const {
  const double tau = t - t0;
  const double xi = x - x0;
  const double w = w_ms();
  const double v = v_star_ms();
  // half-open strips so lattice-aligned samples belong to exactly one cell
  const double along_w = xi - w * tau;
  if (along_w < 0.0 || along_w >= extent_v_s * (v - w)) return false;
  const double along_v = v * tau - xi;
  if (along_v < 0.0 || along_v >= extent_w_m + v * t_span_w()) return false;
  return true;
}

bool Parallelogram::overlaps(const Parallelogram& other) const {
  // Same-shape parallelograms intersect iff the anchor offset, expressed in
  // the edge-vector basis, lies in (-1, 1) on both axes.
  const double dtau = other.t0 - t0;
  const double dxi = other.x0 - x0;
  const double v = v_star_ms();
  const double w = w_ms();
  const double alpha = (v * dtau - dxi) / (extent_w_m + v * t_span_w());
  const double beta = (dxi - w * dtau) / (extent_v_s * (v - w));
  return std::abs(alpha) < 1.0 && std::abs(beta) < 1.0;
}

std::tuple<double, double, double> micro_fd(double spacing_m, double v_e_kmh) {
  if (!(spacing_m > 0.0)) throw std::invalid_argument("micro_fd: spacing must be > 0");
  const double k = 1000.0 / spacing_m;
  return {k, v_e_kmh, k * v_e_kmh};
}

namespace {

/// Trajectories indexed on the shared time lattice.
struct GridView {
  double t_origin = 0.0;
  double dt = 0.1;
  struct Vehicle {
    const Trajectory* traj;
    long start;  // global index of the first sample
    long last;   // global index of the last sample
  };
  std::vector<Vehicle> vehicles;
  long first_index = 0;
  long last_index = 0;
  // per time index, the positions of the extreme vehicles present
  std::vector<double> envelope_lo, envelope_hi;

  explicit GridView(const std::vector<Trajectory>& trajs) {
    if (trajs.empty()) return;
    validate_shared_grid(trajs);
    dt = trajs.front().dt;
    t_origin = trajs.front().front().t;
    first_index = std::numeric_limits<long>::max();
    last_index = std::numeric_limits<long>::min();
    for (const auto& tr : trajs) {
      Vehicle v;
      v.traj = &tr;
      v.start = std::llround((tr.front().t - t_origin) / dt);
      v.last = v.start + static_cast<long>(tr.size()) - 1;
      first_index = std::min(first_index, v.start);
      last_index = std::max(last_index, v.last);
      vehicles.push_back(v);
    }
    const std::size_t n_cols = static_cast<std::size_t>(last_index - first_index + 1);
    envelope_lo.assign(n_cols, std::numeric_limits<double>::infinity());
    envelope_hi.assign(n_cols, -std::numeric_limits<double>::infinity());
    for (const auto& v : vehicles) {
      for (long k = v.start; k <= v.last; ++k) {
        const double x = v.traj->samples[k - v.start].x;
        const std::size_t col = static_cast<std::size_t>(k - first_index);
        envelope_lo[col] = std::min(envelope_lo[col], x);
        envelope_hi[col] = std::max(envelope_hi[col], x);
      }
    }
  }

  double time_at(long index) const { return t_origin + index * dt; }
};

/// Anchor positions x0 for which the region at t0 lies entirely inside the
/// band spanned by the trajectories. Regions hanging over the stream boundary
/// would sample empty space and bias density low. Returns an empty (inverted)
/// interval when no placement fits.
std::pair<double, double> feasible_anchor_interval(double t0, const Parallelogram& proto,
                                                   const GridView& grid) {
  const double w = proto.w_ms();
  const double v = proto.v_star_ms();
  const double side_w = proto.extent_v_s * (v - w);
  const double side_v = proto.extent_w_m + v * proto.t_span_w();
  const long k_lo = static_cast<long>(std::ceil((t0 - grid.t_origin) / grid.dt - 1e-9));
  const long k_hi = static_cast<long>(
      std::floor((t0 + proto.t_span() - grid.t_origin) / grid.dt + 1e-9));
  double x0_min = -std::numeric_limits<double>::infinity();
  double x0_max = std::numeric_limits<double>::infinity();
  if (k_lo < grid.first_index || k_hi > grid.last_index) return {1.0, 0.0};
  for (long k = k_lo; k <= k_hi; ++k) {
    const double tau = grid.time_at(k) - t0;
    const double lo = std::max(w * tau, v * tau - side_v);
    const double hi = std::min(w * tau + side_w, v * tau);
    if (hi < lo) continue;  // column outside the parallelogram footprint
    const std::size_t col = static_cast<std::size_t>(k - grid.first_index);
    x0_min = std::max(x0_min, grid.envelope_lo[col] - lo);
    x0_max = std::min(x0_max, grid.envelope_hi[col] - hi);
  }
  return {x0_min, x0_max};
}

struct RegionStats {
  double sum_travel_time = 0.0;      // veh * s
  double sum_travel_distance = 0.0;  // veh * m
  int n_traversing = 0;
  double mean_speed = 0.0;           // m/s over inside samples
  long n_inside_samples = 0;
};

RegionStats scan_region(const Parallelogram& region, const GridView& grid) {
  RegionStats stats;
  double speed_sum = 0.0;
  const long k_lo = std::max(
      grid.first_index,
      static_cast<long>(std::floor((region.t0 - grid.t_origin) / grid.dt)));
  const long k_hi = std::min(
      grid.last_index,
      static_cast<long>(std::ceil((region.t0 + region.t_span() - grid.t_origin) / grid.dt)));
  const double w = region.w_ms();
  const double side_w = region.extent_v_s * (region.v_star_ms() - w);
  const double x_lo = region.x0 - region.extent_w_m;
  const double x_hi = region.x0 + region.v_star_ms() * region.extent_v_s;

  for (const auto& veh : grid.vehicles) {
    const long lo = std::max(k_lo, veh.start);
    const long hi = std::min(k_hi, veh.last);
    if (lo > hi) continue;
    // positions are non-decreasing, so the window endpoints bracket the range
    const auto& samples = veh.traj->samples;
    if (samples[hi - veh.start].x < x_lo || samples[lo - veh.start].x > x_hi) continue;

    // x - w*tau grows strictly (v >= 0 > w), so the w-strip crossing is a
    // single run found by binary search; only that run needs the full test
    const auto along_w = [&](long k) {
      return samples[k - veh.start].x - region.x0 - w * (grid.time_at(k) - region.t0);
    };
    long entry = lo, exit = hi + 1;
    {
      long a = lo, b = hi + 1;
      while (a < b) {
        const long mid = a + (b - a) / 2;
        if (along_w(mid) < 0.0) a = mid + 1; else b = mid;
      }
      entry = a;
      b = hi + 1;
      while (a < b) {
        const long mid = a + (b - a) / 2;
        if (along_w(mid) < side_w) a = mid + 1; else b = mid;
      }
      exit = a;
    }

    // rectangle rule: every in-region sample contributes dt of presence and
    // v*dt of distance, which is unbiased on the sampling lattice
    double travel_time = 0.0;
    double travel_distance = 0.0;
    int inside_count = 0;
    for (long k = entry; k < exit; ++k) {
      const auto& s = samples[k - veh.start];
      if (region.contains(grid.time_at(k), s.x)) {
        speed_sum += s.v;
        ++stats.n_inside_samples;
        ++inside_count;
        travel_time += grid.dt;
        travel_distance += s.v * grid.dt;
      }
    }
    if (inside_count >= 2) {
      ++stats.n_traversing;
      stats.sum_travel_time += travel_time;
      stats.sum_travel_distance += travel_distance;
    }
  }
  if (stats.n_inside_samples > 0) {
    stats.mean_speed = speed_sum / static_cast<double>(stats.n_inside_samples);
  }
  return stats;
}

FDPoint point_from_totals(const Parallelogram& region, double sum_t, double sum_x,
                          int n_vehicles) {
  FDPoint p;
  p.region = region;
  p.n_vehicles = n_vehicles;
  const double area = region.area();
  p.k_veh_km = 1000.0 * sum_t / area;
  p.q_veh_h = 3600.0 * sum_x / area;
  p.v_kmh = p.k_veh_km > 0.0 ? p.q_veh_h / p.k_veh_km : 0.0;
  return p;
}

std::vector<Parallelogram> generate_on_grid(const GridView& grid, double v_star_kmh,
                                            const FdGeometry& cfg) {
  std::vector<Parallelogram> retained;
  if (grid.vehicles.empty()) return retained;

  Parallelogram proto;
  proto.w_kmh = cfg.shockwave_kmh;
  proto.v_star_kmh = v_star_kmh;
  proto.extent_w_m = cfg.extent_w_m;
  proto.extent_v_s = cfg.extent_v_s;

  const double t_begin = grid.time_at(grid.first_index);
  const double t_end = grid.time_at(grid.last_index) - proto.t_span();
  const double speed_tol_ms = cfg.speed_tol_kmh / 3.6;

  for (double t0 = t_begin; t0 <= t_end + 1e-9; t0 += cfg.anchor_dt_s) {
    const auto [x0_min, x0_max] = feasible_anchor_interval(t0, proto, grid);
    if (!(x0_min <= x0_max)) continue;
    const double x_start = std::ceil((x0_min - 1e-9) / cfg.anchor_dx_m) * cfg.anchor_dx_m;
    for (double x0 = x_start; x0 <= x0_max + 1e-9; x0 += cfg.anchor_dx_m) {
      Parallelogram candidate = proto;
      candidate.t0 = t0;
      candidate.x0 = x0;
      const RegionStats stats = scan_region(candidate, grid);
      if (stats.n_traversing < cfg.min_vehicles) continue;
      if (std::abs(stats.mean_speed - candidate.v_star_ms()) > speed_tol_ms) continue;
      bool overlapping = false;
      for (const auto& kept : retained) {
        if (candidate.overlaps(kept)) {
          overlapping = true;
          break;
        }
      }
      if (!overlapping) retained.push_back(candidate);
    }
  }
  return retained;
}

FDPoint measure_exact_on_grid(const Parallelogram& region, const GridView& grid) {
  const RegionStats stats = scan_region(region, grid);
  if (stats.n_traversing == 0) {
    throw std::runtime_error("measure_exact: no vehicle traverses the region");
  }
  return point_from_totals(region, stats.sum_travel_time, stats.sum_travel_distance,
                           stats.n_traversing);
}

}  // namespace

std::vector<Parallelogram> generate_regions(const std::vector<Trajectory>& trajs,
                                            double v_star_kmh, const FdGeometry& cfg) {
  if (trajs.empty()) return {};
  return generate_on_grid(GridView(trajs), v_star_kmh, cfg);
}

FDPoint measure_exact(const Parallelogram& region, const std::vector<Trajectory>& trajs) {
  return measure_exact_on_grid(region, GridView(trajs));
}

FDPoint measure_approx(const Parallelogram& region, const std::vector<Trajectory>& trajs) {
  const GridView grid(trajs);
  const RegionStats stats = scan_region(region, grid);
  if (stats.n_traversing == 0) {
    throw std::runtime_error("measure_approx: no vehicle traverses the region");
  }
  // constant per-vehicle contributions: the v_star side's projections
  const double t_i = region.extent_v_s;
  const double x_i = region.v_star_ms() * region.extent_v_s;
  FDPoint p = point_from_totals(region, stats.n_traversing * t_i,
                                stats.n_traversing * x_i, stats.n_traversing);
  p.v_kmh = region.v_star_kmh;
  return p;
}

FDCurve fd_curve(const std::vector<Trajectory>& trajs, const FdGeometry& cfg) {
  if (trajs.empty()) throw std::invalid_argument("fd_curve: no trajectories");
  const GridView grid(trajs);
  FDCurve curve;
  for (double v_star = cfg.v_star_min_kmh; v_star <= cfg.v_star_max_kmh + 1e-9;
       v_star += cfg.v_star_step_kmh) {
    const auto regions = generate_on_grid(grid, v_star, cfg);
    if (regions.empty()) continue;
    double k_sum = 0.0, q_sum = 0.0;
    for (const auto& region : regions) {
      const FDPoint p = measure_exact_on_grid(region, grid);
      k_sum += p.k_veh_km;
      q_sum += p.q_veh_h;
    }
    FDGroup group;
    group.v_star_kmh = v_star;
    group.n_regions = static_cast<int>(regions.size());
    group.mean_k_veh_km = k_sum / regions.size();
    group.mean_q_veh_h = q_sum / regions.size();
    curve.groups.push_back(group);
  }
  return curve;
}

FDSummary fd_summary(const FDCurve& curve) {
  if (curve.groups.empty()) throw std::invalid_argument("fd_summary: empty curve");
  FDSummary summary;
  summary.capacity_veh_h = -1.0;
  for (const auto& g : curve.groups) {
    const bool better = g.mean_q_veh_h > summary.capacity_veh_h ||
                        (g.mean_q_veh_h == summary.capacity_veh_h &&
                         g.mean_k_veh_km < summary.optimal_density_veh_km);
    if (better) {
      summary.capacity_veh_h = g.mean_q_veh_h;
      summary.optimal_density_veh_km = g.mean_k_veh_km;
    }
  }
  return summary;
}

}  // namespace platoonlab
