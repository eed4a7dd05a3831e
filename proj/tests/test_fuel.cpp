#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "platoonlab/fuel_model.hpp"

using namespace platoonlab;

namespace {

Trajectory constant_speed_trajectory(double v, double a, double duration_s,
                                     double dt = 0.1) {
  Trajectory traj;
  traj.dt = dt;
  const int n = static_cast<int>(std::llround(duration_s / dt));
  for (int k = 0; k <= n; ++k) {
    traj.samples.push_back({k * dt, v * k * dt, v, a});
  }
  return traj;
}

}  // namespace

TEST_CASE("resistance at standstill is the rolling-resistance constant") {
  FuelParams p;
  // 9.806 * 2000 * (1.750/1000) * 4.575, independent arithmetic
  CHECK(resistance(0.0, p) == doctest::Approx(157.018575).epsilon(1e-12));
}

TEST_CASE("aero term matches the SI drag form") {
  FuelParams p;
  // (rho/2) C_D C_h A_f v^2 at 20 m/s = 125.887125 N; the km/h-polynomial
  // form must agree because 3.6^2 / 25.92 = 1/2 exactly.
  const double aero = resistance(20.0, p) - resistance(0.0, p) -
                      p.g * p.mass * (p.c_r / 1000.0) * p.c1 * 72.0;
  CHECK(aero == doctest::Approx(125.887125).epsilon(1e-9));
}

TEST_CASE("aero unit-convention consistency across speeds") {
  FuelParams p;
  for (double v = 0.0; v <= 40.0; v += 1.0) {
    const double rolling = p.g * p.mass * (p.c_r / 1000.0) * (p.c1 * 3.6 * v + p.c2);
    const double aero = resistance(v, p) - rolling;
    const double si = 0.5 * p.rho * p.c_d * p.c_h * p.a_f * v * v;
    CHECK(aero == doctest::Approx(si).epsilon(1e-3));
  }
}

TEST_CASE("grade term vanishes at zero gradient") {
  FuelParams p;
  FuelParams sloped = p;
  sloped.grade = 0.05;
  CHECK(resistance(15.0, sloped) - resistance(15.0, p) ==
        doctest::Approx(p.g * p.mass * 0.05));
}

TEST_CASE("driveline power") {
  FuelParams p;
  CHECK(driveline_power(0.0, 1.0, p) == 0.0);
  CHECK(driveline_power(25.0, -4.0, p) == 0.0);  // hard braking clamps to zero
  // two algebraic routes: R * v_kmh / (3600 eta) and R * v_ms / (1000 eta)
  const double r20 = resistance(20.0, p);
  const double route1 = r20 * 72.0 / (3600.0 * p.eta_d);
  const double route2 = r20 * 20.0 / (1000.0 * p.eta_d);
  CHECK(route1 == doctest::Approx(route2).epsilon(1e-12));
  CHECK(driveline_power(20.0, 0.0, p) == doctest::Approx(7.912134208695652).epsilon(1e-12));
}

TEST_CASE("fuel rate polynomial") {
  CHECK(fuel_rate(0.0) == doctest::Approx(0.000341).epsilon(1e-12));
  CHECK(fuel_rate(10.0) == doctest::Approx(0.001024).epsilon(1e-12));
  CHECK(fuel_rate(100.0) == doctest::Approx(0.016171).epsilon(1e-12));
}

TEST_CASE("fuel rate is increasing and convex") {
  double prev = fuel_rate(0.0);
  double prev_slope = 0.0;
  for (double pw = 1.0; pw <= 200.0; pw += 1.0) {
    const double r = fuel_rate(pw);
    CHECK(r > prev);
    const double slope = r - prev;
    CHECK(slope >= prev_slope);
    prev = r;
    prev_slope = slope;
  }
}

TEST_CASE("trajectory fuel: stationary vehicle burns idle fuel") {
  FuelParams p;
  const auto [fuel, km] = trajectory_fuel(constant_speed_trajectory(0.0, 0.0, 100.0), p);
  CHECK(fuel == doctest::Approx(0.0341).epsilon(1e-9));
  CHECK(km == 0.0);
}

TEST_CASE("trajectory fuel: constant cruise composes the power and rate oracles") {
  FuelParams p;
  const auto [fuel, km] = trajectory_fuel(constant_speed_trajectory(20.0, 0.0, 100.0), p);
  CHECK(km == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fuel == doctest::Approx(0.08648792921033685).epsilon(1e-9));
}

TEST_CASE("trajectory fuel rejects degenerate input") {
  FuelParams p;
  Trajectory one;
  one.samples.push_back({0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS(trajectory_fuel(one, p));
}

TEST_CASE("idle floor holds for every trajectory") {
  FuelParams p;
  const auto traj = constant_speed_trajectory(8.0, 0.3, 50.0);
  const auto [fuel, km] = trajectory_fuel(traj, p);
  (void)km;
  CHECK(fuel >= fuel_rate(0.0) * traj.duration());
}

TEST_CASE("binned efficiency: single constant-speed trajectory fills one bin") {
  FuelParams p;
  const auto records =
      fuel_efficiency_by_bin({constant_speed_trajectory(15.0, 0.0, 60.0)}, 10.0, p);
  REQUIRE(records.size() == 1);
  CHECK(records[0].bin_lo_kmh == 50.0);  // 54 km/h
  CHECK(records[0].bin_hi_kmh == 60.0);
  CHECK(records[0].efficiency_km_per_l ==
        doctest::Approx(records[0].distance_km / records[0].fuel_l));
}

TEST_CASE("bin boundaries are half-open") {
  FuelParams p;
  // 10 km/h exactly -> [10, 20)
  const auto records =
      fuel_efficiency_by_bin({constant_speed_trajectory(10.0 / 3.6, 0.0, 30.0)}, 10.0, p);
  REQUIRE(records.size() == 1);
  CHECK(records[0].bin_lo_kmh == 10.0);
}

TEST_CASE("binned totals reproduce trajectory totals exactly") {
  FuelParams p;
  Trajectory two_speed;
  two_speed.dt = 0.1;
  for (int k = 0; k <= 600; ++k) {
    const double v = k <= 300 ? 8.0 : 22.0;
    two_speed.samples.push_back({k * 0.1, 0.0, v, 0.1});
  }
  // positions are irrelevant to fuel; keep them consistent anyway
  double x = 0.0;
  for (int k = 1; k <= 600; ++k) {
    x += two_speed.samples[k].v * 0.1;
    two_speed.samples[k].x = x;
  }
  const auto records = fuel_efficiency_by_bin({two_speed}, 10.0, p);
  REQUIRE(records.size() == 2);
  const auto [fuel, km] = trajectory_fuel(two_speed, p);
  double fuel_sum = 0.0, km_sum = 0.0;
  for (const auto& r : records) {
    fuel_sum += r.fuel_l;
    km_sum += r.distance_km;
  }
  CHECK(fuel_sum == doctest::Approx(fuel).epsilon(1e-12));
  CHECK(km_sum == doctest::Approx(km).epsilon(1e-12));
}

TEST_CASE("speeds at or above 90 km/h pool into the last bin") {
  FuelParams p;
  const auto records =
      fuel_efficiency_by_bin({constant_speed_trajectory(26.0, 0.0, 30.0)}, 10.0, p);
  REQUIRE(records.size() == 1);
  CHECK(records[0].bin_lo_kmh == 80.0);
  CHECK(records[0].bin_hi_kmh == 90.0);
}

TEST_CASE("positive acceleration fraction per bin") {
  FuelParams p;
  (void)p;
  CHECK(positive_accel_fraction_by_bin({constant_speed_trajectory(10.0, 0.0, 20.0)}, 10.0,
                                       0.0)[0]
            .fraction == 1.0);  // a = 0 counts as non-negative
  CHECK(positive_accel_fraction_by_bin({constant_speed_trajectory(10.0, -0.5, 20.0)},
                                       10.0, 0.0)[0]
            .fraction == 0.0);

  Trajectory alternating = constant_speed_trajectory(10.0, 0.0, 20.0);
  for (std::size_t i = 0; i < alternating.samples.size(); ++i) {
    alternating.samples[i].a = i % 2 == 0 ? 1.0 : -1.0;
  }
  CHECK(positive_accel_fraction_by_bin({alternating}, 10.0, 0.0)[0].fraction ==
        doctest::Approx(0.5).epsilon(1e-2));
}
