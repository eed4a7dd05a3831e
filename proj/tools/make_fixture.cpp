// Generates data/ngsim_fixture.csv: a small synthetic trajectory file in the
// NGSIM I-80 column layout (feet units, 10 Hz) so the full pipeline runs
// without the external dataset. Four lanes, each a lead vehicle with a staged
// speed profile plus an IDM chain behind it.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "platoonlab/idm.hpp"
#include "platoonlab/platoon.hpp"
#include "platoonlab/trajectory.hpp"

using namespace platoonlab;

namespace {

constexpr double kMetersToFeet = 1.0 / 0.3048;

struct Phase {
  double target_kmh;
  double duration_s;
};

Trajectory staged_leader(const std::vector<Phase>& phases, double v0_kmh) {
  Trajectory traj;
  traj.dt = 0.1;
  double v = v0_kmh / 3.6;
  double x = 0.0;
  double t = 0.0;
  traj.samples.push_back({t, x, v, 0.0});
  for (const auto& phase : phases) {
    const int steps = static_cast<int>(std::llround(phase.duration_s / traj.dt));
    const double target = phase.target_kmh / 3.6;
    for (int k = 0; k < steps; ++k) {
      double delta = 0.8 * (target - v) * traj.dt;
      delta = std::clamp(delta, -4.0 * traj.dt, 2.0 * traj.dt);
      const double v_next = std::max(0.0, v + delta);
      traj.samples.back().a = (v_next - v) / traj.dt;
      v = v_next;
      x += v * traj.dt;
      t += traj.dt;
      traj.samples.push_back({t, x, v, 0.0});
    }
  }
  return traj;
}

struct FixtureVehicle {
  int id;
  int lane;
  int preceding;
  Trajectory traj;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "data/ngsim_fixture.csv";

  const std::vector<std::vector<Phase>> lane_profiles = {
      // high-speed cruising, exercises the 50-90 km/h fuel bins
      {{70, 30}, {85, 40}, {60, 30}, {88, 40}, {75, 20}},
      // mid-range with a high excursion
      {{45, 25}, {65, 35}, {80, 35}, {55, 35}, {70, 30}},
      // congested stop-and-go
      {{25, 25}, {5, 25}, {35, 30}, {0, 20}, {30, 30}, {15, 30}},
      // full sweep from jam to free flow
      {{20, 25}, {50, 30}, {90, 45}, {40, 30}, {65, 30}},
  };
  const std::vector<double> follower_time_gaps = {1.2, 1.5, 1.8, 2.0};
  const std::vector<double> initial_gaps_m = {22.0, 28.0, 33.0, 26.0};

  std::vector<FixtureVehicle> vehicles;
  int next_id = 1;
  for (std::size_t lane = 0; lane < lane_profiles.size(); ++lane) {
    const Trajectory lead = staged_leader(lane_profiles[lane], 0.0);
    FixtureVehicle lv{next_id++, static_cast<int>(lane + 1), 0, lead};
    vehicles.push_back(lv);
    const Trajectory* ahead = &vehicles.back().traj;
    int ahead_id = lv.id;
    IdmParams idm;
    for (std::size_t f = 0; f < follower_time_gaps.size(); ++f) {
      idm.T = follower_time_gaps[f];
      const FollowerInit init{initial_gaps_m[f], ahead->front().v, ahead->front().a};
      RolloutResult rolled = rollout_follower(idm, *ahead, idm.T, init);
      if (rolled.collided) {
        std::cerr << "fixture follower collided; adjust profiles\n";
        return 1;
      }
      FixtureVehicle fv{next_id++, static_cast<int>(lane + 1), ahead_id,
                        std::move(rolled.trajectory)};
      vehicles.push_back(std::move(fv));
      ahead = &vehicles.back().traj;
      ahead_id = vehicles.back().id;
    }
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << "Vehicle_ID,Frame_ID,Total_Frames,Global_Time,Local_X,Local_Y,v_Length,"
         "v_Width,v_Class,v_Vel,v_Acc,Lane_ID,Preceding,Following,Space_Headway,"
         "Time_Headway\n";
  char buf[256];
  for (const auto& vehicle : vehicles) {
    const int total_frames = static_cast<int>(vehicle.traj.size());
    for (std::size_t k = 0; k < vehicle.traj.size(); ++k) {
      const auto& s = vehicle.traj.samples[k];
      // offset keeps Local_Y positive like the real data
      const double y_ft = (s.x + 500.0) * kMetersToFeet;
      const double v_ft = s.v * kMetersToFeet;
      const double a_ft = s.a * kMetersToFeet;
      const long frame = std::lround(s.t / 0.1) + 1;
      std::snprintf(buf, sizeof(buf),
                    "%d,%ld,%d,%ld,%.3f,%.3f,14.5,6.5,2,%.3f,%.3f,%d,%d,0,0.000,0.000\n",
                    vehicle.id, frame, total_frames, 1113433135300L + frame * 100,
                    6.5, y_ft, v_ft, a_ft, vehicle.lane, vehicle.preceding);
      out << buf;
    }
  }
  std::cout << "wrote " << out_path << " (" << vehicles.size() << " vehicles)\n";
  return 0;
}
