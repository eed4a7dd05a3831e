#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "platoonlab/platoon.hpp"
#include "platoonlab/trajectory.hpp"

namespace platoonlab {

/// Sidecar describing a persisted trajectory set.
struct TrajectoryManifest {
  double dt = 0.1;
  std::string units = "s,m,m/s,m/s^2";
  std::uint64_t seed = 0;
  std::vector<std::string> controllers;  // per vehicle, "leader" | "rl" | "idm"
  std::vector<double> time_gaps;         // per vehicle
};

void write_trajectory_csv(const std::string& path, int vehicle_id, const Trajectory& traj);
/// Reads a single-vehicle trajectory file; round-trips write output bit-exactly.
Trajectory read_trajectory_csv(const std::string& path);

void write_manifest(const std::string& path, const TrajectoryManifest& manifest);
TrajectoryManifest read_manifest(const std::string& path);

/// One CSV per vehicle (vehicle_000.csv = leader) plus manifest.json.
void write_platoon(const std::string& dir, const PlatoonResult& platoon, std::uint64_t seed);
std::vector<Trajectory> read_trajectory_dir(const std::string& dir);

/// Per-frame context from an NGSIM-format file (units already metric).
struct NgsimVehicle {
  int id = 0;
  Trajectory traj;
  std::vector<int> lane;       // per sample
  std::vector<int> preceding;  // per sample, 0 = none
};

struct NgsimData {
  std::map<int, NgsimVehicle> vehicles;
  long skipped_rows = 0;
};

/// Parses the NGSIM column layout (Vehicle_ID, Frame_ID, Local_Y, v_Vel,
/// v_Acc, Lane_ID, Preceding; extra columns ignored) at 10 Hz, converting
/// feet to meters. Vehicles with interrupted frame runs keep the longest run.
NgsimData parse_ngsim(const std::string& path);

struct CfCriteria {
  double min_duration_s = 30.0;
  double max_gap_m = 120.0;
};

/// Leader-follower pair over a maximal window satisfying the criteria.
struct CfEvent {
  int leader_id = 0;
  int follower_id = 0;
  int lane = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  Trajectory leader;
  Trajectory follower;
};

/// Same lane, unchanged immediate leader, gap in (0, max_gap] throughout,
/// and duration >= min_duration. Windows broken by lane or leader changes
/// are truncated to their valid runs.
std::vector<CfEvent> extract_cf_events(const NgsimData& data, const CfCriteria& criteria);

/// Seeded shuffle then split; train gets floor(ratio * n).
std::pair<std::vector<CfEvent>, std::vector<CfEvent>> split_train_test(
    const std::vector<CfEvent>& events, double ratio, std::uint64_t seed);

void write_event_index(const std::string& path, const std::vector<CfEvent>& events);

}  // namespace platoonlab
