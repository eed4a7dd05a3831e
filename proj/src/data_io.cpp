#include "platoonlab/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "platoonlab/rng.hpp"

namespace platoonlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kFeetToMeters = 0.3048;
constexpr double kNgsimDt = 0.1;

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

bool parse_int(const std::string& s, long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void write_trajectory_csv(const std::string& path, int vehicle_id, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
  out << "vehicle_id,t,x,v,a\n";
  for (const auto& s : traj.samples) {
    out << vehicle_id << ',' << format_double(s.t) << ',' << format_double(s.x) << ','
        << format_double(s.v) << ',' << format_double(s.a) << '\n';
  }
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path);
  Trajectory traj;
  bool first = true;
  double prev_t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) throw std::runtime_error("malformed trajectory row in " + path);
    TrajectorySample s;
    if (!parse_double(fields[1], s.t) || !parse_double(fields[2], s.x) ||
        !parse_double(fields[3], s.v) || !parse_double(fields[4], s.a)) {
      throw std::runtime_error("malformed trajectory row in " + path);
    }
    if (!first) {
      traj.dt = s.t - prev_t;
    }
    prev_t = s.t;
    first = false;
    traj.samples.push_back(s);
  }
  traj.validate();
  return traj;
}

void write_manifest(const std::string& path, const TrajectoryManifest& manifest) {
  json j;
  j["dt"] = manifest.dt;
  j["units"] = manifest.units;
  j["seed"] = manifest.seed;
  j["controllers"] = manifest.controllers;
  j["time_gaps"] = manifest.time_gaps;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

TrajectoryManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j;
  in >> j;
  TrajectoryManifest m;
  m.dt = j.at("dt").get<double>();
  m.units = j.value("units", m.units);
  m.seed = j.value("seed", 0ULL);
  m.controllers = j.value("controllers", std::vector<std::string>{});
  m.time_gaps = j.value("time_gaps", std::vector<double>{});
  return m;
}

void write_platoon(const std::string& dir, const PlatoonResult& platoon,
                   std::uint64_t seed) {
  fs::create_directories(dir);
  TrajectoryManifest manifest;
  manifest.dt = platoon.leader.dt;
  manifest.seed = seed;

  char name[32];
  std::snprintf(name, sizeof(name), "vehicle_%03d.csv", 0);
  write_trajectory_csv((fs::path(dir) / name).string(), 0, platoon.leader);
  manifest.controllers.push_back("leader");
  manifest.time_gaps.push_back(0.0);

  for (std::size_t i = 0; i < platoon.followers.size(); ++i) {
    const auto& f = platoon.followers[i];
    std::snprintf(name, sizeof(name), "vehicle_%03zu.csv", i + 1);
    write_trajectory_csv((fs::path(dir) / name).string(), static_cast<int>(i + 1),
                         f.trajectory);
    manifest.controllers.push_back(f.controller == ControllerKind::Rl ? "rl" : "idm");
    manifest.time_gaps.push_back(f.time_gap);
  }
  write_manifest((fs::path(dir) / "manifest.json").string(), manifest);
}

std::vector<Trajectory> read_trajectory_dir(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  std::vector<Trajectory> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_trajectory_csv(f));
  if (out.empty()) throw std::runtime_error("no trajectory files in " + dir);
  return out;
}

NgsimData parse_ngsim(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open NGSIM file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw std::runtime_error("empty NGSIM file: " + path);
  }
  const auto header = split_csv_line(line);
  auto column = [&](const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      for (const auto& n : names) {
        if (lower(header[i]) == lower(n)) return static_cast<long>(i);
      }
    }
    return -1L;
  };
  const long c_id = column({"Vehicle_ID"});
  const long c_frame = column({"Frame_ID"});
  const long c_y = column({"Local_Y"});
  const long c_vel = column({"v_Vel"});
  const long c_acc = column({"v_Acc"});
  const long c_lane = column({"Lane_ID"});
  const long c_prec = column({"Preceding"});
  if (c_id < 0 || c_frame < 0 || c_y < 0 || c_vel < 0 || c_acc < 0 || c_lane < 0 ||
      c_prec < 0) {
    throw std::runtime_error("NGSIM file missing required columns: " + path);
  }
  const long needed = std::max({c_id, c_frame, c_y, c_vel, c_acc, c_lane, c_prec}) + 1;

  struct Row {
    long frame;
    double y, v, a;
    int lane, preceding;
  };
  std::map<int, std::vector<Row>> rows;
  NgsimData data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    long id, frame, lane, preceding;
    double y, v, a;
    if (static_cast<long>(fields.size()) < needed || !parse_int(fields[c_id], id) ||
        !parse_int(fields[c_frame], frame) || !parse_double(fields[c_y], y) ||
        !parse_double(fields[c_vel], v) || !parse_double(fields[c_acc], a) ||
        !parse_int(fields[c_lane], lane) || !parse_int(fields[c_prec], preceding)) {
      ++data.skipped_rows;
      continue;
    }
    rows[static_cast<int>(id)].push_back({frame, y * kFeetToMeters, v * kFeetToMeters,
                                          a * kFeetToMeters, static_cast<int>(lane),
                                          static_cast<int>(preceding)});
  }
  if (rows.empty()) throw std::runtime_error("NGSIM file has no valid rows: " + path);

  for (auto& [id, vehicle_rows] : rows) {
    std::sort(vehicle_rows.begin(), vehicle_rows.end(),
              [](const Row& a, const Row& b) { return a.frame < b.frame; });
    // keep the longest contiguous frame run
    std::size_t best_begin = 0, best_len = 1, begin = 0;
    for (std::size_t i = 1; i <= vehicle_rows.size(); ++i) {
      if (i == vehicle_rows.size() || vehicle_rows[i].frame != vehicle_rows[i - 1].frame + 1) {
        if (i - begin > best_len) {
          best_len = i - begin;
          best_begin = begin;
        }
        begin = i;
      }
    }
    NgsimVehicle vehicle;
    vehicle.id = id;
    vehicle.traj.dt = kNgsimDt;
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) {
      const Row& r = vehicle_rows[i];
      vehicle.traj.samples.push_back({r.frame * kNgsimDt, r.y, r.v, r.a});
      vehicle.lane.push_back(r.lane);
      vehicle.preceding.push_back(r.preceding);
    }
    data.vehicles.emplace(id, std::move(vehicle));
  }
  return data;
}

namespace {

Trajectory slice(const Trajectory& traj, std::size_t begin, std::size_t count) {
  Trajectory out;
  out.dt = traj.dt;
  out.samples.assign(traj.samples.begin() + begin, traj.samples.begin() + begin + count);
  return out;
}

}  // namespace

std::vector<CfEvent> extract_cf_events(const NgsimData& data, const CfCriteria& criteria) {
  std::vector<CfEvent> events;
  for (const auto& [id, follower] : data.vehicles) {
    const std::size_t n = follower.traj.size();
    std::size_t run_begin = 0;
    auto valid_at = [&](std::size_t i, int leader_id, int lane) {
      if (follower.preceding[i] != leader_id || follower.lane[i] != lane) return false;
      const auto it = data.vehicles.find(leader_id);
      if (it == data.vehicles.end()) return false;
      const NgsimVehicle& leader = it->second;
      const double t = follower.traj[i].t;
      const long j = std::lround((t - leader.traj.front().t) / leader.traj.dt);
      if (j < 0 || j >= static_cast<long>(leader.traj.size())) return false;
      if (leader.lane[j] != lane) return false;
      const double gap = leader.traj[j].x - follower.traj[i].x;
      return gap > 0.0 && gap <= criteria.max_gap_m;
    };

    while (run_begin < n) {
      const int leader_id = follower.preceding[run_begin];
      const int lane = follower.lane[run_begin];
      std::size_t run_end = run_begin;
      if (leader_id > 0) {
        while (run_end < n && valid_at(run_end, leader_id, lane)) ++run_end;
      }
      if (run_end == run_begin) {
        ++run_begin;
        continue;
      }
      const std::size_t len = run_end - run_begin;
      const double duration = (len - 1) * follower.traj.dt;
      if (duration >= criteria.min_duration_s) {
        const NgsimVehicle& leader = data.vehicles.at(leader_id);
        const double t0 = follower.traj[run_begin].t;
        const long j0 = std::lround((t0 - leader.traj.front().t) / leader.traj.dt);
        CfEvent event;
        event.leader_id = leader_id;
        event.follower_id = id;
        event.lane = lane;
        event.t_start = t0;
        event.t_end = follower.traj[run_end - 1].t;
        event.leader = slice(leader.traj, static_cast<std::size_t>(j0), len);
        event.follower = slice(follower.traj, run_begin, len);
        events.push_back(std::move(event));
      }
      run_begin = run_end;
    }
  }
  return events;
}

std::pair<std::vector<CfEvent>, std::vector<CfEvent>> split_train_test(
    const std::vector<CfEvent>& events, double ratio, std::uint64_t seed) {
  if (events.empty()) throw std::invalid_argument("split_train_test: no events");
  if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("split ratio must be in [0,1]");
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream rng(derive_seed(seed, 0x5B1));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }
  const std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * events.size()));
  std::pair<std::vector<CfEvent>, std::vector<CfEvent>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).push_back(events[order[i]]);
  }
  return out;
}

void write_event_index(const std::string& path, const std::vector<CfEvent>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write event index: " + path);
  out << "leader_id,follower_id,lane,t_start,t_end\n";
  for (const auto& e : events) {
    out << e.leader_id << ',' << e.follower_id << ',' << e.lane << ','
        << format_double(e.t_start) << ',' << format_double(e.t_end) << '\n';
  }
}

}  // namespace platoonlab
