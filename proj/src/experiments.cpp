#include "platoonlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace platoonlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

// --------------------------------------------------------------------------
// config serialization
// --------------------------------------------------------------------------

namespace {

json weights_to_json(const RewardWeights& w) {
  return json{{"w_ttc", w.w_ttc},     {"w_eff", w.w_eff},   {"w_jerk", w.w_jerk},
              {"w_speed", w.w_speed}, {"w_fuel", w.w_fuel}, {"w_collision", w.w_collision}};
}

void weights_from_json(const json& j, RewardWeights& w) {
  w.w_ttc = j.value("w_ttc", w.w_ttc);
  w.w_eff = j.value("w_eff", w.w_eff);
  w.w_jerk = j.value("w_jerk", w.w_jerk);
  w.w_speed = j.value("w_speed", w.w_speed);
  w.w_fuel = j.value("w_fuel", w.w_fuel);
  w.w_collision = j.value("w_collision", w.w_collision);
}

json reward_to_json(const RewardConfig& r) {
  return json{{"ttc_threshold", r.ttc_threshold},
              {"s0", r.s0},
              {"v_limit", r.v_limit},
              {"log_base_m", r.log_base_m},
              {"sigma", r.sigma},
              {"weights", weights_to_json(r.weights)},
              {"collision_penalty", r.collision_penalty},
              {"a_min", r.a_min},
              {"a_max", r.a_max},
              {"dt", r.dt}};
}

void reward_from_json(const json& j, RewardConfig& r) {
  r.ttc_threshold = j.value("ttc_threshold", r.ttc_threshold);
  r.s0 = j.value("s0", r.s0);
  r.v_limit = j.value("v_limit", r.v_limit);
  r.log_base_m = j.value("log_base_m", r.log_base_m);
  r.sigma = j.value("sigma", r.sigma);
  if (j.contains("weights")) weights_from_json(j["weights"], r.weights);
  r.collision_penalty = j.value("collision_penalty", r.collision_penalty);
  r.a_min = j.value("a_min", r.a_min);
  r.a_max = j.value("a_max", r.a_max);
  r.dt = j.value("dt", r.dt);
}

json fuel_to_json(const FuelParams& f) {
  return json{{"rho", f.rho}, {"c_d", f.c_d},   {"c_h", f.c_h},     {"a_f", f.a_f},
              {"g", f.g},     {"c_r", f.c_r},   {"c1", f.c1},       {"c2", f.c2},
              {"mass", f.mass}, {"eta_d", f.eta_d}, {"grade", f.grade}};
}

void fuel_from_json(const json& j, FuelParams& f) {
  f.rho = j.value("rho", f.rho);
  f.c_d = j.value("c_d", f.c_d);
  f.c_h = j.value("c_h", f.c_h);
  f.a_f = j.value("a_f", f.a_f);
  f.g = j.value("g", f.g);
  f.c_r = j.value("c_r", f.c_r);
  f.c1 = j.value("c1", f.c1);
  f.c2 = j.value("c2", f.c2);
  f.mass = j.value("mass", f.mass);
  f.eta_d = j.value("eta_d", f.eta_d);
  f.grade = j.value("grade", f.grade);
}

json trainer_to_json(const TrainerConfig& t) {
  return json{{"gamma", t.gamma},
              {"tau", t.tau},
              {"policy_delay", t.policy_delay},
              {"explore_sigma", t.explore_sigma},
              {"smooth_sigma", t.smooth_sigma},
              {"smooth_clip", t.smooth_clip},
              {"batch_size", t.batch_size},
              {"buffer_capacity", t.buffer_capacity},
              {"episodes", t.episodes},
              {"lr_actor", t.lr_actor},
              {"lr_critic", t.lr_critic},
              {"hidden_units", t.hidden_units},
              {"start_steps", t.start_steps},
              {"update_every", t.update_every},
              {"pre_tanh_penalty", t.pre_tanh_penalty},
              {"train_time_gaps", t.train_time_gaps},
              {"runaway_gap", t.runaway_gap},
              {"seed", t.seed}};
}

void trainer_from_json(const json& j, TrainerConfig& t) {
  t.gamma = j.value("gamma", t.gamma);
  t.tau = j.value("tau", t.tau);
  t.policy_delay = j.value("policy_delay", t.policy_delay);
  t.explore_sigma = j.value("explore_sigma", t.explore_sigma);
  t.smooth_sigma = j.value("smooth_sigma", t.smooth_sigma);
  t.smooth_clip = j.value("smooth_clip", t.smooth_clip);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.buffer_capacity = j.value("buffer_capacity", t.buffer_capacity);
  t.episodes = j.value("episodes", t.episodes);
  t.lr_actor = j.value("lr_actor", t.lr_actor);
  t.lr_critic = j.value("lr_critic", t.lr_critic);
  t.hidden_units = j.value("hidden_units", t.hidden_units);
  t.start_steps = j.value("start_steps", t.start_steps);
  t.update_every = j.value("update_every", t.update_every);
  t.pre_tanh_penalty = j.value("pre_tanh_penalty", t.pre_tanh_penalty);
  t.train_time_gaps = j.value("train_time_gaps", t.train_time_gaps);
  t.runaway_gap = j.value("runaway_gap", t.runaway_gap);
  t.seed = j.value("seed", t.seed);
}

json leader_to_json(const OuLeaderConfig& o) {
  return json{{"v_min_kmh", o.v_min_kmh},
              {"v_max_kmh", o.v_max_kmh},
              {"speed_step_kmh", o.speed_step_kmh},
              {"phase_min_s", o.phase_min_s},
              {"phase_max_s", o.phase_max_s},
              {"theta", o.theta},
              {"sigma", o.sigma},
              {"total_duration_s", o.total_duration_s},
              {"dt", o.dt},
              {"seed", o.seed}};
}

void leader_from_json(const json& j, OuLeaderConfig& o) {
  o.v_min_kmh = j.value("v_min_kmh", o.v_min_kmh);
  o.v_max_kmh = j.value("v_max_kmh", o.v_max_kmh);
  o.speed_step_kmh = j.value("speed_step_kmh", o.speed_step_kmh);
  o.phase_min_s = j.value("phase_min_s", o.phase_min_s);
  o.phase_max_s = j.value("phase_max_s", o.phase_max_s);
  o.theta = j.value("theta", o.theta);
  o.sigma = j.value("sigma", o.sigma);
  o.total_duration_s = j.value("total_duration_s", o.total_duration_s);
  o.dt = j.value("dt", o.dt);
  o.seed = j.value("seed", o.seed);
}

json idm_to_json(const IdmParams& p) {
  return json{{"v0", p.v0}, {"T", p.T}, {"s0", p.s0},
              {"a", p.a},   {"b", p.b}, {"delta", p.delta}};
}

void idm_from_json(const json& j, IdmParams& p) {
  p.v0 = j.value("v0", p.v0);
  p.T = j.value("T", p.T);
  p.s0 = j.value("s0", p.s0);
  p.a = j.value("a", p.a);
  p.b = j.value("b", p.b);
  p.delta = j.value("delta", p.delta);
}

json fd_to_json(const FdGeometry& g) {
  return json{{"shockwave_kmh", g.shockwave_kmh},
              {"extent_w_m", g.extent_w_m},
              {"extent_v_s", g.extent_v_s},
              {"min_vehicles", g.min_vehicles},
              {"speed_tol_kmh", g.speed_tol_kmh},
              {"anchor_dt_s", g.anchor_dt_s},
              {"anchor_dx_m", g.anchor_dx_m},
              {"v_star_min_kmh", g.v_star_min_kmh},
              {"v_star_max_kmh", g.v_star_max_kmh},
              {"v_star_step_kmh", g.v_star_step_kmh}};
}

void fd_from_json(const json& j, FdGeometry& g) {
  g.shockwave_kmh = j.value("shockwave_kmh", g.shockwave_kmh);
  g.extent_w_m = j.value("extent_w_m", g.extent_w_m);
  g.extent_v_s = j.value("extent_v_s", g.extent_v_s);
  g.min_vehicles = j.value("min_vehicles", g.min_vehicles);
  g.speed_tol_kmh = j.value("speed_tol_kmh", g.speed_tol_kmh);
  g.anchor_dt_s = j.value("anchor_dt_s", g.anchor_dt_s);
  g.anchor_dx_m = j.value("anchor_dx_m", g.anchor_dx_m);
  g.v_star_min_kmh = j.value("v_star_min_kmh", g.v_star_min_kmh);
  g.v_star_max_kmh = j.value("v_star_max_kmh", g.v_star_max_kmh);
  g.v_star_step_kmh = j.value("v_star_step_kmh", g.v_star_step_kmh);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["policy_file"] = c.policy_file;
  j["ngsim_file"] = c.ngsim_file;
  j["trajectory_dir"] = c.trajectory_dir;
  j["n_followers"] = c.n_followers;
  j["heterogeneity_gaps"] = c.heterogeneity_gaps;
  j["rl_penetrations"] = c.rl_penetrations;
  j["mixed_time_gap"] = c.mixed_time_gap;
  j["train_leader_pool"] = c.train_leader_pool;
  j["train_leader_duration_s"] = c.train_leader_duration_s;
  j["eval_episodes"] = c.eval_episodes;
  j["leader"] = leader_to_json(c.leader);
  j["train_leader"] = leader_to_json(c.train_leader);
  j["reward"] = reward_to_json(c.reward);
  j["fuel_params"] = fuel_to_json(c.fuel_params);
  j["trainer"] = trainer_to_json(c.trainer);
  j["idm"] = idm_to_json(c.idm);
  j["fd"] = fd_to_json(c.fd);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.scenario = j.value("scenario", c.scenario);
  c.preset = j.value("preset", c.preset);
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.policy_file = j.value("policy_file", c.policy_file);
  c.ngsim_file = j.value("ngsim_file", c.ngsim_file);
  c.trajectory_dir = j.value("trajectory_dir", c.trajectory_dir);
  c.n_followers = j.value("n_followers", c.n_followers);
  c.heterogeneity_gaps = j.value("heterogeneity_gaps", c.heterogeneity_gaps);
  c.rl_penetrations = j.value("rl_penetrations", c.rl_penetrations);
  c.mixed_time_gap = j.value("mixed_time_gap", c.mixed_time_gap);
  c.train_leader_pool = j.value("train_leader_pool", c.train_leader_pool);
  c.train_leader_duration_s = j.value("train_leader_duration_s", c.train_leader_duration_s);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  if (j.contains("leader")) leader_from_json(j["leader"], c.leader);
  if (j.contains("train_leader")) leader_from_json(j["train_leader"], c.train_leader);
  if (j.contains("reward")) reward_from_json(j["reward"], c.reward);
  if (j.contains("fuel_params")) fuel_from_json(j["fuel_params"], c.fuel_params);
  if (j.contains("trainer")) trainer_from_json(j["trainer"], c.trainer);
  if (j.contains("idm")) idm_from_json(j["idm"], c.idm);
  if (j.contains("fd")) fd_from_json(j["fd"], c.fd);
  return c;
}

}  // namespace

std::string ExperimentConfig::to_json_string() const { return config_to_json(*this).dump(2); }

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << to_json_string() << '\n';
}

std::string ExperimentConfig::fingerprint() const {
  // output location does not affect results
  json j = config_to_json(*this);
  j["out_dir"] = "";
  const std::string text = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ExperimentConfig make_preset(const std::string& preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;

  // Experiment reward weighting; the spacing term leads, fuel is rescaled to
  // the same order of magnitude as the other terms, and collisions dominate.
  cfg.reward.weights.w_ttc = 1.0;
  cfg.reward.weights.w_eff = 2.0;
  cfg.reward.weights.w_jerk = 0.5;
  cfg.reward.weights.w_speed = 1.0;
  cfg.reward.weights.w_fuel = 0.002;
  cfg.reward.weights.w_collision = 2.0;

  if (preset == "desk") {
    // 60 followers: the 200 m x 5 s measurement cell needs the platoon band
    // wider than extent_w + v* * t_span_w (~600-1200 m) to fit inside it
    cfg.n_followers = 60;
    cfg.trainer.episodes = 200;
    cfg.trainer.hidden_units = 64;
    cfg.trainer.batch_size = 128;
    cfg.trainer.buffer_capacity = 100000;
    cfg.trainer.start_steps = 10000;
    cfg.train_leader_pool = 40;
    cfg.train_leader_duration_s = 60.0;
    cfg.leader.total_duration_s = 5400.0;
    cfg.leader.phase_min_s = 45.0;
    cfg.leader.phase_max_s = 120.0;
    cfg.train_leader.total_duration_s = 60.0;
    cfg.train_leader.phase_min_s = 10.0;
    cfg.train_leader.phase_max_s = 30.0;
  } else if (preset == "paper") {
    cfg.n_followers = 100;
    cfg.trainer.episodes = 2000;
    cfg.trainer.hidden_units = 256;
    cfg.trainer.batch_size = 256;
    cfg.trainer.buffer_capacity = 200000;
    cfg.trainer.start_steps = 5000;
    cfg.train_leader_pool = 100;
    cfg.train_leader_duration_s = 120.0;
    cfg.leader.total_duration_s = 900.0;
    cfg.leader.phase_min_s = 20.0;
    cfg.leader.phase_max_s = 60.0;
    cfg.train_leader.total_duration_s = 120.0;
    cfg.train_leader.phase_min_s = 15.0;
    cfg.train_leader.phase_max_s = 45.0;
  } else {
    throw std::invalid_argument("unknown preset: " + preset);
  }
  return cfg;
}

// --------------------------------------------------------------------------
// result table + svg output
// --------------------------------------------------------------------------

std::string format_cell(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void ResultTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write result table: " + path);
  out << "# scenario=" << scenario << "\n";
  out << "# fingerprint=" << fingerprint << "\n";
  out << "# seed=" << seed << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
  }
}

namespace {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Minimal scatter+line chart, enough for FD overlays and fuel curves.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series) {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  y_min = std::min(y_min, 0.0);

  const double width = 640, height = 440, left = 70, right = 20, top = 40, bottom = 50;
  const auto sx = [&](double x) {
    return left + (x - x_min) / (x_max - x_min) * (width - left - right);
  };
  const auto sy = [&](double y) {
    return height - bottom - (y - y_min) / (y_max - y_min) * (height - top - bottom);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.4g", fx);
    out << "<text x=\"" << sx(fx) << "\" y=\"" << height - bottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
    std::snprintf(label, sizeof(label), "%.4g", fy);
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  }
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (top + height - bottom) / 2 << ")\">" << y_label << "</text>\n";

  double legend_y = top + 6;
  for (const auto& s : series) {
    std::ostringstream poly;
    for (const auto& [x, y] : s.points) {
      poly << sx(x) << ',' << sy(y) << ' ';
    }
    out << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"/>\n";
    for (const auto& [x, y] : s.points) {
      out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2.5\" fill=\""
          << s.color << "\"/>\n";
    }
    out << "<rect x=\"" << width - right - 150 << "\" y=\"" << legend_y - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << width - right - 133 << "\" y=\"" << legend_y + 1
        << "\" font-size=\"11\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

const char* kSeriesColors[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2"};

void write_fd_curve_csv(const std::string& path, const FDCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fd curve: " + path);
  out << "v_star_kmh,mean_k_veh_km,mean_q_veh_h,n_regions\n";
  for (const auto& g : curve.groups) {
    out << format_cell(g.v_star_kmh) << ',' << format_cell(g.mean_k_veh_km) << ','
        << format_cell(g.mean_q_veh_h) << ',' << g.n_regions << '\n';
  }
}

Policy load_policy_or_fail(const ExperimentConfig& cfg) {
  if (cfg.policy_file.empty() || !fs::exists(cfg.policy_file)) {
    throw std::runtime_error(
        "no trained policy at '" + cfg.policy_file +
        "'; run the train scenario first and point policy_file at its output");
  }
  return load_policy(cfg.policy_file);
}

ResultTable new_table(const ExperimentConfig& cfg) {
  ResultTable table;
  table.scenario = cfg.scenario;
  table.fingerprint = cfg.fingerprint();
  table.seed = cfg.seed;
  return table;
}

struct FdRun {
  FDCurve curve;
  FDSummary summary;
};

FdRun platoon_fd(const ExperimentConfig& cfg, const CompositionSpec& spec,
                 const Policy* policy, const Trajectory& leader) {
  const PlatoonResult platoon = build_platoon(leader, spec, policy, cfg.idm, true);
  FdRun run;
  run.curve = fd_curve(platoon.all_trajectories(), cfg.fd);
  run.summary = fd_summary(run.curve);
  return run;
}

Trajectory scenario_leader(const ExperimentConfig& cfg) {
  OuLeaderConfig leader_cfg = cfg.leader;
  leader_cfg.seed = derive_seed(cfg.seed, 0x1EAD);
  return generate_ou_leader(leader_cfg);
}

}  // namespace

// --------------------------------------------------------------------------
// scenarios
// --------------------------------------------------------------------------

ResultTable run_heterogeneity(const ExperimentConfig& cfg) {
  const Policy policy = load_policy_or_fail(cfg);
  fs::create_directories(cfg.out_dir);
  const Trajectory leader = scenario_leader(cfg);

  ResultTable table = new_table(cfg);
  table.columns = {"time_gap_s", "optimal_density_veh_km", "capacity_veh_h"};
  std::vector<SvgSeries> series;
  for (std::size_t i = 0; i < cfg.heterogeneity_gaps.size(); ++i) {
    const double T = cfg.heterogeneity_gaps[i];
    CompositionSpec spec;
    spec.n_followers = cfg.n_followers;
    spec.entries = {{ControllerKind::Rl, T, 1.0}};
    spec.seed = derive_seed(cfg.seed, 0xC0F + i);
    const FdRun run = platoon_fd(cfg, spec, &policy, leader);

    char name[64];
    std::snprintf(name, sizeof(name), "fd_curve_T%.1f.csv", T);
    write_fd_curve_csv((fs::path(cfg.out_dir) / name).string(), run.curve);

    SvgSeries s;
    std::snprintf(name, sizeof(name), "T = %.1f s", T);
    s.label = name;
    s.color = kSeriesColors[i % std::size(kSeriesColors)];
    for (const auto& g : run.curve.groups) {
      s.points.push_back({g.mean_k_veh_km, g.mean_q_veh_h});
    }
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));

    table.rows.push_back({format_cell(T), format_cell(run.summary.optimal_density_veh_km),
                          format_cell(run.summary.capacity_veh_h)});
  }
  write_svg_chart((fs::path(cfg.out_dir) / "heterogeneity_fd.svg").string(),
                  "Flow-density by time gap", "density [veh/km]", "flow [veh/h]", series);
  table.write_csv((fs::path(cfg.out_dir) / "heterogeneity.csv").string());
  return table;
}

ResultTable run_t_penetration(const ExperimentConfig& cfg) {
  const Policy policy = load_policy_or_fail(cfg);
  fs::create_directories(cfg.out_dir);
  if (cfg.heterogeneity_gaps.size() != 3) {
    throw std::invalid_argument("t_penetration expects exactly three time gaps");
  }
  const Trajectory leader = scenario_leader(cfg);
  const std::vector<std::array<double, 3>> mixes = {
      {0.60, 0.20, 0.20}, {0.20, 0.60, 0.20}, {0.34, 0.33, 0.33}, {0.20, 0.20, 0.60}};

  ResultTable table = new_table(cfg);
  table.columns = {"share_T1", "share_T2", "share_T3", "optimal_density_veh_km",
                   "capacity_veh_h"};
  for (std::size_t i = 0; i < mixes.size(); ++i) {
    CompositionSpec spec;
    spec.n_followers = cfg.n_followers;
    for (std::size_t g = 0; g < 3; ++g) {
      spec.entries.push_back({ControllerKind::Rl, cfg.heterogeneity_gaps[g], mixes[i][g]});
    }
    spec.seed = derive_seed(cfg.seed, 0x7E0 + i);
    const FdRun run = platoon_fd(cfg, spec, &policy, leader);
    table.rows.push_back({format_cell(mixes[i][0]), format_cell(mixes[i][1]),
                          format_cell(mixes[i][2]),
                          format_cell(run.summary.optimal_density_veh_km),
                          format_cell(run.summary.capacity_veh_h)});
  }
  table.write_csv((fs::path(cfg.out_dir) / "t_penetration.csv").string());
  return table;
}

ResultTable run_rl_penetration(const ExperimentConfig& cfg) {
  const Policy policy = load_policy_or_fail(cfg);
  fs::create_directories(cfg.out_dir);
  const Trajectory leader = scenario_leader(cfg);

  ResultTable table = new_table(cfg);
  table.columns = {"rl_share", "optimal_density_veh_km", "capacity_veh_h",
                   "capacity_gain_pct"};
  std::vector<double> capacities;
  std::vector<double> densities;
  for (std::size_t i = 0; i < cfg.rl_penetrations.size(); ++i) {
    const double p = cfg.rl_penetrations[i];
    CompositionSpec spec;
    spec.n_followers = cfg.n_followers;
    if (p > 0.0) spec.entries.push_back({ControllerKind::Rl, cfg.mixed_time_gap, p});
    if (p < 1.0) spec.entries.push_back({ControllerKind::Idm, cfg.mixed_time_gap, 1.0 - p});
    spec.seed = derive_seed(cfg.seed, 0x9E0 + i);
    const FdRun run = platoon_fd(cfg, spec, &policy, leader);
    capacities.push_back(run.summary.capacity_veh_h);
    densities.push_back(run.summary.optimal_density_veh_km);
  }
  const double base = capacities.front();
  for (std::size_t i = 0; i < capacities.size(); ++i) {
    const double gain = base > 0.0 ? (capacities[i] - base) / base * 100.0 : 0.0;
    table.rows.push_back({format_cell(cfg.rl_penetrations[i]), format_cell(densities[i]),
                          format_cell(capacities[i]), format_cell(gain)});
  }
  table.write_csv((fs::path(cfg.out_dir) / "rl_penetration.csv").string());
  return table;
}

ResultTable run_fuel_comparison(const ExperimentConfig& cfg) {
  const Policy policy = load_policy_or_fail(cfg);
  fs::create_directories(cfg.out_dir);
  if (cfg.ngsim_file.empty()) {
    throw std::invalid_argument("fuel comparison needs ngsim_file (test leader source)");
  }
  const NgsimData data = parse_ngsim(cfg.ngsim_file);
  const auto events = extract_cf_events(data, CfCriteria{});
  if (events.empty()) throw std::runtime_error("fuel comparison: no car-following events");
  const auto [train_events, test_events] = split_train_test(events, 0.7, cfg.seed);
  const auto& leaders = test_events.empty() ? train_events : test_events;

  RandomStream rng(derive_seed(cfg.seed, 0xF0E1));
  std::vector<Trajectory> rl_trajs, idm_trajs;
  const double T = cfg.mixed_time_gap;
  for (const auto& event : leaders) {
    const FollowerInit init = init_follower(event.leader, rng);
    auto rl = rollout_follower(policy, event.leader, T, init);
    auto idm = rollout_follower(cfg.idm, event.leader, T, init);
    if (rl.trajectory.size() >= 2) rl_trajs.push_back(std::move(rl.trajectory));
    if (idm.trajectory.size() >= 2) idm_trajs.push_back(std::move(idm.trajectory));
  }
  if (rl_trajs.empty() || idm_trajs.empty()) {
    throw std::runtime_error("fuel comparison: no usable rollouts");
  }

  const auto rl_fuel = fuel_efficiency_by_bin(rl_trajs, 10.0, cfg.fuel_params);
  const auto idm_fuel = fuel_efficiency_by_bin(idm_trajs, 10.0, cfg.fuel_params);
  const auto rl_accel = positive_accel_fraction_by_bin(rl_trajs, 10.0, 0.0);
  const auto idm_accel = positive_accel_fraction_by_bin(idm_trajs, 10.0, 0.0);

  const auto find_fuel = [](const std::vector<FuelRecord>& recs, double lo) -> const FuelRecord* {
    for (const auto& r : recs)
      if (std::abs(r.bin_lo_kmh - lo) < 1e-9) return &r;
    return nullptr;
  };
  const auto find_accel =
      [](const std::vector<AccelFractionRecord>& recs, double lo) -> const AccelFractionRecord* {
    for (const auto& r : recs)
      if (std::abs(r.bin_lo_kmh - lo) < 1e-9) return &r;
    return nullptr;
  };

  ResultTable table = new_table(cfg);
  table.columns = {"bin_lo_kmh",       "bin_hi_kmh",      "rl_km_per_l",
                   "idm_km_per_l",     "rl_pos_accel_frac", "idm_pos_accel_frac"};
  SvgSeries rl_series{"RL", kSeriesColors[2], {}};
  SvgSeries idm_series{"IDM", kSeriesColors[3], {}};
  for (int b = 0; b < 9; ++b) {
    const double lo = b * 10.0;
    const FuelRecord* rf = find_fuel(rl_fuel, lo);
    const FuelRecord* mf = find_fuel(idm_fuel, lo);
    const AccelFractionRecord* ra = find_accel(rl_accel, lo);
    const AccelFractionRecord* ma = find_accel(idm_accel, lo);
    if (!rf && !mf) continue;
    table.rows.push_back({format_cell(lo), format_cell(lo + 10.0),
                          rf ? format_cell(rf->efficiency_km_per_l) : "",
                          mf ? format_cell(mf->efficiency_km_per_l) : "",
                          ra ? format_cell(ra->fraction) : "",
                          ma ? format_cell(ma->fraction) : ""});
    if (rf) rl_series.points.push_back({lo + 5.0, rf->efficiency_km_per_l});
    if (mf) idm_series.points.push_back({lo + 5.0, mf->efficiency_km_per_l});
  }
  write_svg_chart((fs::path(cfg.out_dir) / "fuel_efficiency.svg").string(),
                  "Fuel efficiency by speed bin", "speed bin center [km/h]",
                  "efficiency [km/L]", {rl_series, idm_series});
  table.write_csv((fs::path(cfg.out_dir) / "fuel_comparison.csv").string());
  return table;
}

ResultTable run_train(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);

  std::vector<Trajectory> pool;
  if (!cfg.ngsim_file.empty()) {
    const NgsimData data = parse_ngsim(cfg.ngsim_file);
    const auto events = extract_cf_events(data, CfCriteria{});
    if (events.empty()) throw std::runtime_error("train: no car-following events");
    const auto [train_events, test_events] = split_train_test(events, 0.7, cfg.seed);
    for (const auto& e : train_events) pool.push_back(e.leader);
  } else {
    OuLeaderConfig leader_cfg = cfg.train_leader;
    for (int i = 0; i < cfg.train_leader_pool; ++i) {
      leader_cfg.seed = derive_seed(cfg.seed, 0x1000 + i);
      pool.push_back(generate_ou_leader(leader_cfg));
    }
  }

  TrainerConfig trainer_cfg = cfg.trainer;
  trainer_cfg.seed = derive_seed(cfg.seed, 0x7A31);
  Td3Trainer trainer(trainer_cfg, cfg.reward, cfg.fuel_params);
  TrainResult result = trainer.train(pool);
  result.policy.config_fingerprint = cfg.fingerprint();

  const std::string policy_path = (fs::path(cfg.out_dir) / "policy.json").string();
  save_policy(policy_path, result.policy);

  ResultTable table = new_table(cfg);
  table.columns = {"episode", "raw_reward", "normalized_rolling_reward"};
  for (std::size_t i = 0; i < result.episode_rewards.size(); ++i) {
    table.rows.push_back({format_cell(static_cast<double>(i)),
                          format_cell(result.episode_rewards[i]),
                          format_cell(result.normalized_rolling[i])});
  }
  table.write_csv((fs::path(cfg.out_dir) / "reward_curve.csv").string());

  SvgSeries curve{"normalized rolling reward", kSeriesColors[2], {}};
  for (std::size_t i = 0; i < result.normalized_rolling.size(); ++i) {
    curve.points.push_back({static_cast<double>(i), result.normalized_rolling[i]});
  }
  write_svg_chart((fs::path(cfg.out_dir) / "reward_curve.svg").string(),
                  "Training reward", "episode", "normalized rolling reward", {curve});
  return table;
}

ResultTable run_fd(const ExperimentConfig& cfg) {
  if (cfg.trajectory_dir.empty()) {
    throw std::invalid_argument("fd scenario needs trajectory_dir");
  }
  fs::create_directories(cfg.out_dir);
  const auto trajs = read_trajectory_dir(cfg.trajectory_dir);
  const FDCurve curve = fd_curve(trajs, cfg.fd);
  const FDSummary summary = fd_summary(curve);
  write_fd_curve_csv((fs::path(cfg.out_dir) / "fd_curve.csv").string(), curve);

  ResultTable table = new_table(cfg);
  table.columns = {"optimal_density_veh_km", "capacity_veh_h"};
  table.rows.push_back({format_cell(summary.optimal_density_veh_km),
                        format_cell(summary.capacity_veh_h)});
  table.write_csv((fs::path(cfg.out_dir) / "fd_summary.csv").string());
  return table;
}

ResultTable run_scenario(const ExperimentConfig& cfg) {
  if (cfg.scenario == "train") return run_train(cfg);
  if (cfg.scenario == "heterogeneity") return run_heterogeneity(cfg);
  if (cfg.scenario == "t_penetration") return run_t_penetration(cfg);
  if (cfg.scenario == "rl_penetration") return run_rl_penetration(cfg);
  if (cfg.scenario == "fuel") return run_fuel_comparison(cfg);
  if (cfg.scenario == "fd") return run_fd(cfg);
  throw std::invalid_argument("unknown scenario: " + cfg.scenario);
}

}  // namespace platoonlab
