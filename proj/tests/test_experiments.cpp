#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "platoonlab/experiments.hpp"

using namespace platoonlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Tiny but complete config: fast training, short leaders, small platoons.
ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig cfg = make_preset("desk");
  cfg.out_dir = out.string();
  cfg.seed = 3;
  cfg.n_followers = 8;
  cfg.trainer.hidden_units = 16;
  cfg.trainer.batch_size = 32;
  cfg.trainer.episodes = 4;
  cfg.trainer.start_steps = 100;
  cfg.trainer.buffer_capacity = 10000;
  cfg.train_leader_pool = 3;
  cfg.train_leader.total_duration_s = 20.0;
  cfg.leader.total_duration_s = 400.0;
  return cfg;
}

std::string fixture_path() {
  return (fs::path(PLATOONLAB_SOURCE_DIR) / "data" / "ngsim_fixture.csv").string();
}

}  // namespace

TEST_CASE("config json round-trip preserves every field") {
  ExperimentConfig cfg = make_preset("paper");
  cfg.seed = 42;
  cfg.reward.weights.w_fuel = 0.123;
  cfg.trainer.gamma = 0.95;
  cfg.fd.speed_tol_kmh = 3.0;
  cfg.idm.b = 1.7;
  cfg.leader.theta = 0.8;
  const ExperimentConfig back = ExperimentConfig::from_json_string(cfg.to_json_string());
  CHECK(back.seed == 42);
  CHECK(back.reward.weights.w_fuel == 0.123);
  CHECK(back.trainer.gamma == 0.95);
  CHECK(back.fd.speed_tol_kmh == 3.0);
  CHECK(back.idm.b == 1.7);
  CHECK(back.leader.theta == 0.8);
  CHECK(back.fingerprint() == cfg.fingerprint());
}

TEST_CASE("fingerprint ignores the output directory but tracks parameters") {
  ExperimentConfig a = make_preset("desk");
  ExperimentConfig b = a;
  b.out_dir = "somewhere/else";
  CHECK(a.fingerprint() == b.fingerprint());
  b.seed += 1;
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("presets differ in scale") {
  const ExperimentConfig desk = make_preset("desk");
  const ExperimentConfig paper = make_preset("paper");
  CHECK(desk.trainer.episodes == 200);
  CHECK(paper.trainer.episodes == 2000);
  CHECK(paper.trainer.hidden_units == 256);
  CHECK(paper.n_followers == 100);
  CHECK_THROWS(make_preset("napkin"));
}

TEST_CASE("train scenario writes a policy and a full reward curve") {
  const fs::path out = temp_dir("platoonlab_exp_train");
  ExperimentConfig cfg = tiny_config(out);
  cfg.scenario = "train";
  const ResultTable table = run_scenario(cfg);
  CHECK(table.rows.size() == 4);  // one row per episode
  CHECK(fs::exists(out / "policy.json"));
  CHECK(fs::exists(out / "reward_curve.csv"));
  const Policy policy = load_policy((out / "policy.json").string());
  CHECK(policy.config_fingerprint == cfg.fingerprint());
  for (const auto& row : table.rows) {
    const double rolling = std::stod(row[2]);
    CHECK(rolling >= 0.0);
    CHECK(rolling <= 1.0);
  }
  fs::remove_all(out);
}

TEST_CASE("fd scenario measures a stored platoon") {
  const fs::path out = temp_dir("platoonlab_exp_fd");
  // build an IDM platoon and persist it as trajectory CSVs
  OuLeaderConfig ou;
  ou.seed = 6;
  ou.total_duration_s = 1800.0;
  ou.phase_min_s = 45.0;
  ou.phase_max_s = 120.0;
  CompositionSpec spec;
  spec.n_followers = 45;
  spec.entries = {{ControllerKind::Idm, 1.5, 1.0}};
  spec.seed = 2;
  const PlatoonResult platoon =
      build_platoon(generate_ou_leader(ou), spec, nullptr, IdmParams{}, true);
  const fs::path traj_dir = out / "trajs";
  write_platoon(traj_dir.string(), platoon, 2);

  ExperimentConfig cfg = tiny_config(out / "run");
  cfg.scenario = "fd";
  cfg.trajectory_dir = traj_dir.string();
  const ResultTable table = run_scenario(cfg);
  REQUIRE(table.rows.size() == 1);
  CHECK(std::stod(table.rows[0][1]) > 0.0);  // capacity
  CHECK(fs::exists(out / "run" / "fd_curve.csv"));
  CHECK(fs::exists(out / "run" / "fd_summary.csv"));
  fs::remove_all(out);
}

TEST_CASE("rl_penetration at 0% runs without a usable policy and reproduces bit-exactly") {
  const fs::path out = temp_dir("platoonlab_exp_rl0");
  ExperimentConfig cfg = tiny_config(out / "a");
  cfg.scenario = "train";
  run_scenario(cfg);  // writes the (untrained) policy file

  ExperimentConfig pen = tiny_config(out / "b");
  pen.scenario = "rl_penetration";
  pen.policy_file = (out / "a" / "policy.json").string();
  pen.rl_penetrations = {0.0};
  pen.n_followers = 50;
  pen.leader.total_duration_s = 1800.0;
  pen.leader.phase_min_s = 45.0;
  pen.leader.phase_max_s = 120.0;
  const ResultTable table = run_scenario(pen);
  REQUIRE(table.rows.size() == 1);
  CHECK(std::stod(table.rows[0][3]) == 0.0);  // gain vs itself

  ExperimentConfig pen2 = pen;
  pen2.out_dir = (out / "c").string();
  run_scenario(pen2);
  CHECK(read_file(out / "b" / "rl_penetration.csv") ==
        read_file(out / "c" / "rl_penetration.csv"));
  fs::remove_all(out);
}

TEST_CASE("fuel comparison pairs rollouts and emits at most nine bins per side") {
  const fs::path out = temp_dir("platoonlab_exp_fuel");
  ExperimentConfig cfg = tiny_config(out / "t");
  cfg.scenario = "train";
  run_scenario(cfg);

  ExperimentConfig fuel = tiny_config(out / "f");
  fuel.scenario = "fuel";
  fuel.policy_file = (out / "t" / "policy.json").string();
  fuel.ngsim_file = fixture_path();
  const ResultTable table = run_scenario(fuel);
  CHECK(table.rows.size() >= 1);
  CHECK(table.rows.size() <= 9);
  CHECK(fs::exists(out / "f" / "fuel_comparison.csv"));
  CHECK(fs::exists(out / "f" / "fuel_efficiency.svg"));

  // determinism across replays
  ExperimentConfig fuel2 = fuel;
  fuel2.out_dir = (out / "f2").string();
  run_scenario(fuel2);
  CHECK(read_file(out / "f" / "fuel_comparison.csv") ==
        read_file(out / "f2" / "fuel_comparison.csv"));
  fs::remove_all(out);
}

TEST_CASE("scenario dispatch rejects unknown names") {
  ExperimentConfig cfg = make_preset("desk");
  cfg.scenario = "mystery";
  CHECK_THROWS(run_scenario(cfg));
}

TEST_CASE("missing policy yields an actionable error") {
  ExperimentConfig cfg = make_preset("desk");
  cfg.scenario = "heterogeneity";
  cfg.policy_file = "/nonexistent/policy.json";
  CHECK_THROWS_WITH_AS(run_scenario(cfg),
                       doctest::Contains("run the train scenario first"),
                       std::runtime_error);
}
