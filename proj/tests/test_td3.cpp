#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "platoonlab/ou_leader.hpp"
#include "platoonlab/td3.hpp"

using namespace platoonlab;

namespace {

TrainerConfig tiny_trainer(std::uint64_t seed) {
  TrainerConfig cfg;
  cfg.hidden_units = 16;
  cfg.batch_size = 16;
  cfg.buffer_capacity = 4096;
  cfg.episodes = 4;
  cfg.start_steps = 64;
  cfg.seed = seed;
  return cfg;
}

ReplayBuffer random_buffer(std::size_t n, std::uint64_t seed) {
  ReplayBuffer buffer(4096);
  RandomStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    for (int j = 0; j < 4; ++j) {
      t.state[j] = rng.uniform(-1.0, 1.0);
      t.next_state[j] = rng.uniform(-1.0, 1.0);
    }
    t.action = rng.uniform(-1.0, 1.0);
    t.reward = rng.uniform(-2.0, 2.0);
    t.done = rng.uniform01() < 0.05;
    buffer.add(t);
  }
  return buffer;
}

std::vector<Trajectory> toy_leaders(int count, double duration, std::uint64_t seed) {
  std::vector<Trajectory> leaders;
  OuLeaderConfig cfg;
  cfg.total_duration_s = duration;
  cfg.phase_min_s = 10.0;
  cfg.phase_max_s = 25.0;
  for (int i = 0; i < count; ++i) {
    cfg.seed = derive_seed(seed, i);
    leaders.push_back(generate_ou_leader(cfg));
  }
  return leaders;
}

}  // namespace

TEST_CASE("state normalization round-trips") {
  NormalizationSpec n;
  const KinematicState s{12.5, -3.0, 47.0, 1.5};
  const KinematicState back = denormalize_state(normalize_state(s, n), n);
  CHECK(back.v == doctest::Approx(s.v).epsilon(1e-12));
  CHECK(back.dv == doctest::Approx(s.dv).epsilon(1e-12));
  CHECK(back.gap == doctest::Approx(s.gap).epsilon(1e-12));
  CHECK(back.time_gap == doctest::Approx(s.time_gap).epsilon(1e-12));

  const Eigen::Vector4d x = normalize_state({25.0, 0.0, 100.0, 1.0}, n);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(0.0));
  CHECK(x[2] == doctest::Approx(1.0));
  CHECK(x[3] == doctest::Approx(0.5));
}

TEST_CASE("action denormalization maps [-1,1] to the acceleration bounds") {
  NormalizationSpec n;
  CHECK(denormalize_action(-1.0, n) == doctest::Approx(-4.0));
  CHECK(denormalize_action(1.0, n) == doctest::Approx(2.0));
  CHECK(denormalize_action(0.0, n) == doctest::Approx(-1.0));
  CHECK(normalize_action(denormalize_action(0.37, n), n) == doctest::Approx(0.37));
}

TEST_CASE("select_action determinism and bounds") {
  Td3Trainer trainer(tiny_trainer(5), RewardConfig{}, FuelParams{});
  const Policy policy = trainer.policy();
  const KinematicState s{10.0, 1.0, 30.0, 1.5};
  RandomStream rng(9);
  const Action a1 = select_action(policy, s, false, 0.1, rng);
  const Action a2 = select_action(policy, s, false, 0.1, rng);
  CHECK(a1.accel == a2.accel);
  // zero-sigma exploration equals the deterministic action
  const Action a3 = select_action(policy, s, true, 0.0, rng);
  CHECK(a3.accel == a1.accel);
  for (int i = 0; i < 200; ++i) {
    const KinematicState r{rng.uniform(0, 30), rng.uniform(-10, 10),
                           rng.uniform(0.1, 150), rng.uniform(0.5, 3)};
    const Action a = select_action(policy, r, true, 0.5, rng);
    CHECK(a.accel >= -4.0);
    CHECK(a.accel <= 2.0);
  }
}

TEST_CASE("update skips when the buffer is smaller than a batch") {
  Td3Trainer trainer(tiny_trainer(6), RewardConfig{}, FuelParams{});
  ReplayBuffer buffer(64);
  RandomStream rng(1);
  const auto stats = trainer.update(buffer, 0, rng);
  CHECK(stats.skipped);
}

TEST_CASE("twin critic target uses the elementwise minimum") {
  Td3Trainer trainer(tiny_trainer(7), RewardConfig{}, FuelParams{});
  RandomStream rng(11);
  Eigen::MatrixXd states(4, 32), actions(1, 32);
  for (int c = 0; c < 32; ++c) {
    for (int r = 0; r < 4; ++r) states(r, c) = rng.uniform(-1.0, 1.0);
    actions(0, c) = rng.uniform(-1.0, 1.0);
  }
  Eigen::MatrixXd input(5, 32);
  input.topRows(4) = states;
  input.bottomRows(1) = actions;
  const Eigen::MatrixXd q1 = trainer.target_critic1().forward(input);
  const Eigen::MatrixXd q2 = trainer.target_critic2().forward(input);
  const Eigen::MatrixXd qmin = q1.cwiseMin(q2);
  for (int c = 0; c < 32; ++c) {
    CHECK(qmin(0, c) <= q1(0, c));
    CHECK(qmin(0, c) <= q2(0, c));
  }
}

TEST_CASE("actor parameters update only on delayed steps") {
  Td3Trainer trainer(tiny_trainer(8), RewardConfig{}, FuelParams{});
  ReplayBuffer buffer = random_buffer(256, 13);
  RandomStream rng(2);
  const Eigen::VectorXd before = trainer.actor().flatten();
  // policy_delay = 2: odd step indices leave the actor untouched
  const auto stats1 = trainer.update(buffer, 1, rng);
  CHECK_FALSE(stats1.actor_updated);
  CHECK((trainer.actor().flatten() - before).norm() == 0.0);
  const auto stats2 = trainer.update(buffer, 2, rng);
  CHECK(stats2.actor_updated);
  CHECK((trainer.actor().flatten() - before).norm() > 0.0);
}

TEST_CASE("terminal transitions bootstrap to the raw reward") {
  // with done=true everywhere and gamma=1, the critic target is exactly r;
  // train critics to convergence on a single repeated transition
  TrainerConfig cfg = tiny_trainer(9);
  cfg.gamma = 1.0;
  cfg.lr_critic = 1e-2;
  cfg.policy_delay = 1000000;  // critics only
  Td3Trainer trainer(cfg, RewardConfig{}, FuelParams{});
  ReplayBuffer buffer(64);
  Transition t;
  t.state = {0.1, -0.2, 0.3, 0.5};
  t.action = 0.25;
  t.reward = 1.7;
  t.done = true;
  for (int i = 0; i < 32; ++i) buffer.add(t);
  RandomStream rng(3);
  double loss = 0.0;
  for (int i = 0; i < 800; ++i) loss = trainer.update(buffer, i + 1, rng).critic_loss;
  CHECK(loss < 1e-4);
  Eigen::MatrixXd input(5, 1);
  input << 0.1, -0.2, 0.3, 0.5, 0.25;
  CHECK(trainer.critic1().forward(input)(0, 0) == doctest::Approx(1.7).epsilon(1e-2));
}

TEST_CASE("empty training returns the initial policy") {
  TrainerConfig cfg = tiny_trainer(10);
  cfg.episodes = 0;
  Td3Trainer trainer(cfg, RewardConfig{}, FuelParams{});
  const Eigen::VectorXd before = trainer.actor().flatten();
  const TrainResult result = trainer.train(toy_leaders(2, 20.0, 1));
  CHECK(result.episode_rewards.empty());
  CHECK((result.policy.actor.flatten() - before).norm() == 0.0);
}

TEST_CASE("training produces one reward per episode and is reproducible") {
  TrainerConfig cfg = tiny_trainer(11);
  cfg.episodes = 6;
  const auto leaders = toy_leaders(3, 20.0, 2);
  RewardConfig reward;
  Td3Trainer a(cfg, reward, FuelParams{});
  Td3Trainer b(cfg, reward, FuelParams{});
  const TrainResult ra = a.train(leaders);
  const TrainResult rb = b.train(leaders);
  CHECK(ra.episode_rewards.size() == 6);
  CHECK(ra.normalized_rolling.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(ra.episode_rewards[i] == rb.episode_rewards[i]);  // bit-exact
    CHECK(ra.normalized_rolling[i] >= 0.0);
    CHECK(ra.normalized_rolling[i] <= 1.0);
  }
}

TEST_CASE("evaluate flags collisions for a full-throttle policy") {
  // an untrained tiny actor with a forced positive bias accelerates into a
  // braking leader
  TrainerConfig cfg = tiny_trainer(12);
  Td3Trainer trainer(cfg, RewardConfig{}, FuelParams{});
  Policy policy = trainer.policy();
  for (auto& b : policy.actor.mutable_biases().back()) b = 50.0;  // tanh -> 1

  Trajectory leader;
  leader.dt = 0.1;
  double v = 20.0, x = 0.0;
  for (int k = 0; k <= 300; ++k) {
    leader.samples.push_back({k * 0.1, x, v, v > 0 ? -1.0 : 0.0});
    v = std::max(0.0, v - 0.1);
    x += v * 0.1;
  }
  const EvalMetrics metrics = evaluate(policy, {leader}, RewardConfig{}, FuelParams{},
                                       1.5, 42);
  CHECK(metrics.collision_count >= 1);
  CHECK_THROWS(evaluate(policy, {}, RewardConfig{}, FuelParams{}, 1.5, 42));
}

TEST_CASE("policy files round-trip") {
  Td3Trainer trainer(tiny_trainer(13), RewardConfig{}, FuelParams{});
  Policy policy = trainer.policy();
  policy.config_fingerprint = "deadbeef01020304";
  const std::string path =
      (std::filesystem::temp_directory_path() / "platoonlab_policy_test.json").string();
  save_policy(path, policy);
  const Policy loaded = load_policy(path);
  CHECK(loaded.config_fingerprint == policy.config_fingerprint);
  CHECK((loaded.actor.flatten() - policy.actor.flatten()).norm() == 0.0);
  const KinematicState s{9.0, 0.5, 22.0, 1.0};
  CHECK(loaded.act(s) == policy.act(s));
  std::filesystem::remove(path);
}

TEST_CASE("normalized rolling rewards stay in [0,1] and follow the mean") {
  std::vector<double> rewards;
  for (int i = 0; i < 250; ++i) rewards.push_back(static_cast<double>(i));
  const auto rolling = normalized_rolling_rewards(rewards, 100);
  CHECK(rolling.size() == rewards.size());
  CHECK(rolling.front() == doctest::Approx(0.0));
  CHECK(rolling.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rolling.size(); ++i) CHECK(rolling[i] >= rolling[i - 1]);
}
