#include "platoonlab/td3.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "platoonlab/platoon.hpp"

namespace platoonlab {

using json = nlohmann::json;

Eigen::Vector4d normalize_state(const KinematicState& s, const NormalizationSpec& n) {
  return {s.v / n.v_scale, s.dv / n.v_scale, s.gap / n.gap_scale, s.time_gap / n.t_scale};
}

KinematicState denormalize_state(const Eigen::Vector4d& x, const NormalizationSpec& n) {
  return {x[0] * n.v_scale, x[1] * n.v_scale, x[2] * n.gap_scale, x[3] * n.t_scale};
}

double Policy::act(const KinematicState& state) const {
  const Eigen::Vector4d x = normalize_state(state, norm);
  const double u = actor.forward(x)(0, 0);
  return denormalize_action(u, norm);
}

Action select_action(const Policy& policy, const KinematicState& state, bool explore,
                     double explore_sigma, RandomStream& rng) {
  const Eigen::Vector4d x = normalize_state(state, policy.norm);
  double u = policy.actor.forward(x)(0, 0);
  if (explore) {
    u += explore_sigma * rng.normal();
  }
  u = std::clamp(u, -1.0, 1.0);
  return Action(denormalize_action(u, policy.norm));
}

void TrainerConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0,1]");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must be in (0,1)");
  if (policy_delay < 1) throw std::invalid_argument("policy_delay must be >= 1");
  if (!(smooth_clip > 0.0)) throw std::invalid_argument("smooth_clip must be > 0");
  if (batch_size < 1 || buffer_capacity < static_cast<std::size_t>(batch_size)) {
    throw std::invalid_argument("buffer must hold at least one batch");
  }
  if (update_every < 1) throw std::invalid_argument("update_every must be >= 1");
  if (train_time_gaps.empty()) throw std::invalid_argument("need at least one time gap");
}

namespace {

void clip_grad_norm(Mlp::Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& w : grads.w) sq += w.squaredNorm();
  for (const auto& b : grads.b) sq += b.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (auto& w : grads.w) w *= scale;
  for (auto& b : grads.b) b *= scale;
}

Mlp make_actor(int hidden, RandomStream& rng) {
  return Mlp({4, hidden, hidden, 1}, Mlp::Output::Tanh, rng);
}

Mlp make_critic(int hidden, RandomStream& rng) {
  return Mlp({5, hidden, hidden, 1}, Mlp::Output::Linear, rng);
}

Eigen::MatrixXd stack_state_action(const Eigen::MatrixXd& states,
                                   const Eigen::MatrixXd& actions) {
  Eigen::MatrixXd x(5, states.cols());
  x.topRows(4) = states;
  x.bottomRows(1) = actions;
  return x;
}

}  // namespace

Td3Trainer::Td3Trainer(const TrainerConfig& cfg, const RewardConfig& reward,
                       const FuelParams& fuel)
    : cfg_(cfg), reward_(reward), fuel_(fuel) {
  cfg_.validate();
  RandomStream init_rng(derive_seed(cfg.seed, 0xA11));
  actor_ = make_actor(cfg.hidden_units, init_rng);
  critic1_ = make_critic(cfg.hidden_units, init_rng);
  critic2_ = make_critic(cfg.hidden_units, init_rng);
  // neutral start: tanh(bias) = 1/3 maps to zero acceleration in [-4, 2]
  actor_.mutable_biases().back()[0] = std::atanh(1.0 / 3.0);
  target_actor_ = actor_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;
  actor_opt_ = Adam(actor_, cfg.lr_actor);
  critic1_opt_ = Adam(critic1_, cfg.lr_critic);
  critic2_opt_ = Adam(critic2_, cfg.lr_critic);
  norm_.v_scale = reward.v_limit;
  norm_.a_min = reward.a_min;
  norm_.a_max = reward.a_max;
}

Td3Trainer::UpdateStats Td3Trainer::update(const ReplayBuffer& buffer, long step_index,
                                           RandomStream& rng) {
  UpdateStats stats;
  if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    stats.skipped = true;
    return stats;
  }
  const auto idx = buffer.sample_indices(cfg_.batch_size, rng);
  const int b = cfg_.batch_size;
  Eigen::MatrixXd states(4, b), next_states(4, b), actions(1, b);
  Eigen::RowVectorXd rewards(b), not_done(b);
  for (int i = 0; i < b; ++i) {
    const Transition& t = buffer[idx[i]];
    for (int j = 0; j < 4; ++j) {
      states(j, i) = t.state[j];
      next_states(j, i) = t.next_state[j];
    }
    actions(0, i) = t.action;
    rewards(i) = t.reward;
    not_done(i) = t.done ? 0.0 : 1.0;
  }

  // Target policy smoothing: clipped noise on the target action.
  Eigen::MatrixXd next_actions = target_actor_.forward(next_states);
  for (int i = 0; i < b; ++i) {
    const double eps = std::clamp(cfg_.smooth_sigma * rng.normal(), -cfg_.smooth_clip,
                                  cfg_.smooth_clip);
    next_actions(0, i) = std::clamp(next_actions(0, i) + eps, -1.0, 1.0);
  }
  const Eigen::MatrixXd next_input = stack_state_action(next_states, next_actions);
  const Eigen::MatrixXd q1_next = target_critic1_.forward(next_input);
  const Eigen::MatrixXd q2_next = target_critic2_.forward(next_input);
  const Eigen::RowVectorXd q_min = q1_next.cwiseMin(q2_next).row(0);
  const Eigen::RowVectorXd target =
      rewards + cfg_.gamma * not_done.cwiseProduct(q_min);

  // Both critics regress onto the shared target.
  const Eigen::MatrixXd input = stack_state_action(states, actions);
  double loss_sum = 0.0;
  for (Mlp* critic : {&critic1_, &critic2_}) {
    Mlp::Cache cache;
    const Eigen::MatrixXd q = critic->forward(input, cache);
    const Eigen::RowVectorXd err = q.row(0) - target;
    loss_sum += err.squaredNorm() / b;
    Eigen::MatrixXd grad_out = (2.0 / b) * err;
    auto grads = critic->zero_gradients();
    critic->backward(cache, grad_out, &grads);
    clip_grad_norm(grads, 10.0);
    (critic == &critic1_ ? critic1_opt_ : critic2_opt_).step(*critic, grads);
  }
  stats.critic_loss = loss_sum / 2.0;

  if (step_index % cfg_.policy_delay == 0) {
    // Deterministic policy gradient through critic 1.
    Mlp::Cache actor_cache;
    const Eigen::MatrixXd pi = actor_.forward(states, actor_cache);
    Mlp::Cache q_cache;
    const Eigen::MatrixXd q = critic1_.forward(stack_state_action(states, pi), q_cache);
    stats.actor_loss = -q.row(0).mean();
    Eigen::MatrixXd grad_q = Eigen::MatrixXd::Constant(1, b, -1.0 / b);
    const Eigen::MatrixXd grad_input = critic1_.backward(q_cache, grad_q, nullptr);
    // chain through tanh by hand so the saturation penalty can act on the
    // pre-activation, where gradients stay alive even at |pi| ~ 1
    Eigen::MatrixXd grad_pre = grad_input.bottomRows(1);
    grad_pre.array() *= 1.0 - pi.array().square();
    grad_pre.noalias() +=
        (2.0 * cfg_.pre_tanh_penalty / b) * actor_cache.pre.back();
    auto actor_grads = actor_.zero_gradients();
    actor_.backward_pre(actor_cache, grad_pre, &actor_grads);
    clip_grad_norm(actor_grads, 1.0);
    actor_opt_.step(actor_, actor_grads);

    target_actor_.polyak_from(actor_, cfg_.tau);
    target_critic1_.polyak_from(critic1_, cfg_.tau);
    target_critic2_.polyak_from(critic2_, cfg_.tau);
    stats.actor_updated = true;
  }
  return stats;
}

Policy Td3Trainer::policy() const { return Policy{actor_, norm_, ""}; }

TrainResult Td3Trainer::train(const std::vector<Trajectory>& leader_episodes) {
  if (leader_episodes.empty()) {
    throw std::invalid_argument("train: empty leader episode pool");
  }
  ReplayBuffer buffer(cfg_.buffer_capacity);
  RandomStream episode_rng(derive_seed(cfg_.seed, 0xE01));
  RandomStream action_rng(derive_seed(cfg_.seed, 0xAC7));
  RandomStream update_rng(derive_seed(cfg_.seed, 0x0BD));

  TrainResult result;
  result.episode_rewards.reserve(cfg_.episodes);
  long total_steps = 0;
  long update_steps = 0;

  for (int episode = 0; episode < cfg_.episodes; ++episode) {
    const Trajectory& leader =
        leader_episodes[episode_rng.uniform_int(leader_episodes.size())];
    if (leader.size() < 2) {
      result.episode_rewards.push_back(0.0);
      continue;
    }
    const double time_gap =
        cfg_.train_time_gaps[episode_rng.uniform_int(cfg_.train_time_gaps.size())];
    const FollowerInit init = init_follower(leader, episode_rng);

    KinematicState state{init.v, leader.front().v - init.v, init.gap, time_gap};
    double prev_accel = init.a;
    double episode_reward = 0.0;

    for (std::size_t k = 0; k + 1 < leader.size(); ++k) {
      double u;
      if (total_steps < cfg_.start_steps) {
        u = action_rng.uniform(-1.0, 1.0);
      } else {
        u = actor_.forward(normalize_state(state, norm_))(0, 0);
        u = std::clamp(u + cfg_.explore_sigma * action_rng.normal(), -1.0, 1.0);
      }
      const Action action(denormalize_action(u, norm_));
      const auto step_out =
          step_with_reward(state, action, leader[k + 1].v, prev_accel, reward_, fuel_);
      episode_reward += step_out.reward.total;

      const bool runaway = step_out.next.gap > cfg_.runaway_gap;
      Transition tr;
      const Eigen::Vector4d sn = normalize_state(state, norm_);
      const Eigen::Vector4d nn = normalize_state(step_out.next, norm_);
      for (int j = 0; j < 4; ++j) {
        tr.state[j] = sn[j];
        tr.next_state[j] = nn[j];
      }
      tr.action = u;
      tr.reward = step_out.reward.total;
      // Collisions and runaway gaps are terminal failures; bootstrap only
      // through leader-exhaustion truncation.
      tr.done = step_out.collided || runaway;
      buffer.add(tr);

      ++total_steps;
      if (total_steps >= cfg_.start_steps && total_steps % cfg_.update_every == 0) {
        update(buffer, update_steps++, update_rng);
      }

      if (step_out.collided) {
        ++result.collision_episodes;
        break;
      }
      if (runaway) break;
      state = step_out.next;
      prev_accel = action.accel;
    }
    result.episode_rewards.push_back(episode_reward);
  }

  result.normalized_rolling = normalized_rolling_rewards(result.episode_rewards);
  result.policy = policy();
  return result;
}

EvalMetrics evaluate(const Policy& policy, const std::vector<Trajectory>& test_episodes,
                     const RewardConfig& reward, const FuelParams& fuel,
                     double time_gap, std::uint64_t seed) {
  if (test_episodes.empty()) throw std::invalid_argument("evaluate: empty test set");
  EvalMetrics metrics;
  RandomStream rng(derive_seed(seed, 0xE7A));
  double reward_sum = 0.0;
  double ttc_margin_sum = 0.0;
  for (const auto& leader : test_episodes) {
    leader.validate();
    const FollowerInit init = init_follower(leader, rng);
    KinematicState state{init.v, leader.front().v - init.v, init.gap, time_gap};
    double prev_accel = init.a;
    double episode_reward = 0.0;
    double min_ttc = reward.ttc_threshold;
    bool collided = false;
    for (std::size_t k = 0; k + 1 < leader.size(); ++k) {
      const Action action(policy.act(state));
      const auto step_out =
          step_with_reward(state, action, leader[k + 1].v, prev_accel, reward, fuel);
      episode_reward += step_out.reward.total;
      if (step_out.collided) {
        collided = true;
        min_ttc = 0.0;
        break;
      }
      min_ttc = std::min(min_ttc, time_to_collision(step_out.next));
      state = step_out.next;
      prev_accel = action.accel;
    }
    metrics.episodes += 1;
    metrics.collision_count += collided ? 1 : 0;
    reward_sum += episode_reward;
    ttc_margin_sum += std::min(min_ttc, reward.ttc_threshold);
  }
  metrics.mean_reward = reward_sum / metrics.episodes;
  metrics.mean_ttc_margin = ttc_margin_sum / metrics.episodes;
  return metrics;
}

std::vector<double> normalized_rolling_rewards(const std::vector<double>& rewards,
                                               int window) {
  std::vector<double> rolling(rewards.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    running += rewards[i];
    if (i >= static_cast<std::size_t>(window)) running -= rewards[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    rolling[i] = running / static_cast<double>(n);
  }
  if (rolling.empty()) return rolling;
  const auto [lo_it, hi_it] = std::minmax_element(rolling.begin(), rolling.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi - lo;
  for (double& r : rolling) {
    r = span > 0.0 ? (r - lo) / span : 0.0;
  }
  return rolling;
}

namespace {

json mlp_to_json(const Mlp& net) {
  json layers = json::array();
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    const auto& w = net.weights()[l];
    json jw = json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < w.cols(); ++c) row.push_back(w(r, c));
      jw.push_back(std::move(row));
    }
    json jb = json::array();
    for (Eigen::Index r = 0; r < net.biases()[l].size(); ++r) {
      jb.push_back(net.biases()[l][r]);
    }
    layers.push_back(json{{"w", std::move(jw)}, {"b", std::move(jb)}});
  }
  return json{{"output", net.output_activation() == Mlp::Output::Tanh ? "tanh" : "linear"},
              {"layers", std::move(layers)}};
}

Mlp mlp_from_json(const json& j) {
  std::vector<int> sizes;
  const auto& layers = j.at("layers");
  if (layers.empty()) throw std::runtime_error("policy file: empty network");
  sizes.push_back(static_cast<int>(layers[0].at("w")[0].size()));
  for (const auto& layer : layers) {
    sizes.push_back(static_cast<int>(layer.at("w").size()));
  }
  const Mlp::Output out =
      j.at("output").get<std::string>() == "tanh" ? Mlp::Output::Tanh : Mlp::Output::Linear;
  RandomStream dummy(0);
  Mlp net(sizes, out, dummy);
  for (std::size_t l = 0; l < net.mutable_weights().size(); ++l) {
    auto& w = net.mutable_weights()[l];
    const auto& jw = layers[l].at("w");
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = jw[r][c].get<double>();
      }
    }
    auto& b = net.mutable_biases()[l];
    const auto& jb = layers[l].at("b");
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = jb[r].get<double>();
  }
  return net;
}

}  // namespace

void save_policy(const std::string& path, const Policy& policy) {
  json j;
  j["format"] = "platoonlab-policy-v1";
  j["fingerprint"] = policy.config_fingerprint;
  j["normalization"] = {{"v_scale", policy.norm.v_scale},
                        {"gap_scale", policy.norm.gap_scale},
                        {"t_scale", policy.norm.t_scale},
                        {"a_min", policy.norm.a_min},
                        {"a_max", policy.norm.a_max}};
  j["actor"] = mlp_to_json(policy.actor);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write policy file: " + path);
  out << j.dump();
}

Policy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy file: " + path);
  json j;
  in >> j;
  if (j.value("format", "") != "platoonlab-policy-v1") {
    throw std::runtime_error("unrecognized policy file format: " + path);
  }
  Policy policy;
  policy.config_fingerprint = j.value("fingerprint", "");
  const auto& n = j.at("normalization");
  policy.norm.v_scale = n.at("v_scale").get<double>();
  policy.norm.gap_scale = n.at("gap_scale").get<double>();
  policy.norm.t_scale = n.at("t_scale").get<double>();
  policy.norm.a_min = n.at("a_min").get<double>();
  policy.norm.a_max = n.at("a_max").get<double>();
  policy.actor = mlp_from_json(j.at("actor"));
  return policy;
}

}  // namespace platoonlab
