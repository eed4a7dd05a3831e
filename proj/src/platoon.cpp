#include "platoonlab/platoon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace platoonlab {

void CompositionSpec::validate() const {
  if (n_followers < 1) throw std::invalid_argument("composition: n_followers must be >= 1");
  if (entries.empty()) throw std::invalid_argument("composition: no entries");
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.share < 0.0) throw std::invalid_argument("composition: negative share");
    if (!(e.time_gap > 0.0)) throw std::invalid_argument("composition: time gap must be > 0");
    total += e.share;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("composition: shares must sum to 1");
  }
}

FollowerInit init_follower(const Trajectory& leader, RandomStream& rng) {
  if (leader.empty()) throw std::invalid_argument("init_follower: empty leader");
  FollowerInit init;
  init.gap = rng.uniform(10.0, 50.0);
  init.v = leader.front().v;
  init.a = leader.front().a;
  return init;
}

namespace {

template <typename ControlFn>
RolloutResult rollout_impl(const Trajectory& leader, double time_gap,
                           const FollowerInit& init, ControlFn control) {
  leader.validate();
  const double dt = leader.dt;
  RolloutResult result;
  result.trajectory.dt = dt;
  result.trajectory.samples.reserve(leader.size());

  KinematicState state{init.v, leader.front().v - init.v, init.gap, time_gap};
  double x = leader.front().x - init.gap;
  result.trajectory.samples.push_back({leader.front().t, x, init.v, 0.0});

  for (std::size_t k = 0; k + 1 < leader.size(); ++k) {
    const Action action(control(state));
    result.trajectory.samples.back().a = action.accel;
    const KinematicState next = step(state, action, leader[k + 1].v, dt);
    if (detect_collision(next)) {
      result.collided = true;
      result.collision_time = leader[k + 1].t;
      break;
    }
    x += next.v * dt;
    result.trajectory.samples.push_back({leader[k + 1].t, x, next.v, 0.0});
    state = next;
  }
  return result;
}

}  // namespace

RolloutResult rollout_follower(const Policy& policy, const Trajectory& leader,
                               double time_gap, const FollowerInit& init) {
  return rollout_impl(leader, time_gap, init,
                      [&](const KinematicState& s) { return policy.act(s); });
}

RolloutResult rollout_follower(const IdmParams& idm, const Trajectory& leader,
                               double time_gap, const FollowerInit& init) {
  IdmParams p = idm;
  p.T = time_gap;
  return rollout_impl(leader, time_gap, init, [&](const KinematicState& s) {
    return idm_accel(s.v, s.dv, s.gap, p);
  });
}

std::vector<Trajectory> PlatoonResult::all_trajectories() const {
  std::vector<Trajectory> out;
  out.reserve(followers.size() + 1);
  out.push_back(leader);
  for (const auto& f : followers) out.push_back(f.trajectory);
  return out;
}

PlatoonCollisionError::PlatoonCollisionError(int index, double t)
    : std::runtime_error("collision at follower " + std::to_string(index) + " (t=" +
                         std::to_string(t) + " s)"),
      follower_index(index) {}

namespace {

/// Largest-remainder conversion of shares into exact per-entry counts.
std::vector<int> shares_to_counts(const CompositionSpec& spec) {
  const int n = spec.n_followers;
  std::vector<int> counts(spec.entries.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    const double exact = spec.entries[i].share * n;
    counts[i] = static_cast<int>(std::floor(exact + 1e-12));
    assigned += counts[i];
    remainders.push_back({exact - counts[i], i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < n - assigned; ++k) {
    counts[remainders[k % remainders.size()].second] += 1;
  }
  return counts;
}

}  // namespace

PlatoonResult build_platoon(const Trajectory& leader, const CompositionSpec& spec,
                            const Policy* policy, const IdmParams& idm,
                            bool abort_on_collision) {
  spec.validate();
  leader.validate();
  for (const auto& e : spec.entries) {
    if (e.controller == ControllerKind::Rl && policy == nullptr) {
      throw std::invalid_argument("build_platoon: composition needs a trained policy");
    }
  }

  const std::vector<int> counts = shares_to_counts(spec);
  std::vector<std::size_t> assignment;
  assignment.reserve(spec.n_followers);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    assignment.insert(assignment.end(), counts[i], i);
  }
  RandomStream rng(derive_seed(spec.seed, 0x9A7));
  for (std::size_t i = assignment.size(); i > 1; --i) {
    std::swap(assignment[i - 1], assignment[rng.uniform_int(i)]);
  }

  PlatoonResult result;
  result.leader = leader;
  result.followers.reserve(spec.n_followers);
  const Trajectory* current_leader = &result.leader;
  for (int i = 0; i < spec.n_followers; ++i) {
    const CompositionEntry& entry = spec.entries[assignment[i]];
    const FollowerInit init = init_follower(*current_leader, rng);
    RolloutResult rollout =
        entry.controller == ControllerKind::Rl
            ? rollout_follower(*policy, *current_leader, entry.time_gap, init)
            : rollout_follower(idm, *current_leader, entry.time_gap, init);
    if (rollout.collided) {
      result.collisions.push_back({i, rollout.collision_time});
      if (abort_on_collision) {
        throw PlatoonCollisionError(i, rollout.collision_time);
      }
    }
    result.followers.push_back({std::move(rollout.trajectory), entry.controller,
                                entry.time_gap});
    current_leader = &result.followers.back().trajectory;
  }
  return result;
}

}  // namespace platoonlab
