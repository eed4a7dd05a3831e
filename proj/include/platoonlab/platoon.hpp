#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "platoonlab/idm.hpp"
#include "platoonlab/rng.hpp"
#include "platoonlab/td3.hpp"
#include "platoonlab/trajectory.hpp"
#include "platoonlab/vehicle_dynamics.hpp"

namespace platoonlab {

enum class ControllerKind { Rl, Idm };

struct CompositionEntry {
  ControllerKind controller = ControllerKind::Rl;
  double time_gap = 1.5;  // s
  double share = 1.0;     // fraction of the platoon
};

/// Per-platoon controller mix. Shares must sum to 1 within 1e-9.
struct CompositionSpec {
  int n_followers = 100;
  std::vector<CompositionEntry> entries;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FollowerInit {
  double gap = 0.0;  // m
  double v = 0.0;    // m/s
  double a = 0.0;    // m/s^2
};

/// Initial spacing uniform in [10, 50] m; speed and acceleration matched to
/// the leader's first sample.
FollowerInit init_follower(const Trajectory& leader, RandomStream& rng);

struct CollisionEvent {
  int follower_index = -1;
  double t = 0.0;  // s
};

struct RolloutResult {
  Trajectory trajectory;
  bool collided = false;
  double collision_time = 0.0;
};

/// Steps one follower behind a fixed leader trajectory. Positions integrate
/// as x' = x + v' * dt. A collision truncates the trajectory at the last
/// collision-free sample.
RolloutResult rollout_follower(const Policy& policy, const Trajectory& leader,
                               double time_gap, const FollowerInit& init);
RolloutResult rollout_follower(const IdmParams& idm, const Trajectory& leader,
                               double time_gap, const FollowerInit& init);

struct FollowerRecord {
  Trajectory trajectory;
  ControllerKind controller = ControllerKind::Rl;
  double time_gap = 1.5;
};

struct PlatoonResult {
  Trajectory leader;
  std::vector<FollowerRecord> followers;
  std::vector<CollisionEvent> collisions;

  /// Leader plus follower trajectories, in platoon order.
  std::vector<Trajectory> all_trajectories() const;
};

/// Thrown when a platoon run that must stay collision-free records a crash.
struct PlatoonCollisionError : std::runtime_error {
  int follower_index;
  explicit PlatoonCollisionError(int index, double t);
};

/// Rolls out the full platoon sequentially: follower i's trajectory is
/// follower i+1's leader. Controller and time-gap assignments follow the
/// composition shares exactly (largest-remainder counts, seeded shuffle).
PlatoonResult build_platoon(const Trajectory& leader, const CompositionSpec& spec,
                            const Policy* policy, const IdmParams& idm,
                            bool abort_on_collision = true);

}  // namespace platoonlab
