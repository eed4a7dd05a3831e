#include "platoonlab/trajectory.hpp"

#include <cmath>
#include <string>

namespace platoonlab {

void Trajectory::validate() const {
  if (samples.size() < 2) {
    throw std::invalid_argument("trajectory needs at least 2 samples");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("trajectory dt must be positive");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.v) ||
        !std::isfinite(s.a)) {
      throw std::invalid_argument("non-finite trajectory sample at index " +
                                  std::to_string(i));
    }
    if (i > 0) {
      const double spacing = s.t - samples[i - 1].t;
      if (std::abs(spacing - dt) > 1e-9) {
        throw std::invalid_argument("non-uniform sample spacing at index " +
                                    std::to_string(i));
      }
    }
  }
}

void validate_shared_grid(const std::vector<Trajectory>& trajs) {
  if (trajs.empty()) return;
  const double dt = trajs.front().dt;
  for (const auto& tr : trajs) {
    tr.validate();
    if (std::abs(tr.dt - dt) > 1e-12) {
      throw std::invalid_argument("trajectories do not share dt");
    }
    // Same time grid: start times must sit on the common dt lattice.
    const double offset = std::remainder(tr.front().t - trajs.front().front().t, dt);
    if (std::abs(offset) > 1e-9) {
      throw std::invalid_argument("trajectories do not share a time origin");
    }
  }
}

}  // namespace platoonlab
