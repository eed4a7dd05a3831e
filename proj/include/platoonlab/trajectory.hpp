#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace platoonlab {

/// One 10 Hz sample of a vehicle's longitudinal motion. SI units throughout:
/// t [s], x [m], v [m/s], a [m/s^2].
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// Uniformly sampled longitudinal trajectory; the common currency between the
/// simulation, analysis, and I/O layers.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.1;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples[i]; }

  double duration() const {
    return samples.size() < 2 ? 0.0 : samples.back().t - samples.front().t;
  }

  /// Throws std::invalid_argument unless the trajectory has >= 2 samples,
  /// uniform spacing within 1e-9 s, and finite values.
  void validate() const;
};

void validate_shared_grid(const std::vector<Trajectory>& trajs);

}  // namespace platoonlab
