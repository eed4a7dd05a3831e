#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "platoonlab/rng.hpp"

namespace platoonlab {

/// One step of experience in normalized coordinates: states are 4-vectors,
/// the action a scalar in [-1, 1].
struct Transition {
  std::array<double, 4> state{};
  double action = 0.0;
  double reward = 0.0;
  std::array<double, 4> next_state{};
  bool done = false;
};

/// FIFO ring buffer with uniform batch sampling (no repeats within a batch).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  const Transition& operator[](std::size_t i) const { return storage_[i]; }

  /// Distinct indices, deterministic given the stream. batch must be <= size.
  std::vector<std::size_t> sample_indices(std::size_t batch, RandomStream& rng) const;

 private:
  std::vector<Transition> storage_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
};

}  // namespace platoonlab
