#include "platoonlab/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace platoonlab {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
}

void ReplayBuffer::add(const Transition& t) {
  storage_[next_] = t;
  next_ = (next_ + 1) % storage_.size();
  size_ = std::min(size_ + 1, storage_.size());
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch,
                                                      RandomStream& rng) const {
  if (batch > size_) throw std::invalid_argument("sample: batch larger than buffer");
  // Floyd's algorithm keeps draws O(batch) with no retry loop.
  std::vector<std::size_t> chosen;
  chosen.reserve(batch);
  for (std::size_t j = size_ - batch; j < size_; ++j) {
    const std::size_t t = rng.uniform_int(j + 1);
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) {
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  return chosen;
}

}  // namespace platoonlab
