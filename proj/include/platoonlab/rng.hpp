#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace platoonlab {

/// Seeded random stream with hand-rolled distributions so that sequences are
/// bit-identical across standard libraries (std:: distributions are
/// implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t draw = engine_();
    while (draw > limit) draw = engine_();
    return draw % n;
  }

  /// Standard normal via Marsaglia polar, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t raw() { return engine_(); }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stateless per-key seed derivation for parallel workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key) {
  return RandomStream::splitmix64(master ^ (0x9e3779b97f4a7c15ULL * (key + 1)));
}

}  // namespace platoonlab
