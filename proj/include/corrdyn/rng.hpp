#pragma once

#include <cstdint>

namespace corrdyn {

// splitmix64; cheap, well mixed, and easy to derive independent per-sample
// streams from (master seed, sample index) so results do not depend on how
// work is scheduled across threads.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master ^ (0xA24BAED4963EE407ull * (index + 1)));
  g.next();
  return g.next();
}

}  // namespace corrdyn
