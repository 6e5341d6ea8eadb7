#pragma once

#include <cstdint>
#include <initializer_list>

namespace cssdual {

// splitmix64: counter-based generator (state advances by a fixed gamma,
// output is a bijective mix of the counter). Used both as the simulation
// RNG and as the hash for deriving per-task seeds, so results never
// depend on scheduling.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [0, n); deterministic fixed-point multiply, bias O(n/2^64)
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next()) * n) >> 64);
  }

  bool next_bool() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

// Derive a child seed from a master seed and task coordinates
// (model id, size, grid index, replica, ...). Order-sensitive chain of mixes.
inline std::uint64_t seed_for(std::uint64_t master,
                              std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64_mix(master ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t c : coords) {
    h = splitmix64_mix(h ^ (c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

}  // namespace cssdual
