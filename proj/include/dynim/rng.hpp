#pragma once

#include <cstdint>

namespace dynim {

// Counter-based splittable randomness. Every consumer derives its stream
// from (run seed, purpose tag, indices), so draws are reproducible and
// independent of evaluation order or thread count.

namespace rng_purpose {
constexpr std::uint64_t tv_assign = 0x7601;
constexpr std::uint64_t mc_sim = 0x7602;
constexpr std::uint64_t mc_world = 0x7603;
constexpr std::uint64_t sketch_target = 0x7604;
constexpr std::uint64_t sketch_edge = 0x7605;
constexpr std::uint64_t metric_spread = 0x7606;
constexpr std::uint64_t instance_gen = 0x7607;
}  // namespace rng_purpose

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(a, b), c);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                         std::uint64_t d) {
  return mix(mix(a, b, c), d);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                         std::uint64_t d, std::uint64_t e) {
  return mix(mix(a, b, c, d), e);
}

inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateless uniform draw in [0,1) for a fully keyed event.
inline double unit_draw(std::uint64_t key) { return to_unit(splitmix64(key)); }

// Sequential stream for consumers that need many draws per key.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  double uniform01() { return to_unit(next()); }

  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace dynim
