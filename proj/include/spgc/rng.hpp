// Deterministic random number generation. All randomness in the toolkit goes
// through this generator so that runs are reproducible bit-for-bit given a seed.
#pragma once

#include <cstdint>

namespace spgc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable 64-bit mix of a base seed and two indices (grid cell, run).
inline std::uint64_t hash64(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= a * 0xd6e8feb86659fd93ULL;
  h ^= splitmix64(s);
  s ^= b * 0xa0761d6478bd642fULL;
  h ^= splitmix64(s);
  return h;
}

// xoshiro256** with splitmix64 seeding.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : s_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace spgc
