#pragma once

#include <cmath>
#include <cstdint>

namespace tcsf {

// splitmix64: seed expander / hash used for stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Combine seed components into one stream seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s ^= b + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  h = splitmix64(s);
  s ^= c + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  return splitmix64(s);
}

// Splittable counter-free PRNG (xoshiro256++ core). All randomness in the
// library flows through explicitly seeded streams of this type; standard
// library distributions are avoided because their outputs are not
// bit-reproducible across implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Derive an independent child stream without advancing this one.
  // Identical (state, tag) pairs produce identical children.
  RandomStream split(std::uint64_t tag) const {
    return RandomStream(mix_seed(s_[0], s_[2] ^ 0xD1B54A32D192ED03ull, tag));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1), 53-bit resolution, never exactly 0 or 1.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Standard normal via Box-Muller (cosine branch; two uniforms per draw).
  double normal() {
    const double u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  double rademacher() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

  // Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (~0ull / n);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace tcsf
