#pragma once

#include <cmath>
#include <cstdint>

namespace ras {

// splitmix64 finalizer, used for seeding and stream derivation.
inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// xoshiro256** with counter-based stream derivation: a stream is identified by
// (seed, tag triple), so per-frame generators are reproducible regardless of
// scheduling. State is seeded through splitmix64 per the generator authors'
// recommendation.
class Rng {
public:
  explicit Rng(uint64_t seed, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = seed;
    h = mix64(h + 0x9e3779b97f4a7c15ull * (a + 1));
    h = mix64(h + 0x9e3779b97f4a7c15ull * (b + 1));
    h = mix64(h + 0x9e3779b97f4a7c15ull * (c + 1));
    for (int i = 0; i < 4; ++i) {
      h += 0x9e3779b97f4a7c15ull;
      s_[i] = mix64(h);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is absorbing
  }

  uint64_t next() {
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1), 53-bit resolution.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n); multiply-shift map, bias < n/2^64.
  uint32_t below(uint32_t n) {
    return uint32_t((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // in (0,1], keeps the log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ras
