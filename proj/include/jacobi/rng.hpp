#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace jacobi {

// Deterministic PRNG (PCG-XSH-RR 64/32). Not std::mt19937: sampled streams must be
// reproducible bit-for-bit across standard-library implementations, and sub-streams
// must be derivable from (seed, sample index) so results do not depend on sampling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  // Independent sub-stream for one Monte-Carlo sample.
  static Rng for_sample(std::uint64_t seed, std::uint64_t sample_index) {
    return Rng(mix(seed, sample_index));
  }

  void reseed(std::uint64_t seed) {
    state_ = 0u;
    next_u32();
    state_ += 0x9e3779b97f4a7c15ull ^ seed;
    next_u32();
    cached_ = false;
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ull + 1442695040888963407ull;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // Uniform in (0,1), 53-bit resolution; strictly positive so it is safe under log.
  double uniform() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    std::uint64_t bits = ((hi << 32) | lo) >> 11;
    double u = static_cast<double>(bits) * 0x1.0p-53;
    return u <= 0.0 ? 0x1.0p-53 : u;
  }

  // Standard normal via Box-Muller; both values of the pair are used.
  double normal() {
    if (cached_) {
      cached_ = false;
      return cache_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    cached_ = true;
    return r * std::cos(a);
  }

  // Uniform direction on the Euclidean unit sphere S^{n-1}.
  void unit_vector(int n, double* v) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        v[i] = normal();
        norm2 += v[i] * v[i];
      }
    } while (norm2 < 1e-24);
    double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) v[i] *= inv;
  }

  std::vector<double> unit_vector(int n) {
    std::vector<double> v(n);
    unit_vector(n, v.data());
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // SplitMix64 finalizer over the pair; decorrelates consecutive sample indices.
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_ = 0;
  double cache_ = 0.0;
  bool cached_ = false;
};

}  // namespace jacobi
