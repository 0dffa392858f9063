#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace extremal {

/// (seed, stream) pair. Identical pairs reproduce identical draws.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSeed with_stream(std::uint64_t s) const { return {seed, s}; }
};

/// xoshiro256++ seeded from (seed, stream) through splitmix64.
///
/// Each replicate gets its own stream, so a replicate's draws never depend on
/// which worker thread ran it or in which order replicates were scheduled.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngSeed seed) {
    std::uint64_t z = splitmix64(seed.seed) ^ splitmix64(seed.stream + 0x632BE59BD9B4E019ull);
    for (auto& word : state_) {
      z += 0x9E3779B97F4A7C15ull;
      word = splitmix64(z);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Exp(1) by inversion.
  double exponential() { return -std::log(uniform_open()); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace extremal
