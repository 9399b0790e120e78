#pragma once

#include <cstdint>

namespace belltest {

/// Counter-based deterministic generator: SplitMix64 (Weyl increment plus a
/// 64-bit finalizer). Cheap to construct, so every logical substream gets
/// its own instance keyed by substream_key; results are then independent of
/// scheduling and host.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal();

  /// Poisson draw; inversion for small means, transformed rejection (PTRS)
  /// for large ones.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

/// Stream key for the substream identified by (seed, a, b).
std::uint64_t substream_key(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b);

}  // namespace belltest
