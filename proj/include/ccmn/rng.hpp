#ifndef CCMN_RNG_HPP_
#define CCMN_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace ccmn {

/// 64-bit finalizer used by SplitMix64 (Steele, Lea & Flood 2014).
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent substream seed from a base seed and a stream index.
/// Used wherever work is logically partitioned (one stream per instance, per
/// epoch, per repeat) so the partition order cannot affect the draws.
inline uint64_t derive_stream(uint64_t seed, uint64_t stream) {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

/// Deterministic counter-based generator: the i-th output is
/// mix64(seed + i * 0x9e3779b97f4a7c15), i.e. SplitMix64. The same seed and
/// call sequence produce the same values on every platform; there is no
/// global state and no dependence on the C++ standard library distributions.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, bound) by rejection, so the result is unbiased
  /// and identical across platforms.
  uint64_t below(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller on two fresh uniforms (no cached spare,
  /// so the draw count per call is fixed).
  double normal() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// New generator on an independent substream of this generator's state.
  Rng fork(uint64_t stream) const { return Rng(derive_stream(state_, stream)); }

private:
  uint64_t state_;
};

}  // namespace ccmn

#endif  // CCMN_RNG_HPP_
