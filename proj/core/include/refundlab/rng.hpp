// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>

namespace refundlab {

/// Splittable counter-free PRNG (xoshiro256++) with a value-semantics state.
/// All randomness in the library flows through explicit Rng values, so any
/// computation is reproducible from its seed and independent of call order
/// elsewhere in the program.
class Rng {
 public:
  static Rng seeded(std::uint64_t seed) {
    Rng r;
    std::uint64_t x = seed;
    for (auto& s : r.state_) s = splitmix64(x);
    return r;
  }

  std::uint64_t next_u64() {
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

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Derives an independent stream; both this Rng and the returned one
  /// remain usable.
  Rng split() {
    Rng child;
    std::uint64_t x = next_u64() ^ 0x9e3779b97f4a7c15ull;
    for (auto& s : child.state_) s = splitmix64(x);
    return child;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace refundlab
