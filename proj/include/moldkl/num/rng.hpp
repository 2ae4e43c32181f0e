//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_NUM_RNG_HPP_
#define MOLDKL_NUM_RNG_HPP_

#include <array>
#include <cstdint>

namespace moldkl::num {

// xoshiro256** seeded by expanding the seed through splitmix64. The generator
// is pinned by contract: a given seed must yield the same stream on every
// platform, so std::mt19937 and friends are off the table.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto &s: state_) {
      // splitmix64 step
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      s = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); modulo rejection keeps the draw unbiased.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold)
        return r % n;
    }
  }

  const std::array<std::uint64_t, 4> &state() const { return state_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

// One standard-normal draw via Box-Muller. Consumes exactly two raw values;
// the (>> 11) + 1 shift keeps u1 strictly positive so log() stays finite.
double normal(Rng &rng);

}  // namespace moldkl::num

#endif  // MOLDKL_NUM_RNG_HPP_
