//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/num/rng.hpp"

#include <cmath>
#include <numbers>

namespace moldkl::num {

double normal(Rng &rng) {
  const std::uint64_t a = rng.next_u64();
  const std::uint64_t b = rng.next_u64();
  const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace moldkl::num
