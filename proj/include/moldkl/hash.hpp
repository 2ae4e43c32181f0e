//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_HASH_HPP_
#define MOLDKL_HASH_HPP_

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace moldkl {

// 64-bit FNV-1a. Pinned: content hashes and fingerprint identifiers must be
// identical across platforms and releases.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = kFnvOffset) {
  for (unsigned char c: data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace moldkl

#endif  // MOLDKL_HASH_HPP_
