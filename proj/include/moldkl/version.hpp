//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_VERSION_HPP_
#define MOLDKL_VERSION_HPP_

namespace moldkl {

inline constexpr const char *kVersion = "0.1.0";

// Bump whenever the checkpoint payload layout changes.
inline constexpr int kCheckpointVersion = 1;

}  // namespace moldkl

#endif  // MOLDKL_VERSION_HPP_
