//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_CLI_COMMANDS_HPP_
#define MOLDKL_CLI_COMMANDS_HPP_

namespace moldkl::cli {

// Exit codes are part of the interface and must stay stable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataRejection = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitArtifactMismatch = 4;
inline constexpr int kExitLookupFailure = 5;

// Full argv dispatch, reentrant (no process-global state), so tests can
// drive the CLI in-process.
int run_cli(int argc, const char *const *argv);

}  // namespace moldkl::cli

#endif  // MOLDKL_CLI_COMMANDS_HPP_
