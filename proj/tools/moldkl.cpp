//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/cli/commands.hpp"

int main(int argc, char **argv) {
  return moldkl::cli::run_cli(argc, argv);
}
