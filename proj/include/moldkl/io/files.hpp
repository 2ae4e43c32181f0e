//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_IO_FILES_HPP_
#define MOLDKL_IO_FILES_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace moldkl::io {

// Throws IoFailure on any filesystem problem.
std::string read_file(const std::string &path);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string &path, std::string_view content);

// 17 significant digits, enough to parse back to the identical double.
std::string format_double(double v);

std::uint64_t file_fnv(const std::string &path);

}  // namespace moldkl::io

#endif  // MOLDKL_IO_FILES_HPP_
