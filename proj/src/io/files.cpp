//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/io/files.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"

namespace moldkl::io {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoFailure("cannot open " + path + " for reading");
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad())
    throw IoFailure("read error on " + path);
  return out.str();
}

void atomic_write_file(const std::string &path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoFailure("cannot open " + tmp + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
      throw IoFailure("write error on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw IoFailure("cannot rename " + tmp + " to " + path + ": " +
                    ec.message());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t file_fnv(const std::string &path) {
  return fnv1a64(read_file(path));
}

}  // namespace moldkl::io
