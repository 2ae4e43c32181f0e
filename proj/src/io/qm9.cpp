//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/io/qm9.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"
#include "moldkl/io/files.hpp"

namespace moldkl::io {

namespace {

std::vector<std::string> split_ws(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok)
    out.push_back(tok);
  return out;
}

// "*^" is how the source data spells the Fortran double exponent.
std::string normalize_number(std::string tok) {
  for (std::size_t p; (p = tok.find("*^")) != std::string::npos;)
    tok.replace(p, 2, "e");
  if (!tok.empty() && tok.back() == '.')
    tok += '0';
  return tok;
}

double parse_property(const std::string &raw, std::size_t line,
                      std::size_t column) {
  const std::string tok = normalize_number(raw);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() ||
      !std::isfinite(v))
    throw UnparseableNumber(line, column, "cannot parse number '" + raw + "'");
  return v;
}

}  // namespace

Qm9Record parse_qm9_file(std::string_view bytes) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(bytes)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && lines.back().empty())
    lines.pop_back();
  if (lines.empty())
    throw MalformedHeader(1, "empty file");

  Qm9Record rec;
  {
    const std::vector<std::string> toks = split_ws(lines[0]);
    if (toks.size() != 1)
      throw MalformedHeader(1, "line 1 must hold the atom count alone");
    const auto res = std::from_chars(
        toks[0].data(), toks[0].data() + toks[0].size(), rec.natoms);
    if (res.ec != std::errc{} || res.ptr != toks[0].data() + toks[0].size() ||
        rec.natoms < 1)
      throw MalformedHeader(1, "bad atom count '" + toks[0] + "'");
  }

  if (lines.size() < 2)
    throw MalformedHeader(2, "missing property line");
  {
    const std::vector<std::string> toks = split_ws(lines[1]);
    if (toks.size() != 2 + kQm9Properties.size())
      throw PropertyCountMismatch(
          2, "line 2 has " + std::to_string(toks.size()) +
                 " tokens, expected " +
                 std::to_string(2 + kQm9Properties.size()));
    int index = 0;
    const auto res = std::from_chars(
        toks[1].data(), toks[1].data() + toks[1].size(), index);
    if (res.ec != std::errc{} || res.ptr != toks[1].data() + toks[1].size())
      throw MalformedHeader(2, "bad molecule index '" + toks[1] + "'");
    rec.id = toks[0] + "_" + std::to_string(index);
    for (std::size_t p = 0; p < kQm9Properties.size(); ++p)
      rec.properties[kQm9Properties[p]] =
          parse_property(toks[2 + p], 2, 3 + p);
  }

  const std::size_t atoms_begin = 2;
  const std::size_t atoms_end = atoms_begin + static_cast<std::size_t>(rec.natoms);
  if (lines.size() < atoms_end)
    throw AtomCountMismatch(lines.size() + 1,
                            "expected " + std::to_string(rec.natoms) +
                                " atom lines, file ends early");
  for (std::size_t i = atoms_begin; i < atoms_end; ++i) {
    const std::vector<std::string> toks = split_ws(lines[i]);
    if (toks.size() < 4)
      throw AtomCountMismatch(i + 1, "atom line has " +
                                         std::to_string(toks.size()) +
                                         " fields, expected at least 4");
  }

  // frequencies / SMILES pair / InChI pair
  if (lines.size() < atoms_end + 3)
    throw Qm9Malformed(lines.size() + 1,
                       "missing frequency, SMILES, or InChI line");
  {
    const std::vector<std::string> toks = split_ws(lines[atoms_end + 1]);
    if (toks.size() != 2)
      throw Qm9Malformed(atoms_end + 2, "SMILES line needs two fields");
    rec.smiles_gdb17 = toks[0];
    rec.smiles_relaxed = toks[1];
  }
  {
    const std::vector<std::string> toks = split_ws(lines[atoms_end + 2]);
    if (toks.size() != 2)
      throw Qm9Malformed(atoms_end + 3, "InChI line needs two fields");
    rec.inchi_corina = toks[0];
    rec.inchi_relaxed = toks[1];
  }

  chem::parse_smiles(rec.smiles_relaxed);
  return rec;
}

Qm9LoadResult load_qm9_dir(const std::string &dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec)
    throw IoFailure("cannot read directory " + dir + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  for (const auto &entry: it)
    if (entry.is_regular_file() && entry.path().extension() == ".xyz")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Qm9LoadResult out;
  for (const auto &path: files) {
    try {
      out.records.push_back(parse_qm9_file(read_file(path.string())));
    } catch (const Error &e) {
      out.rejects.push_back({path.filename().string(), e.what()});
    }
  }
  return out;
}

}  // namespace moldkl::io
