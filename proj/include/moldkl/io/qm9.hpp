//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_IO_QM9_HPP_
#define MOLDKL_IO_QM9_HPP_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace moldkl::io {

// Property columns of line 2, after the "tag id" pair, in file order.
inline constexpr std::array<const char *, 15> kQm9Properties = {
    "A",  "B",    "C",  "mu", "alpha", "homo", "lumo", "gap",
    "r2", "zpve", "U0", "U",  "H",     "G",    "Cv"};

struct Qm9Record {
  std::string id;  // "<tag>_<index>", e.g. "gdb_1"
  int natoms = 0;
  std::map<std::string, double> properties;
  std::string smiles_gdb17;
  std::string smiles_relaxed;  // canonical identity; must parse
  std::string inchi_corina;
  std::string inchi_relaxed;
};

// One molecule per file: natoms / tag+id+15 properties / natoms atom lines
// (coordinates validated for count, then discarded) / frequencies / two
// SMILES / two InChI. Fortran-style "*^" exponents are normalized before
// number parsing. Throws MalformedHeader, PropertyCountMismatch,
// AtomCountMismatch, UnparseableNumber, Qm9Malformed, and ParseError when
// the relaxed SMILES does not parse.
Qm9Record parse_qm9_file(std::string_view bytes);

struct Qm9FileReject {
  std::string file;
  std::string reason;
};

struct Qm9LoadResult {
  std::vector<Qm9Record> records;  // in sorted-filename order
  std::vector<Qm9FileReject> rejects;
};

// Parses every *.xyz under dir (sorted by filename); files that fail to
// parse are reported, not fatal. Throws IoFailure if dir is unreadable.
Qm9LoadResult load_qm9_dir(const std::string &dir);

}  // namespace moldkl::io

#endif  // MOLDKL_IO_QM9_HPP_
