//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_CHEM_SMILES_HPP_
#define MOLDKL_CHEM_SMILES_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "moldkl/chem/molgraph.hpp"

namespace moldkl::chem {

// QM9-subset SMILES: C/N/O/F organic atoms, bracket atoms with H count and
// +-1 charge, bonds - = # :, branches, ring closures 1-9 and %nn, aromatic
// c/n/o with Kekule assignment at parse time. Stereo markers are accepted
// and ignored; each ignore is reported through `warnings`.
MolGraph parse_smiles(std::string_view text,
                      std::vector<std::string> *warnings = nullptr);

// Output re-parses to a graph isomorphic to the input (element, charge,
// H count, bond order). Ordering is traversal order, not canonical.
std::string write_smiles(const MolGraph &mol);

}  // namespace moldkl::chem

#endif  // MOLDKL_CHEM_SMILES_HPP_
