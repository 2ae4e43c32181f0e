//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_CHEM_DESCRIPTORS_HPP_
#define MOLDKL_CHEM_DESCRIPTORS_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "moldkl/chem/molgraph.hpp"

namespace moldkl::chem {

struct DescriptorVector {
  double mw = 0.0;    // g/mol
  int ringct = 0;
  int rotb = 0;
  int hbd = 0;
  int hba = 0;
  double tpsa = 0.0;  // Angstrom^2
  double mologp = 0.0;
};

// Column order used by every CSV and by descriptor_by_name.
inline constexpr const char *kDescriptorNames[] = {
    "mw", "ringct", "rotb", "hbd", "hba", "tpsa", "mologp",
};

double descriptor_by_name(const DescriptorVector &d, std::string_view name);
bool is_descriptor_name(std::string_view name);

struct ContributionTable {
  int version = 0;
  std::map<std::string, double> values;
};

// Tab-separated "key<TAB>value[<TAB>description]" rows with '#' comments;
// a "# version: N" comment line is required.
ContributionTable parse_contribution_table(std::string_view text,
                                           std::string_view what);
ContributionTable load_contribution_table(const std::string &path);

// Tables compiled into the binary; byte-identical copies ship in data/.
const ContributionTable &builtin_tpsa_table();
const ContributionTable &builtin_logp_table();
std::string_view builtin_tpsa_table_text();
std::string_view builtin_logp_table_text();

// Canonical environment keys used by the tables (exposed for tests).
std::string tpsa_key(const MolGraph &mol, int atom);
std::string logp_key(const MolGraph &mol, int atom);

DescriptorVector descriptors(const MolGraph &mol);
DescriptorVector descriptors(const MolGraph &mol,
                             const ContributionTable &tpsa,
                             const ContributionTable &logp);

}  // namespace moldkl::chem

#endif  // MOLDKL_CHEM_DESCRIPTORS_HPP_
