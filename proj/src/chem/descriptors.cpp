//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/chem/descriptors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "moldkl/errors.hpp"

namespace moldkl::chem {

namespace {

double atomic_mass(Element e) {
  switch (e) {
  case Element::H:
    return 1.008;
  case Element::C:
    return 12.011;
  case Element::N:
    return 14.007;
  case Element::O:
    return 15.999;
  case Element::F:
    return 18.998;
  }
  throw Error("bad element");
}

struct BondCounts {
  int single = 0;
  int dbl = 0;
  int triple = 0;
  int aromatic = 0;
};

// Ring bonds between two aromatic-flagged atoms count as aromatic; anything
// else counts by its stored (kekulized) order.
BondCounts count_bonds(const MolGraph &mol, int atom) {
  BondCounts c;
  const bool self_arom = mol.atoms[atom].aromatic_input;
  for (const Bond &b: mol.bonds) {
    if (b.a != atom && b.b != atom)
      continue;
    const Atom &other = mol.atoms[b.other(atom)];
    if (other.element == Element::H)
      continue;  // folded into the H count
    if (self_arom && other.aromatic_input && b.in_ring) {
      ++c.aromatic;
    } else if (b.order == 1) {
      ++c.single;
    } else if (b.order == 2) {
      ++c.dbl;
    } else {
      ++c.triple;
    }
  }
  return c;
}

bool has_hetero_neighbor(const MolGraph &mol, int atom) {
  for (const Bond &b: mol.bonds) {
    if (b.a != atom && b.b != atom)
      continue;
    const Element e = mol.atoms[b.other(atom)].element;
    if (e == Element::N || e == Element::O || e == Element::F)
      return true;
  }
  return false;
}

}  // namespace

double descriptor_by_name(const DescriptorVector &d, std::string_view name) {
  if (name == "mw")
    return d.mw;
  if (name == "ringct")
    return d.ringct;
  if (name == "rotb")
    return d.rotb;
  if (name == "hbd")
    return d.hbd;
  if (name == "hba")
    return d.hba;
  if (name == "tpsa")
    return d.tpsa;
  if (name == "mologp")
    return d.mologp;
  throw Error("unknown descriptor '" + std::string(name) + "'");
}

bool is_descriptor_name(std::string_view name) {
  for (const char *n: kDescriptorNames)
    if (name == n)
      return true;
  return false;
}

ContributionTable parse_contribution_table(std::string_view text,
                                           std::string_view what) {
  ContributionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      const std::string_view marker = "# version: ";
      if (line.rfind(marker, 0) == 0)
        table.version = std::stoi(line.substr(marker.size()));
      continue;
    }
    const std::size_t tab1 = line.find('\t');
    if (tab1 == std::string::npos)
      throw CorruptFile(std::string(what) + ": no tab separator on line " +
                        std::to_string(line_no));
    const std::size_t tab2 = line.find('\t', tab1 + 1);
    const std::string key = line.substr(0, tab1);
    const std::string value_str =
        line.substr(tab1 + 1, tab2 == std::string::npos ? std::string::npos
                                                        : tab2 - tab1 - 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(
        value_str.data(), value_str.data() + value_str.size(), value);
    if (ec != std::errc() || ptr != value_str.data() + value_str.size())
      throw CorruptFile(std::string(what) + ": bad contribution '" +
                        value_str + "' on line " + std::to_string(line_no));
    if (!table.values.emplace(key, value).second)
      throw CorruptFile(std::string(what) + ": duplicate key '" + key +
                        "' on line " + std::to_string(line_no));
  }
  if (table.version == 0)
    throw CorruptFile(std::string(what) + ": missing '# version:' header");
  if (table.values.empty())
    throw CorruptFile(std::string(what) + ": no entries");
  return table;
}

ContributionTable load_contribution_table(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoFailure("cannot open contribution table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_contribution_table(buf.str(), path);
}

std::string tpsa_key(const MolGraph &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  const BondCounts c = count_bonds(mol, atom);
  std::string key(1, element_symbol(a.element));
  if (a.aromatic_input)
    key += "ar";
  if (a.formal_charge > 0)
    key += '+';
  else if (a.formal_charge < 0)
    key += '-';
  key += "|H" + std::to_string(mol.total_h(atom));
  key += "|s" + std::to_string(c.single) + "d" + std::to_string(c.dbl) +
         "t" + std::to_string(c.triple) + "a" + std::to_string(c.aromatic);
  if (in_three_ring(mol, atom))
    key += "|r3";
  return key;
}

std::string logp_key(const MolGraph &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  std::string cls(1, element_symbol(a.element));
  if (a.formal_charge != 0 &&
      (a.element == Element::N || a.element == Element::O)) {
    cls += a.formal_charge > 0 ? ".plus" : ".minus";
    return cls;
  }
  if (a.element == Element::C || a.element == Element::N ||
      a.element == Element::O) {
    const BondCounts c = count_bonds(mol, atom);
    if (a.aromatic_input)
      cls += ".ar";
    else if (c.triple > 0)
      cls += ".1";
    else if (c.dbl > 0)
      cls += ".2";
    else
      cls += ".3";
    if (a.element == Element::C && has_hetero_neighbor(mol, atom))
      cls += 'x';
  }
  return cls + "|H" + std::to_string(mol.total_h(atom));
}

DescriptorVector descriptors(const MolGraph &mol) {
  return descriptors(mol, builtin_tpsa_table(), builtin_logp_table());
}

DescriptorVector descriptors(const MolGraph &mol,
                             const ContributionTable &tpsa,
                             const ContributionTable &logp) {
  DescriptorVector d;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    const Atom &a = mol.atoms[i];
    d.mw += atomic_mass(a.element) + 1.008 * a.hydrogens();
  }
  d.ringct = mol.cycle_rank;

  for (const Bond &b: mol.bonds) {
    if (b.order != 1 || b.in_ring)
      continue;
    if (mol.atoms[b.a].element == Element::H ||
        mol.atoms[b.b].element == Element::H)
      continue;
    if (mol.heavy_degree(b.a) >= 2 && mol.heavy_degree(b.b) >= 2)
      ++d.rotb;
  }

  for (int i = 0; i < static_cast<int>(mol.atoms.size()); ++i) {
    const Element e = mol.atoms[i].element;
    if (e == Element::N || e == Element::O) {
      ++d.hba;
      if (mol.total_h(i) >= 1)
        ++d.hbd;
      const auto it = tpsa.values.find(tpsa_key(mol, i));
      if (it != tpsa.values.end()) {
        d.tpsa += it->second;
      } else {
        // Generic fallback for environments outside the reduced table.
        const double x = mol.heavy_degree(i) + mol.total_h(i);
        const double h = mol.total_h(i);
        const double base = (e == Element::N) ? 30.5 - 8.2 * x + 1.5 * h
                                              : 28.5 - 8.6 * x + 1.5 * h;
        d.tpsa += std::max(0.0, base);
      }
    }
    const auto lit = logp.values.find(logp_key(mol, i));
    if (lit != logp.values.end())
      d.mologp += lit->second;
  }
  return d;
}

}  // namespace moldkl::chem
