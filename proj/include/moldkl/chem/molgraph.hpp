//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_CHEM_MOLGRAPH_HPP_
#define MOLDKL_CHEM_MOLGRAPH_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace moldkl::chem {

enum class Element : std::uint8_t { H, C, N, O, F };

char element_symbol(Element e);

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;  // -1..+1
  int explicit_h = 0;     // from a bracket atom
  int implicit_h = 0;     // derived to satisfy valence
  bool aromatic_input = false;  // written lowercase in the source

  int hydrogens() const { return explicit_h + implicit_h; }
};

struct Bond {
  int a = 0;
  int b = 0;
  int order = 1;  // 1..3; aromatic input is kekulized at parse time
  bool in_ring = false;

  int other(int atom) const { return atom == a ? b : a; }
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::string source_text;
  int cycle_rank = 0;

  // Bond indices incident to each atom, in bond insertion order.
  std::vector<std::vector<int>> adjacency() const;

  // Neighbors that are not explicit-H atom nodes.
  int heavy_degree(int atom) const;

  int bond_order_sum(int atom) const;

  // Hydrogen count including neighboring explicit [H] atom nodes.
  int total_h(int atom) const;
};

// Allowed valence for (element, charge); -1 when the combination is outside
// the dialect (C:4, N:3, O:2, F:1, H:1; N+:4, N-:2, O+:3, O-:1).
int allowed_valence(Element e, int charge);

struct RingInfo {
  std::vector<bool> bond_in_ring;  // one flag per bond
  int cycle_rank = 0;
};

// Bridge detection over the connected graph; cycle_rank = E - V + 1.
RingInfo perceive_rings(const MolGraph &mol);

// Applies perceive_rings to the graph in place.
void annotate_rings(MolGraph &mol);

// True when the atom shares a 3-membered ring.
bool in_three_ring(const MolGraph &mol, int atom);

}  // namespace moldkl::chem

#endif  // MOLDKL_CHEM_MOLGRAPH_HPP_
