//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/chem/molgraph.hpp"

#include <functional>

#include "moldkl/errors.hpp"

namespace moldkl::chem {

char element_symbol(Element e) {
  switch (e) {
  case Element::H:
    return 'H';
  case Element::C:
    return 'C';
  case Element::N:
    return 'N';
  case Element::O:
    return 'O';
  case Element::F:
    return 'F';
  }
  throw Error("bad element");
}

std::vector<std::vector<int>> MolGraph::adjacency() const {
  std::vector<std::vector<int>> adj(atoms.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[bonds[i].a].push_back(static_cast<int>(i));
    adj[bonds[i].b].push_back(static_cast<int>(i));
  }
  return adj;
}

int MolGraph::heavy_degree(int atom) const {
  int d = 0;
  for (const Bond &b: bonds)
    if (b.a == atom || b.b == atom)
      if (atoms[b.other(atom)].element != Element::H)
        ++d;
  return d;
}

int MolGraph::bond_order_sum(int atom) const {
  int s = 0;
  for (const Bond &b: bonds)
    if (b.a == atom || b.b == atom)
      s += b.order;
  return s;
}

int MolGraph::total_h(int atom) const {
  int h = atoms[atom].hydrogens();
  for (const Bond &b: bonds)
    if (b.a == atom || b.b == atom)
      if (atoms[b.other(atom)].element == Element::H)
        ++h;
  return h;
}

int allowed_valence(Element e, int charge) {
  switch (e) {
  case Element::H:
    return charge == 0 ? 1 : -1;
  case Element::C:
    return charge == 0 ? 4 : -1;
  case Element::N:
    if (charge == 0)
      return 3;
    return charge == 1 ? 4 : 2;
  case Element::O:
    if (charge == 0)
      return 2;
    return charge == 1 ? 3 : 1;
  case Element::F:
    return charge == 0 ? 1 : -1;
  }
  return -1;
}

RingInfo perceive_rings(const MolGraph &mol) {
  const int n_atoms = static_cast<int>(mol.atoms.size());
  const int n_bonds = static_cast<int>(mol.bonds.size());
  RingInfo info;
  info.bond_in_ring.assign(n_bonds, true);
  info.cycle_rank = n_bonds - n_atoms + 1;

  // Tarjan bridge finding: a bond is in a ring iff it is not a bridge.
  auto adj = mol.adjacency();
  std::vector<int> disc(n_atoms, -1), low(n_atoms, 0);
  int timer = 0;
  std::function<void(int, int)> dfs = [&](int at, int parent_bond) {
    disc[at] = low[at] = timer++;
    for (int bi: adj[at]) {
      if (bi == parent_bond)
        continue;
      const int to = mol.bonds[bi].other(at);
      if (disc[to] == -1) {
        dfs(to, bi);
        low[at] = std::min(low[at], low[to]);
        if (low[to] > disc[at])
          info.bond_in_ring[bi] = false;
      } else {
        low[at] = std::min(low[at], disc[to]);
      }
    }
  };
  for (int a = 0; a < n_atoms; ++a)
    if (disc[a] == -1)
      dfs(a, -1);
  return info;
}

void annotate_rings(MolGraph &mol) {
  RingInfo info = perceive_rings(mol);
  for (std::size_t i = 0; i < mol.bonds.size(); ++i)
    mol.bonds[i].in_ring = info.bond_in_ring[i];
  mol.cycle_rank = info.cycle_rank;
}

bool in_three_ring(const MolGraph &mol, int atom) {
  std::vector<int> nbrs;
  for (const Bond &b: mol.bonds)
    if (b.a == atom || b.b == atom)
      nbrs.push_back(b.other(atom));
  for (std::size_t i = 0; i < nbrs.size(); ++i)
    for (std::size_t j = i + 1; j < nbrs.size(); ++j)
      for (const Bond &b: mol.bonds)
        if ((b.a == nbrs[i] && b.b == nbrs[j]) ||
            (b.a == nbrs[j] && b.b == nbrs[i]))
          return true;
  return false;
}

}  // namespace moldkl::chem
