//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"

namespace moldkl::chem {

namespace {

std::string atom_token(const Atom &atom) {
  const char sym = element_symbol(atom.element);
  if (atom.formal_charge == 0 && atom.element != Element::H)
    return std::string(1, sym);
  std::string out = "[";
  out += sym;
  const int h = atom.hydrogens();
  if (h > 0) {
    out += 'H';
    if (h > 1)
      out += static_cast<char>('0' + h);
  }
  if (atom.formal_charge > 0)
    out += '+';
  else if (atom.formal_charge < 0)
    out += '-';
  out += ']';
  return out;
}

std::string bond_token(int order) {
  if (order == 2)
    return "=";
  if (order == 3)
    return "#";
  return "";
}

std::string ring_digit(int number) {
  if (number <= 9)
    return std::string(1, static_cast<char>('0' + number));
  if (number <= 99)
    return "%" + std::to_string(number);
  throw Error("more than 99 ring closures");
}

}  // namespace

std::string write_smiles(const MolGraph &mol) {
  if (mol.atoms.empty())
    throw Error("cannot write an empty graph");

  const auto adj = mol.adjacency();
  const int n_atoms = static_cast<int>(mol.atoms.size());

  // First pass classifies bonds into tree edges and ring closures and hands
  // every closure a digit, recorded at both endpoints in discovery order.
  std::vector<int> bond_kind(mol.bonds.size(), 0);  // 0 unseen, 1 tree, 2 ring
  std::vector<std::vector<std::pair<int, int>>> tree(n_atoms);  // (atom,bond)
  std::vector<std::vector<std::pair<int, int>>> digits(n_atoms);  // (num,ord)
  std::vector<bool> visited(n_atoms, false);
  int next_digit = 1;

  std::function<void(int)> classify = [&](int at) {
    visited[at] = true;
    for (int bi: adj[at]) {
      if (bond_kind[bi] != 0)
        continue;
      const int to = mol.bonds[bi].other(at);
      if (!visited[to]) {
        bond_kind[bi] = 1;
        tree[at].push_back({to, bi});
        classify(to);
      } else {
        bond_kind[bi] = 2;
        const int num = next_digit++;
        digits[to].push_back({num, mol.bonds[bi].order});
        digits[at].push_back({num, mol.bonds[bi].order});
      }
    }
  };
  classify(0);
  for (int a = 0; a < n_atoms; ++a)
    if (!visited[a])
      throw Error("graph is disconnected");

  std::string out;
  std::function<void(int)> emit = [&](int at) {
    out += atom_token(mol.atoms[at]);
    for (const auto &[num, order]: digits[at]) {
      out += bond_token(order);
      out += ring_digit(num);
    }
    const auto &children = tree[at];
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto &[child, bi] = children[i];
      const bool last = (i + 1 == children.size());
      if (!last)
        out += '(';
      out += bond_token(mol.bonds[bi].order);
      emit(child);
      if (!last)
        out += ')';
    }
  };
  emit(0);
  return out;
}

}  // namespace moldkl::chem
