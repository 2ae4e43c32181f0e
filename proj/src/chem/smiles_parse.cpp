//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"

namespace moldkl::chem {

namespace {

struct AtomState {
  bool bracket = false;
  std::size_t offset = 0;
};

struct PendingRing {
  int atom = 0;
  int order = 0;  // 0 = unspecified
  bool explicit_order = false;
  std::size_t offset = 0;
};

// Bond slot between reading a bond symbol and the atom/ring it applies to.
struct PendingBond {
  int order = 0;
  bool aromatic = false;  // ':' marker
  bool set = false;
  std::size_t offset = 0;
};

struct Parser {
  std::string_view text;
  std::vector<std::string> *warnings;

  MolGraph mol;
  std::vector<AtomState> states;
  std::vector<bool> bond_aromatic;  // parallel to mol.bonds
  std::vector<int> branch_stack;
  std::map<int, PendingRing> open_rings;
  int prev = -1;
  PendingBond pending;
  std::size_t pos = 0;

  void warn(const std::string &msg) {
    if (warnings != nullptr)
      warnings->push_back(msg);
  }

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  void add_atom(Element el, int charge, int explicit_h, bool aromatic,
                bool bracket, std::size_t offset) {
    Atom atom;
    atom.element = el;
    atom.formal_charge = charge;
    atom.explicit_h = explicit_h;
    atom.aromatic_input = aromatic;
    const int idx = static_cast<int>(mol.atoms.size());
    mol.atoms.push_back(atom);
    states.push_back(AtomState{bracket, offset});
    if (prev >= 0)
      add_bond(prev, idx, offset);
    prev = idx;
  }

  void add_bond(int a, int b, std::size_t offset) {
    Bond bond;
    bond.a = a;
    bond.b = b;
    bool aromatic = false;
    if (pending.set) {
      if (pending.aromatic) {
        aromatic = true;
        bond.order = 1;
      } else {
        bond.order = pending.order;
      }
      pending = PendingBond{};
    } else if (mol.atoms[a].aromatic_input && mol.atoms[b].aromatic_input) {
      aromatic = true;
      bond.order = 1;
    } else {
      bond.order = 1;
    }
    push_bond(bond, aromatic, offset);
  }

  void push_bond(const Bond &bond, bool aromatic, std::size_t offset) {
    if (bond.a == bond.b)
      throw BadSyntax(offset, "bond joins an atom to itself");
    for (const Bond &existing: mol.bonds)
      if ((existing.a == bond.a && existing.b == bond.b) ||
          (existing.a == bond.b && existing.b == bond.a))
        throw BadSyntax(offset, "duplicate bond between atoms");
    mol.bonds.push_back(bond);
    bond_aromatic.push_back(aromatic);
  }

  void handle_ring_digit(int digit, std::size_t offset) {
    if (prev < 0)
      throw BadSyntax(offset, "ring closure before any atom");
    auto it = open_rings.find(digit);
    if (it == open_rings.end()) {
      PendingRing ring;
      ring.atom = prev;
      ring.offset = offset;
      if (pending.set) {
        ring.explicit_order = true;
        ring.order = pending.aromatic ? 0 : pending.order;
        pending = PendingBond{};
      }
      open_rings.emplace(digit, ring);
      return;
    }
    PendingRing ring = it->second;
    open_rings.erase(it);
    int order = 0;
    bool have_order = false;
    if (pending.set) {
      order = pending.aromatic ? 0 : pending.order;
      have_order = true;
      pending = PendingBond{};
    }
    if (ring.explicit_order && have_order && ring.order != order)
      throw BadSyntax(offset, "ring bond order specified twice and differs");
    if (ring.explicit_order && !have_order) {
      order = ring.order;
      have_order = true;
    }
    Bond bond;
    bond.a = ring.atom;
    bond.b = prev;
    bool aromatic = false;
    if (have_order && order != 0) {
      bond.order = order;
    } else if (mol.atoms[ring.atom].aromatic_input &&
               mol.atoms[prev].aromatic_input) {
      bond.order = 1;
      aromatic = true;
    } else {
      bond.order = 1;
    }
    push_bond(bond, aromatic, offset);
  }

  Element read_organic(std::size_t offset) {
    const char c = text[pos];
    switch (c) {
    case 'C':
      if (peek_next() == 'l')
        throw UnknownElement(offset, "element Cl is outside the C/H/N/O/F "
                                     "dialect");
      return Element::C;
    case 'N':
      return Element::N;
    case 'O':
      return Element::O;
    case 'F':
      return Element::F;
    case 'c':
      return Element::C;
    case 'n':
      return Element::N;
    case 'o':
      return Element::O;
    default:
      break;
    }
    if (c == 'B' && peek_next() == 'r')
      throw UnknownElement(offset, "element Br is outside the C/H/N/O/F "
                                   "dialect");
    throw UnknownElement(offset, std::string("unknown atom symbol '") + c +
                                     "'");
  }

  char peek_next() const {
    return pos + 1 < text.size() ? text[pos + 1] : '\0';
  }

  void parse_bracket() {
    const std::size_t start = pos;
    ++pos;  // '['
    if (pos < text.size() && std::isdigit(static_cast<unsigned char>(
                                 text[pos])))
      throw UnsupportedFeature(pos, "isotope labels are not supported");
    if (pos >= text.size())
      throw BadSyntax(start, "unterminated bracket atom");

    Element el;
    bool aromatic = false;
    const char sym = text[pos];
    const std::size_t sym_off = pos;
    switch (sym) {
    case 'H':
      el = Element::H;
      break;
    case 'C':
    case 'N':
    case 'O':
    case 'F':
    case 'c':
    case 'n':
    case 'o':
      el = read_organic(sym_off);
      aromatic = std::islower(static_cast<unsigned char>(sym)) != 0;
      break;
    default:
      throw UnknownElement(sym_off, std::string("unknown bracket element '") +
                                        sym + "'");
    }
    ++pos;

    while (pos < text.size() && text[pos] == '@') {
      warn("stereo marker '@' at byte " + std::to_string(pos) + " ignored");
      ++pos;
    }

    int explicit_h = 0;
    // 'H' inside a bracket is a hydrogen count except for the [H] atom
    // itself, which was consumed as the element symbol above.
    if (pos < text.size() && text[pos] == 'H') {
      ++pos;
      explicit_h = 1;
      if (pos < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos]))) {
        explicit_h = text[pos] - '0';
        ++pos;
      }
    }

    int charge = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      const char sign_char = text[pos];
      const int sign = sign_char == '+' ? 1 : -1;
      const std::size_t charge_off = pos;
      ++pos;
      int magnitude = 1;
      if (pos < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos]))) {
        magnitude = text[pos] - '0';
        ++pos;
      } else {
        while (pos < text.size() && text[pos] == sign_char) {
          ++magnitude;
          ++pos;
        }
      }
      if (magnitude > 1)
        throw UnsupportedFeature(charge_off,
                                 "charges beyond +-1 are not supported");
      charge = sign * magnitude;
    }

    if (pos >= text.size() || text[pos] != ']')
      throw BadSyntax(pos < text.size() ? pos : start,
                      "expected ']' to close bracket atom");
    ++pos;

    if (allowed_valence(el, charge) < 0)
      throw ValenceViolation(sym_off,
                             std::string("charge not supported on element '") +
                                 element_symbol(el) + "'");
    add_atom(el, charge, explicit_h, aromatic, true, start);
  }

  void parse_all() {
    while (pos < text.size()) {
      const char c = text[pos];
      const std::size_t offset = pos;
      if (c == '[') {
        parse_bracket();
        continue;
      }
      if (c == 'C' || c == 'N' || c == 'O' || c == 'F' || c == 'c' ||
          c == 'n' || c == 'o') {
        Element el = read_organic(offset);
        const bool aromatic =
            std::islower(static_cast<unsigned char>(c)) != 0;
        ++pos;
        add_atom(el, 0, 0, aromatic, false, offset);
        continue;
      }
      if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
          c == '\\') {
        if (pending.set)
          throw BadSyntax(offset, "two bond symbols in a row");
        pending.set = true;
        pending.offset = offset;
        if (c == '=') {
          pending.order = 2;
        } else if (c == '#') {
          pending.order = 3;
        } else if (c == ':') {
          pending.aromatic = true;
          pending.order = 1;
        } else {
          if (c == '/' || c == '\\')
            warn(std::string("stereo bond '") + c + "' at byte " +
                 std::to_string(offset) + " treated as single");
          pending.order = 1;
        }
        ++pos;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        handle_ring_digit(c - '0', offset);
        ++pos;
        continue;
      }
      if (c == '%') {
        if (pos + 2 >= text.size() ||
            !std::isdigit(static_cast<unsigned char>(text[pos + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text[pos + 2])))
          throw BadSyntax(offset, "'%' ring closure needs two digits");
        handle_ring_digit((text[pos + 1] - '0') * 10 + (text[pos + 2] - '0'),
                          offset);
        pos += 3;
        continue;
      }
      if (c == '(') {
        if (prev < 0)
          throw UnbalancedParen(offset, "branch before any atom");
        if (pending.set)
          throw BadSyntax(offset, "bond symbol before '('");
        branch_stack.push_back(prev);
        ++pos;
        continue;
      }
      if (c == ')') {
        if (branch_stack.empty())
          throw UnbalancedParen(offset, "')' without matching '('");
        if (pending.set)
          throw BadSyntax(pending.offset, "dangling bond before ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos;
        continue;
      }
      if (c == '.')
        throw UnsupportedFeature(offset,
                                 "disconnected components ('.') are not "
                                 "supported");
      if (c == '@') {
        warn("stereo marker '@' at byte " + std::to_string(offset) +
             " ignored");
        ++pos;
        continue;
      }
      throw BadSyntax(offset, std::string("unexpected character '") + c +
                                  "'");
    }

    if (pending.set)
      throw BadSyntax(pending.offset, "dangling bond at end of input");
    if (!branch_stack.empty())
      throw UnbalancedParen(text.size(), "unclosed '('");
    if (!open_rings.empty())
      throw UnclosedRing(open_rings.begin()->second.offset,
                         "ring closure digit never matched");
    if (mol.atoms.empty())
      throw EmptyInput(0, "no atoms in input");
  }

  // --- kekulization ---------------------------------------------------------

  void kekulize() {
    const int n_atoms = static_cast<int>(mol.atoms.size());
    std::vector<int> demand(n_atoms, 0);
    std::vector<std::vector<int>> arom_bonds(n_atoms);
    bool any_aromatic = false;

    for (int bi = 0; bi < static_cast<int>(mol.bonds.size()); ++bi) {
      if (!bond_aromatic[bi])
        continue;
      any_aromatic = true;
      arom_bonds[mol.bonds[bi].a].push_back(bi);
      arom_bonds[mol.bonds[bi].b].push_back(bi);
    }
    for (int a = 0; a < n_atoms; ++a)
      if (mol.atoms[a].aromatic_input && arom_bonds[a].size() < 2)
        throw ValenceViolation(states[a].offset,
                               "aromatic atom is not inside an aromatic "
                               "ring");
    if (!any_aromatic)
      return;

    for (int a = 0; a < n_atoms; ++a) {
      const Atom &atom = mol.atoms[a];
      if (!atom.aromatic_input) {
        // A plain atom can take part in an aromatic bond only via an
        // explicit ':' marker; refuse rather than guess.
        if (!arom_bonds[a].empty())
          throw ValenceViolation(states[a].offset,
                                 "aromatic bond to a non-aromatic atom");
        continue;
      }
      int sigma = 0;
      int connections = 0;
      for (const Bond &b: mol.bonds)
        if (b.a == a || b.b == a) {
          ++connections;
          bool is_arom = false;
          for (int bi: arom_bonds[a])
            if (&mol.bonds[bi] == &b)
              is_arom = true;
          sigma += is_arom ? 1 : b.order;
        }
      int h;
      if (states[a].bracket)
        h = atom.explicit_h;
      else if (atom.element == Element::C)
        h = std::max(0, 3 - connections);
      else
        h = 0;
      const int v = allowed_valence(atom.element, atom.formal_charge);
      const int d = v - sigma - h;
      if (d < 0 || d > 1)
        throw ValenceViolation(states[a].offset,
                               "aromatic atom cannot be kekulized");
      demand[a] = d;
    }

    // Perfect matching over demand-1 atoms restricted to aromatic bonds.
    std::vector<int> matched_bond(n_atoms, -1);
    std::vector<bool> bond_promoted(mol.bonds.size(), false);

    std::function<bool()> match = [&]() {
      int pick = -1;
      std::size_t best = 0;
      for (int a = 0; a < n_atoms; ++a) {
        if (demand[a] != 1 || matched_bond[a] >= 0)
          continue;
        std::size_t options = 0;
        for (int bi: arom_bonds[a]) {
          const int o = mol.bonds[bi].other(a);
          if (demand[o] == 1 && matched_bond[o] < 0)
            ++options;
        }
        if (options == 0)
          return false;
        if (pick < 0 || options < best) {
          pick = a;
          best = options;
        }
      }
      if (pick < 0)
        return true;
      for (int bi: arom_bonds[pick]) {
        const int o = mol.bonds[bi].other(pick);
        if (demand[o] != 1 || matched_bond[o] >= 0)
          continue;
        matched_bond[pick] = bi;
        matched_bond[o] = bi;
        bond_promoted[bi] = true;
        if (match())
          return true;
        matched_bond[pick] = -1;
        matched_bond[o] = -1;
        bond_promoted[bi] = false;
      }
      return false;
    };

    if (!match()) {
      for (int a = 0; a < n_atoms; ++a)
        if (demand[a] == 1 && matched_bond[a] < 0)
          throw ValenceViolation(states[a].offset,
                                 "no Kekule structure exists");
      throw ValenceViolation(0, "no Kekule structure exists");
    }
    for (std::size_t bi = 0; bi < mol.bonds.size(); ++bi)
      if (bond_promoted[bi])
        mol.bonds[bi].order = 2;
  }

  void assign_hydrogens() {
    for (int a = 0; a < static_cast<int>(mol.atoms.size()); ++a) {
      Atom &atom = mol.atoms[a];
      const int v = allowed_valence(atom.element, atom.formal_charge);
      const int sum = mol.bond_order_sum(a);
      if (states[a].bracket) {
        if (sum + atom.explicit_h != v)
          throw ValenceViolation(
              states[a].offset,
              std::string("bracket atom valence ") +
                  std::to_string(sum + atom.explicit_h) + " != " +
                  std::to_string(v));
        atom.implicit_h = 0;
      } else {
        const int h = v - sum;
        if (h < 0)
          throw ValenceViolation(states[a].offset,
                                 "bond orders exceed allowed valence " +
                                     std::to_string(v));
        atom.implicit_h = h;
      }
    }
  }
};

}  // namespace

MolGraph parse_smiles(std::string_view text,
                      std::vector<std::string> *warnings) {
  if (text.empty())
    throw EmptyInput(0, "empty SMILES input");
  for (std::size_t i = 0; i < text.size(); ++i)
    if (static_cast<unsigned char>(text[i]) >= 128 ||
        std::isspace(static_cast<unsigned char>(text[i])))
      throw BadSyntax(i, "whitespace or non-ASCII byte in SMILES");

  Parser parser;
  parser.text = text;
  parser.warnings = warnings;
  parser.mol.source_text = std::string(text);
  parser.parse_all();
  parser.kekulize();
  parser.assign_hydrogens();
  annotate_rings(parser.mol);
  return std::move(parser.mol);
}

}  // namespace moldkl::chem
