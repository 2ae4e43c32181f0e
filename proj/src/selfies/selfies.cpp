//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/selfies/selfies.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "moldkl/errors.hpp"

namespace moldkl::selfies {

namespace {

using chem::Atom;
using chem::Bond;
using chem::Element;
using chem::MolGraph;

enum class TokenKind { kAtom, kRing, kBranch, kPad };

struct TokenInfo {
  TokenKind kind = TokenKind::kPad;
  int order = 1;  // bond marker carried by atom/ring/branch tokens
  Element element = Element::C;
  int charge = 0;
};

struct InventoryEntry {
  std::string text;
  TokenInfo info;
};

std::vector<InventoryEntry> make_inventory() {
  std::vector<InventoryEntry> inv;
  auto atom = [&](const char *text, Element e, int charge, int order) {
    inv.push_back({text, {TokenKind::kAtom, order, e, charge}});
  };
  atom("[C]", Element::C, 0, 1);
  atom("[=C]", Element::C, 0, 2);
  atom("[#C]", Element::C, 0, 3);
  atom("[N]", Element::N, 0, 1);
  atom("[=N]", Element::N, 0, 2);
  atom("[#N]", Element::N, 0, 3);
  atom("[O]", Element::O, 0, 1);
  atom("[=O]", Element::O, 0, 2);
  atom("[F]", Element::F, 0, 1);
  atom("[N+1]", Element::N, 1, 1);
  atom("[=N+1]", Element::N, 1, 2);
  atom("[#N+1]", Element::N, 1, 3);
  atom("[N-1]", Element::N, -1, 1);
  atom("[=N-1]", Element::N, -1, 2);
  atom("[O+1]", Element::O, 1, 1);
  atom("[=O+1]", Element::O, 1, 2);
  atom("[#O+1]", Element::O, 1, 3);
  atom("[O-1]", Element::O, -1, 1);
  inv.push_back({"[Ring1]", {TokenKind::kRing, 1, Element::C, 0}});
  inv.push_back({"[=Ring1]", {TokenKind::kRing, 2, Element::C, 0}});
  inv.push_back({"[#Ring1]", {TokenKind::kRing, 3, Element::C, 0}});
  inv.push_back({"[Branch1]", {TokenKind::kBranch, 1, Element::C, 0}});
  inv.push_back({"[=Branch1]", {TokenKind::kBranch, 2, Element::C, 0}});
  inv.push_back({kPadToken, {TokenKind::kPad, 1, Element::C, 0}});
  return inv;
}

const std::vector<InventoryEntry> &inventory() {
  static const std::vector<InventoryEntry> inv = make_inventory();
  return inv;
}

const std::map<std::string, int> &inventory_index() {
  static const std::map<std::string, int> idx = [] {
    std::map<std::string, int> m;
    const auto &inv = inventory();
    for (int i = 0; i < static_cast<int>(inv.size()); ++i)
      m.emplace(inv[i].text, i);
    return m;
  }();
  return idx;
}

const TokenInfo &info_of(const std::string &token) {
  return inventory()[static_cast<std::size_t>(token_index(token))].info;
}

// --- decoding ----------------------------------------------------------------

// Derivation rules (pinned):
//  - an atom token bonds to the chain head with order min(marker, remaining
//    valence of head, valence of the new atom) and becomes the new head; a
//    saturated head ends the derivation;
//  - [Branch1]/[=Branch1] read one operand token whose inventory position Q
//    sizes the branch body at Q+1 tokens; the body derives from the branch
//    origin, which keeps one valence unit for the main chain;
//  - [Ring1]/[=Ring1]/[#Ring1] read one operand token and bond the head to
//    the atom placed Q+1 positions earlier, order clamped by both ends;
//    impossible closures are skipped;
//  - [pad] halts everything; operands may be any token.
struct Decoder {
  const TokenSequence &seq;
  std::size_t pos = 0;
  bool halted = false;
  MolGraph mol;

  int remaining(int atom) const {
    return chem::allowed_valence(mol.atoms[static_cast<std::size_t>(atom)]
                                     .element,
                                 mol.atoms[static_cast<std::size_t>(atom)]
                                     .formal_charge) -
           mol.bond_order_sum(atom);
  }

  bool bond_exists(int a, int b) const {
    for (const Bond &bond: mol.bonds)
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
        return true;
    return false;
  }

  int place_atom(const TokenInfo &tok, int head, int marker_cap) {
    Atom atom;
    atom.element = tok.element;
    atom.formal_charge = tok.charge;
    const int idx = static_cast<int>(mol.atoms.size());
    mol.atoms.push_back(atom);
    if (head >= 0) {
      Bond bond;
      bond.a = head;
      bond.b = idx;
      bond.order =
          std::min({marker_cap, remaining(head),
                    chem::allowed_valence(tok.element, tok.charge)});
      mol.bonds.push_back(bond);
    }
    return idx;
  }

  // Derives tokens in [pos, end); `head` is the chain head or -1.
  void derive(std::size_t end, int head) {
    int current = head;
    while (!halted && pos < end) {
      const TokenInfo &tok = info_of(seq[pos]);
      ++pos;
      switch (tok.kind) {
      case TokenKind::kPad:
        halted = true;
        return;
      case TokenKind::kAtom: {
        if (current >= 0 && remaining(current) == 0) {
          halted = true;
          return;
        }
        current = place_atom(tok, current, tok.order);
        break;
      }
      case TokenKind::kBranch: {
        if (pos >= end)
          return;
        const int q = token_index(seq[pos]);
        ++pos;
        const std::size_t body_end =
            std::min(pos + static_cast<std::size_t>(q) + 1, end);
        if (current >= 0 && remaining(current) >= 2) {
          derive_branch(body_end, current, tok.order);
          if (halted)
            return;
        }
        pos = body_end;
        break;
      }
      case TokenKind::kRing: {
        if (pos >= end)
          return;
        const int q = token_index(seq[pos]);
        ++pos;
        if (current < 0)
          break;
        const int target = std::max(0, current - (q + 1));
        if (target == current || bond_exists(target, current))
          break;
        const int order =
            std::min({tok.order, remaining(current), remaining(target)});
        if (order <= 0)
          break;
        Bond bond;
        bond.a = target;
        bond.b = current;
        bond.order = order;
        mol.bonds.push_back(bond);
        break;
      }
      }
    }
  }

  void derive_branch(std::size_t end, int origin, int marker_order) {
    if (pos >= end)
      return;
    const TokenInfo &first = info_of(seq[pos]);
    if (first.kind != TokenKind::kAtom) {
      // Body does not open with an atom: derive it from the origin as-is.
      derive(end, origin);
      return;
    }
    ++pos;
    const int cap = std::min(marker_order, remaining(origin) - 1);
    const int idx = place_atom(first, origin, cap);
    derive(end, idx);
  }
};

void fill_hydrogens(MolGraph &mol) {
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    Atom &a = mol.atoms[i];
    a.implicit_h = chem::allowed_valence(a.element, a.formal_charge) -
                   mol.bond_order_sum(static_cast<int>(i));
  }
}

// --- encoding ----------------------------------------------------------------

struct Encoder {
  const MolGraph &mol;

  std::vector<std::vector<int>> adj;
  std::vector<int> bond_kind;  // 0 unseen, 1 tree, 2 ring
  std::vector<std::vector<std::pair<int, int>>> tree;   // (child, bond)
  std::vector<std::vector<int>> rings;                  // bonds closing here
  std::vector<int> placement;
  int placed = 0;

  std::string atom_token(int atom, int bond_order) const {
    const Atom &a = mol.atoms[static_cast<std::size_t>(atom)];
    std::string t = "[";
    if (bond_order == 2)
      t += '=';
    else if (bond_order == 3)
      t += '#';
    t += chem::element_symbol(a.element);
    if (a.formal_charge > 0)
      t += "+1";
    else if (a.formal_charge < 0)
      t += "-1";
    t += ']';
    if (inventory_index().find(t) == inventory_index().end())
      throw UnsupportedFeature(0, "no token for atom environment " + t);
    return t;
  }

  const std::string &index_token(int q) const {
    const auto &inv = inventory();
    if (q < 0 || q >= static_cast<int>(inv.size()))
      throw EncodeFailure("index operand " + std::to_string(q) +
                          " exceeds the token inventory");
    return inv[static_cast<std::size_t>(q)].text;
  }

  // Spanning tree via DFS; every non-tree bond becomes a ring closure at
  // its later-visited endpoint (always a tree descendant of the other end).
  void classify() {
    std::vector<bool> seen(mol.atoms.size(), false);
    std::function<void(int)> dfs = [&](int at) {
      seen[static_cast<std::size_t>(at)] = true;
      for (int bi: adj[static_cast<std::size_t>(at)]) {
        if (bond_kind[static_cast<std::size_t>(bi)] != 0)
          continue;
        const int to = mol.bonds[static_cast<std::size_t>(bi)].other(at);
        if (!seen[static_cast<std::size_t>(to)]) {
          bond_kind[static_cast<std::size_t>(bi)] = 1;
          tree[static_cast<std::size_t>(at)].push_back({to, bi});
          dfs(to);
        } else {
          bond_kind[static_cast<std::size_t>(bi)] = 2;
          rings[static_cast<std::size_t>(at)].push_back(bi);
        }
      }
    };
    dfs(0);
    for (std::size_t a = 0; a < mol.atoms.size(); ++a)
      if (!seen[a])
        throw EncodeFailure("graph is disconnected");
  }

  void emit(int atom, TokenSequence &out) {
    placement[static_cast<std::size_t>(atom)] = placed++;

    for (int bi: rings[static_cast<std::size_t>(atom)]) {
      const Bond &b = mol.bonds[static_cast<std::size_t>(bi)];
      const int partner = b.other(atom);
      const int distance = placement[static_cast<std::size_t>(atom)] -
                           placement[static_cast<std::size_t>(partner)];
      out.push_back(b.order == 3   ? "[#Ring1]"
                    : b.order == 2 ? "[=Ring1]"
                                   : "[Ring1]");
      out.push_back(index_token(distance - 1));
    }

    // Highest-order child continues the chain, so a branch never needs a
    // triple-bond marker (there is no [#Branch1]).
    auto children = tree[static_cast<std::size_t>(atom)];
    std::stable_sort(children.begin(), children.end(),
                     [&](const auto &lhs, const auto &rhs) {
                       return mol.bonds[static_cast<std::size_t>(lhs.second)]
                                  .order <
                              mol.bonds[static_cast<std::size_t>(rhs.second)]
                                  .order;
                     });
    for (std::size_t ci = 0; ci < children.size(); ++ci) {
      const auto &[child, bi] = children[ci];
      const int order = mol.bonds[static_cast<std::size_t>(bi)].order;
      if (ci + 1 == children.size()) {
        out.push_back(atom_token(child, order));
        emit(child, out);
      } else {
        if (order > 2)
          throw EncodeFailure("triple bond inside a branch");
        TokenSequence sub;
        sub.push_back(atom_token(child, order));
        emit(child, sub);
        out.push_back(order == 2 ? "[=Branch1]" : "[Branch1]");
        out.push_back(index_token(static_cast<int>(sub.size()) - 1));
        out.insert(out.end(), sub.begin(), sub.end());
      }
    }
  }

  TokenSequence run() {
    for (const Atom &a: mol.atoms) {
      if (a.element == Element::H)
        throw UnsupportedFeature(0, "explicit hydrogen atoms have no token");
      if (a.formal_charge != 0 && a.element != Element::N &&
          a.element != Element::O)
        throw UnsupportedFeature(0, "charge outside the token table");
    }
    adj = mol.adjacency();
    bond_kind.assign(mol.bonds.size(), 0);
    tree.assign(mol.atoms.size(), {});
    rings.assign(mol.atoms.size(), {});
    placement.assign(mol.atoms.size(), -1);
    classify();
    TokenSequence out;
    out.push_back(atom_token(0, 1));
    emit(0, out);
    return out;
  }
};

}  // namespace

const std::vector<std::string> &token_inventory() {
  static const std::vector<std::string> tokens = [] {
    std::vector<std::string> t;
    for (const auto &e: inventory())
      t.push_back(e.text);
    return t;
  }();
  return tokens;
}

int token_index(const std::string &token) {
  const auto &idx = inventory_index();
  const auto it = idx.find(token);
  if (it == idx.end())
    throw UnknownToken("token '" + token + "' is not in the inventory");
  return it->second;
}

chem::MolGraph decode_selfies(const TokenSequence &seq) {
  for (const std::string &t: seq)
    token_index(t);  // validate before deriving anything
  Decoder dec{seq};
  dec.derive(seq.size(), -1);
  fill_hydrogens(dec.mol);
  chem::MolGraph mol = std::move(dec.mol);
  if (!mol.atoms.empty())
    chem::annotate_rings(mol);
  return mol;
}

TokenSequence encode_selfies(const chem::MolGraph &mol) {
  if (mol.atoms.empty())
    throw EncodeFailure("cannot encode an empty graph");
  Encoder enc{mol};
  return enc.run();
}

int Alphabet::index_of(const std::string &token) const {
  const auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
  if (it == tokens.end() || *it != token)
    throw UnknownToken("token '" + token + "' is not in the alphabet");
  return static_cast<int>(it - tokens.begin());
}

int Alphabet::pad_index() const { return index_of(kPadToken); }

Alphabet build_alphabet(const std::vector<TokenSequence> &corpus) {
  if (corpus.empty())
    throw EmptyCorpus("alphabet needs a non-empty corpus");
  std::set<std::string> set;
  set.insert(kPadToken);
  for (const TokenSequence &seq: corpus)
    for (const std::string &t: seq) {
      token_index(t);  // reject out-of-inventory tokens
      set.insert(t);
    }
  Alphabet a;
  a.tokens.assign(set.begin(), set.end());
  return a;
}

std::string alphabet_to_text(const Alphabet &a) {
  std::string out = "# moldkl alphabet\n# version: 1\n";
  for (const std::string &t: a.tokens) {
    out += t;
    out += '\n';
  }
  return out;
}

Alphabet alphabet_from_text(std::string_view text) {
  Alphabet a;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    a.tokens.push_back(line);
  }
  if (a.tokens.empty())
    throw CorruptFile("alphabet file has no tokens");
  if (!std::is_sorted(a.tokens.begin(), a.tokens.end()))
    throw CorruptFile("alphabet file is not sorted");
  if (!std::binary_search(a.tokens.begin(), a.tokens.end(),
                          std::string(kPadToken)))
    throw CorruptFile("alphabet file lacks " + std::string(kPadToken));
  return a;
}

num::Vector one_hot(const TokenSequence &seq, const Alphabet &a,
                    int max_len) {
  if (static_cast<int>(seq.size()) > max_len)
    throw SequenceTooLong("sequence of " + std::to_string(seq.size()) +
                          " tokens exceeds max_len " +
                          std::to_string(max_len));
  const int width = a.size();
  num::Vector row =
      num::Vector::Zero(static_cast<num::Index>(max_len) * width);
  for (int i = 0; i < max_len; ++i) {
    const int col = i < static_cast<int>(seq.size())
                        ? a.index_of(seq[static_cast<std::size_t>(i)])
                        : a.pad_index();
    row(static_cast<num::Index>(i) * width + col) = 1.0;
  }
  return row;
}

num::Matrix one_hot_batch(const std::vector<TokenSequence> &corpus,
                          const Alphabet &a, int max_len) {
  num::Matrix x(static_cast<num::Index>(corpus.size()),
                static_cast<num::Index>(max_len) * a.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    x.row(static_cast<num::Index>(i)) = one_hot(corpus[i], a, max_len);
  return x;
}

TokenSequence one_hot_to_tokens(const num::Vector &row, const Alphabet &a,
                                int max_len) {
  const int width = a.size();
  if (row.size() != static_cast<num::Index>(max_len) * width)
    throw ShapeMismatch("one-hot row length " + std::to_string(row.size()) +
                        " vs " + std::to_string(max_len * width));
  TokenSequence seq;
  for (int i = 0; i < max_len; ++i) {
    int col = -1;
    for (int j = 0; j < width; ++j)
      if (row(static_cast<num::Index>(i) * width + j) == 1.0) {
        if (col >= 0)
          throw ShapeMismatch("multiple ones in one-hot row " +
                              std::to_string(i));
        col = j;
      }
    if (col < 0)
      throw ShapeMismatch("no one in one-hot row " + std::to_string(i));
    seq.push_back(a.tokens[static_cast<std::size_t>(col)]);
  }
  while (!seq.empty() && seq.back() == kPadToken)
    seq.pop_back();
  return seq;
}

}  // namespace moldkl::selfies
