//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_SELFIES_SELFIES_HPP_
#define MOLDKL_SELFIES_SELFIES_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "moldkl/chem/molgraph.hpp"
#include "moldkl/num/linalg.hpp"

namespace moldkl::selfies {

using TokenSequence = std::vector<std::string>;

inline constexpr const char *kPadToken = "[pad]";

// Full token inventory in pinned order. Index tokens (the Q operand after
// branch/ring tokens) take their value from this ordering, so it must never
// be reordered.
const std::vector<std::string> &token_inventory();

// Position of a token in the inventory; throws UnknownToken.
int token_index(const std::string &token);

// Valence-constrained derivation. Never fails on in-inventory tokens; the
// result is always valence-consistent and may be smaller than the token
// count implies. [pad] terminates derivation.
chem::MolGraph decode_selfies(const TokenSequence &seq);

// DFS emission whose output decodes back to a graph isomorphic to mol.
TokenSequence encode_selfies(const chem::MolGraph &mol);

struct Alphabet {
  std::vector<std::string> tokens;  // sorted byte-lexicographic, has [pad]

  int index_of(const std::string &token) const;  // throws UnknownToken
  int size() const { return static_cast<int>(tokens.size()); }
  int pad_index() const;
};

Alphabet build_alphabet(const std::vector<TokenSequence> &corpus);

// One token per line with a version header line.
std::string alphabet_to_text(const Alphabet &a);
Alphabet alphabet_from_text(std::string_view text);

// Flattened row-major (max_len x |alphabet|) indicator vector.
num::Vector one_hot(const TokenSequence &seq, const Alphabet &a,
                    int max_len);
num::Matrix one_hot_batch(const std::vector<TokenSequence> &corpus,
                          const Alphabet &a, int max_len);

// Inverse of one_hot; trailing pads are stripped.
TokenSequence one_hot_to_tokens(const num::Vector &row, const Alphabet &a,
                                int max_len);

}  // namespace moldkl::selfies

#endif  // MOLDKL_SELFIES_SELFIES_HPP_
