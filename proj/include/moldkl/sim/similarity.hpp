//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_SIM_SIMILARITY_HPP_
#define MOLDKL_SIM_SIMILARITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "moldkl/chem/molgraph.hpp"
#include "moldkl/gp/dkl.hpp"
#include "moldkl/num/linalg.hpp"

namespace moldkl::sim {

struct Fingerprint {
  std::vector<std::uint64_t> words;
  int nbits = 0;
  int radius = 0;

  void set(int bit) {
    words[static_cast<std::size_t>(bit) >> 6] |= std::uint64_t{1}
                                                 << (bit & 63);
  }
  bool test(int bit) const {
    return (words[static_cast<std::size_t>(bit) >> 6] >> (bit & 63)) & 1;
  }
  int popcount() const;
};

// Atom identifiers are FNV-1a chains (see hash.hpp) so that independent
// implementations can agree bit for bit:
//   id_0   = chain over (atomic number, charge + 8, heavy degree, H count)
//   id_r+1 = chain over (id_r, then (order, neighbor id_r) pairs sorted
//            ascending), skipped for atoms with no heavy neighbors
// Every identifier from every round is folded in as bit (id mod nbits).
std::uint64_t atom_invariant(const chem::MolGraph &mol, int atom);
Fingerprint circular_fingerprint(const chem::MolGraph &mol, int radius = 2,
                                 int nbits = 2048);

// |a AND b| / |a OR b|; 1 when both are empty. Throws WidthMismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

struct SimilarityMatrix {
  std::vector<std::string> ids;
  num::Matrix values;  // symmetric, unit diagonal, entries in [0,1]
};

SimilarityMatrix similarity_matrix(const std::vector<chem::MolGraph> &mols,
                                   const std::vector<std::string> &ids,
                                   int radius = 2, int nbits = 2048);

// Ids of the k rows of x closest to the anchor row in embedding space,
// ascending distance, ties by lowest id, the anchor row itself excluded.
std::vector<std::string> latent_neighbors(const gp::TrainedDkl &m,
                                          const num::Matrix &x,
                                          const std::vector<std::string> &ids,
                                          const std::string &anchor_id,
                                          int k);

// Sample Pearson correlation; throws LengthMismatch (also when n < 2)
// and ConstantInput rather than returning NaN.
double pearson(const num::Vector &x, const num::Vector &y);

}  // namespace moldkl::sim

#endif  // MOLDKL_SIM_SIMILARITY_HPP_
