//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/sim/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <utility>

#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"

namespace moldkl::sim {

namespace {

int atomic_number(chem::Element e) {
  switch (e) {
  case chem::Element::H: return 1;
  case chem::Element::C: return 6;
  case chem::Element::N: return 7;
  case chem::Element::O: return 8;
  case chem::Element::F: return 9;
  }
  return 0;
}

}  // namespace

int Fingerprint::popcount() const {
  int n = 0;
  for (std::uint64_t w: words)
    n += std::popcount(w);
  return n;
}

std::uint64_t atom_invariant(const chem::MolGraph &mol, int atom) {
  const chem::Atom &a = mol.atoms[static_cast<std::size_t>(atom)];
  std::uint64_t h = kFnvOffset;
  h = fnv1a64_u64(static_cast<std::uint64_t>(atomic_number(a.element)), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(a.formal_charge + 8), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(mol.heavy_degree(atom)), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(mol.total_h(atom)), h);
  return h;
}

Fingerprint circular_fingerprint(const chem::MolGraph &mol, int radius,
                                 int nbits) {
  if (nbits <= 0 || radius < 0)
    throw ShapeMismatch("fingerprint needs nbits > 0 and radius >= 0");
  Fingerprint fp;
  fp.nbits = nbits;
  fp.radius = radius;
  fp.words.assign((static_cast<std::size_t>(nbits) + 63) / 64, 0);

  const int n = static_cast<int>(mol.atoms.size());
  const auto adj = mol.adjacency();
  std::vector<std::uint64_t> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (mol.atoms[static_cast<std::size_t>(i)].element == chem::Element::H)
      continue;  // hydrogens only contribute through neighbor H counts
    ids[static_cast<std::size_t>(i)] = atom_invariant(mol, i);
    fp.set(static_cast<int>(ids[static_cast<std::size_t>(i)] %
                            static_cast<std::uint64_t>(nbits)));
  }

  for (int round = 0; round < radius; ++round) {
    std::vector<std::uint64_t> next = ids;
    for (int i = 0; i < n; ++i) {
      if (mol.atoms[static_cast<std::size_t>(i)].element == chem::Element::H)
        continue;
      std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
      for (int bi: adj[static_cast<std::size_t>(i)]) {
        const chem::Bond &b = mol.bonds[static_cast<std::size_t>(bi)];
        const int j = b.other(i);
        if (mol.atoms[static_cast<std::size_t>(j)].element ==
            chem::Element::H)
          continue;
        env.emplace_back(static_cast<std::uint64_t>(b.order),
                         ids[static_cast<std::size_t>(j)]);
      }
      if (env.empty())
        continue;  // isolated environment is already fully described
      std::sort(env.begin(), env.end());
      std::uint64_t h = kFnvOffset;
      h = fnv1a64_u64(ids[static_cast<std::size_t>(i)], h);
      for (const auto &[order, nid]: env) {
        h = fnv1a64_u64(order, h);
        h = fnv1a64_u64(nid, h);
      }
      next[static_cast<std::size_t>(i)] = h;
      fp.set(static_cast<int>(h % static_cast<std::uint64_t>(nbits)));
    }
    ids = std::move(next);
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.nbits != b.nbits)
    throw WidthMismatch("fingerprint widths " + std::to_string(a.nbits) +
                        " and " + std::to_string(b.nbits) + " differ");
  int inter = 0;
  int uni = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    inter += std::popcount(a.words[w] & b.words[w]);
    uni += std::popcount(a.words[w] | b.words[w]);
  }
  if (uni == 0)
    return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

SimilarityMatrix similarity_matrix(const std::vector<chem::MolGraph> &mols,
                                   const std::vector<std::string> &ids,
                                   int radius, int nbits) {
  if (mols.empty())
    throw EmptyDataset("similarity matrix needs at least one molecule");
  if (ids.size() != mols.size())
    throw LengthMismatch("got " + std::to_string(ids.size()) + " ids for " +
                         std::to_string(mols.size()) + " molecules");
  std::vector<Fingerprint> fps;
  fps.reserve(mols.size());
  for (const chem::MolGraph &m: mols)
    fps.push_back(circular_fingerprint(m, radius, nbits));

  SimilarityMatrix sm;
  sm.ids = ids;
  const num::Index n = static_cast<num::Index>(mols.size());
  sm.values.resize(n, n);
  for (num::Index i = 0; i < n; ++i) {
    sm.values(i, i) = 1.0;
    for (num::Index j = i + 1; j < n; ++j) {
      const double t = tanimoto(fps[static_cast<std::size_t>(i)],
                                fps[static_cast<std::size_t>(j)]);
      sm.values(i, j) = t;
      sm.values(j, i) = t;
    }
  }
  return sm;
}

std::vector<std::string> latent_neighbors(const gp::TrainedDkl &m,
                                          const num::Matrix &x,
                                          const std::vector<std::string> &ids,
                                          const std::string &anchor_id,
                                          int k) {
  if (static_cast<num::Index>(ids.size()) != x.rows())
    throw LengthMismatch("got " + std::to_string(ids.size()) + " ids for " +
                         std::to_string(x.rows()) + " rows");
  if (k < 0 || k >= static_cast<int>(ids.size()))
    throw KTooLarge("k = " + std::to_string(k) +
                    " must lie in [0, corpus size)");
  const auto anchor_it = std::find(ids.begin(), ids.end(), anchor_id);
  if (anchor_it == ids.end())
    throw AnchorNotFound("no molecule with id '" + anchor_id + "'");
  const num::Index anchor = anchor_it - ids.begin();

  const num::Matrix z = gp::embed(m.params, x);
  std::vector<num::Index> order;
  for (num::Index i = 0; i < z.rows(); ++i)
    if (i != anchor)
      order.push_back(i);
  std::vector<double> dist(static_cast<std::size_t>(z.rows()));
  for (num::Index i = 0; i < z.rows(); ++i)
    dist[static_cast<std::size_t>(i)] = (z.row(i) - z.row(anchor)).norm();
  std::stable_sort(order.begin(), order.end(),
                   [&](num::Index a, num::Index b) {
                     const double da = dist[static_cast<std::size_t>(a)];
                     const double db = dist[static_cast<std::size_t>(b)];
                     if (da != db)
                       return da < db;
                     return ids[static_cast<std::size_t>(a)] <
                            ids[static_cast<std::size_t>(b)];
                   });
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i)
    out.push_back(ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  return out;
}

double pearson(const num::Vector &x, const num::Vector &y) {
  if (x.size() != y.size() || x.size() < 2)
    throw LengthMismatch("pearson needs two equal-length vectors of >= 2");
  const double mx = x.mean();
  const double my = y.mean();
  const num::Vector dx = x.array() - mx;
  const num::Vector dy = y.array() - my;
  const double sx = dx.squaredNorm();
  const double sy = dy.squaredNorm();
  if (sx == 0.0 || sy == 0.0)
    throw ConstantInput("pearson is undefined for a constant vector");
  return dx.dot(dy) / std::sqrt(sx * sy);
}

}  // namespace moldkl::sim
