//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "moldkl/chem/smiles.hpp"
#include "moldkl/errors.hpp"
#include "moldkl/hash.hpp"
#include "moldkl/num/rng.hpp"
#include "moldkl/sim/similarity.hpp"
#include "support/oracles.hpp"

using namespace moldkl;

namespace {

sim::Fingerprint bits(std::vector<int> set_bits, int nbits = 64) {
  sim::Fingerprint fp;
  fp.nbits = nbits;
  fp.words.assign((static_cast<std::size_t>(nbits) + 63) / 64, 0);
  for (int b: set_bits)
    fp.set(b);
  return fp;
}

}  // namespace

TEST_CASE("methane hashes to exactly one bit") {
  const chem::MolGraph mol = chem::parse_smiles("C");
  const sim::Fingerprint fp = sim::circular_fingerprint(mol, 2, 2048);
  CHECK(fp.popcount() == 1);

  // independent trace of the documented chain: (Z, charge+8, degree, H)
  std::uint64_t id0 = kFnvOffset;
  id0 = fnv1a64_u64(6, id0);
  id0 = fnv1a64_u64(8, id0);
  id0 = fnv1a64_u64(0, id0);
  id0 = fnv1a64_u64(4, id0);
  CHECK(sim::atom_invariant(mol, 0) == id0);
  CHECK(fp.test(static_cast<int>(id0 % 2048)));
}

TEST_CASE("round-1 identifier of ethane follows the documented chain") {
  const chem::MolGraph mol = chem::parse_smiles("CC");
  const std::uint64_t id0 = sim::atom_invariant(mol, 0);
  CHECK(id0 == sim::atom_invariant(mol, 1));  // symmetric atoms

  std::uint64_t id1 = kFnvOffset;
  id1 = fnv1a64_u64(id0, id1);
  id1 = fnv1a64_u64(1, id1);    // bond order
  id1 = fnv1a64_u64(id0, id1);  // neighbor round-0 id
  const sim::Fingerprint fp = sim::circular_fingerprint(mol, 1, 2048);
  CHECK(fp.test(static_cast<int>(id0 % 2048)));
  CHECK(fp.test(static_cast<int>(id1 % 2048)));
  CHECK(fp.popcount() == 2);
}

TEST_CASE("fingerprints are graph-determined and discriminate") {
  const sim::Fingerprint a =
      sim::circular_fingerprint(chem::parse_smiles("CCO"), 2, 2048);
  const sim::Fingerprint b =
      sim::circular_fingerprint(chem::parse_smiles("CCO"), 2, 2048);
  CHECK(a.words == b.words);

  const sim::Fingerprint ethane =
      sim::circular_fingerprint(chem::parse_smiles("CC"), 2, 2048);
  CHECK(a.words != ethane.words);
  CHECK(a.popcount() >= 1);
  CHECK(ethane.popcount() >= 1);
}

TEST_CASE("tanimoto arithmetic and guards") {
  const sim::Fingerprint a = bits({0, 1, 2, 3});
  const sim::Fingerprint b = bits({2, 3, 4});
  CHECK(sim::tanimoto(a, b) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(sim::tanimoto(b, a) == sim::tanimoto(a, b));
  CHECK(sim::tanimoto(a, a) == 1.0);
  CHECK(sim::tanimoto(bits({0, 1}), bits({2, 3})) == 0.0);
  CHECK(sim::tanimoto(bits({}), bits({})) == 1.0);
  CHECK_THROWS_AS(sim::tanimoto(bits({0}, 64), bits({0}, 128)),
                  WidthMismatch);
}

TEST_CASE("jaccard distance obeys the triangle inequality (sampled)") {
  num::Rng rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    sim::Fingerprint f[3];
    for (auto &fp: f) {
      fp = bits({}, 64);
      const int k = 1 + static_cast<int>(rng.bounded(12));
      for (int i = 0; i < k; ++i)
        fp.set(static_cast<int>(rng.bounded(64)));
    }
    const double dab = 1.0 - sim::tanimoto(f[0], f[1]);
    const double dbc = 1.0 - sim::tanimoto(f[1], f[2]);
    const double dac = 1.0 - sim::tanimoto(f[0], f[2]);
    CHECK(dac <= dab + dbc + 1e-12);
  }
}

TEST_CASE("similarity matrix invariants") {
  const std::vector<std::string> smis = {
      "C",          "CC",         "CCC",         "CCO",      "CC(=O)C",
      "c1ccccc1",   "c1ccncc1",   "C1CCCCC1",    "CC(C)C",   "CC(C)(C)C",
      "OCC(O)CO",   "N#CC=O",     "C1CC1",       "FC(F)F",   "CCN",
      "CC=CC",      "COC",        "C=CC=C",      "OC=O",     "CNC=O"};
  std::vector<chem::MolGraph> mols;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < smis.size(); ++i) {
    mols.push_back(chem::parse_smiles(smis[i]));
    ids.push_back("m" + std::to_string(i));
  }
  const sim::SimilarityMatrix sm = sim::similarity_matrix(mols, ids);
  REQUIRE(sm.values.rows() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(sm.values(i, i) == 1.0);
    for (int j = 0; j < 20; ++j) {
      CHECK(sm.values(i, j) == sm.values(j, i));
      CHECK(sm.values(i, j) >= 0.0);
      CHECK(sm.values(i, j) <= 1.0);
    }
  }
  // duplicated molecule rows are fully similar
  const sim::SimilarityMatrix dup = sim::similarity_matrix(
      {mols[0], mols[0], mols[0]}, {"a", "b", "c"});
  CHECK(dup.values.minCoeff() == 1.0);

  const sim::SimilarityMatrix lone = sim::similarity_matrix({mols[5]}, {"x"});
  CHECK(lone.values.rows() == 1);
  CHECK(lone.values(0, 0) == 1.0);

  CHECK_THROWS_AS(sim::similarity_matrix({}, {}), EmptyDataset);
  CHECK_THROWS_AS(sim::similarity_matrix({mols[0]}, {"a", "b"}),
                  LengthMismatch);
}

namespace {

gp::TrainedDkl toy_model(num::Rng &rng, const num::Matrix &x) {
  gp::DklParams p;
  p.mlp = num::make_mlp(static_cast<int>(x.cols()), {4}, 2, rng);
  num::Vector y(x.rows());
  for (num::Index i = 0; i < x.rows(); ++i)
    y(i) = x(i, 0);
  return gp::condition(p, x, y);
}

}  // namespace

TEST_CASE("latent neighbors match a full-sort oracle") {
  num::Rng rng(5);
  num::Matrix x(50, 3);
  for (num::Index i = 0; i < 50; ++i)
    for (num::Index j = 0; j < 3; ++j)
      x(i, j) = num::normal(rng);
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i)
    ids.push_back("id" + std::to_string(i));

  const gp::TrainedDkl m = toy_model(rng, x);
  const num::Matrix z = gp::embed(m.params, x);

  const int anchor = 17;
  std::vector<int> order;
  for (int i = 0; i < 50; ++i)
    if (i != anchor)
      order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = (z.row(a) - z.row(anchor)).norm();
    const double db = (z.row(b) - z.row(anchor)).norm();
    if (da != db)
      return da < db;
    return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
  });

  const std::vector<std::string> got =
      sim::latent_neighbors(m, x, ids, "id17", 5);
  REQUIRE(got.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(got[static_cast<std::size_t>(i)] ==
          ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);

  CHECK(sim::latent_neighbors(m, x, ids, "id17", 0).empty());
}

TEST_CASE("a duplicate of the anchor is the first neighbor") {
  num::Rng rng(6);
  num::Matrix x(6, 2);
  for (num::Index i = 0; i < 6; ++i)
    for (num::Index j = 0; j < 2; ++j)
      x(i, j) = num::normal(rng);
  x.row(3) = x.row(0);  // exact duplicate of the anchor
  const gp::TrainedDkl m = toy_model(rng, x);
  const std::vector<std::string> ids = {"a", "b", "c", "twin", "e", "f"};
  const std::vector<std::string> got =
      sim::latent_neighbors(m, x, ids, "a", 3);
  REQUIRE(got.size() == 3);
  CHECK(got[0] == "twin");
}

TEST_CASE("neighbor order survives a constant latent shift") {
  num::Rng rng(7);
  num::Matrix x(20, 2);
  for (num::Index i = 0; i < 20; ++i)
    for (num::Index j = 0; j < 2; ++j)
      x(i, j) = num::normal(rng);
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i)
    ids.push_back("n" + std::to_string(i));

  gp::TrainedDkl m = toy_model(rng, x);
  gp::DklParams shifted = m.params;
  // output layer is affine, so a bias offset translates every embedding
  shifted.mlp.layers.back().bias.array() += 3.25;
  num::Vector y(x.rows());
  for (num::Index i = 0; i < x.rows(); ++i)
    y(i) = x(i, 0);
  const gp::TrainedDkl m2 = gp::condition(shifted, x, y);

  CHECK(sim::latent_neighbors(m, x, ids, "n4", 8) ==
        sim::latent_neighbors(m2, x, ids, "n4", 8));
}

TEST_CASE("latent neighbor guards") {
  num::Rng rng(8);
  num::Matrix x(4, 2);
  for (num::Index i = 0; i < 4; ++i)
    for (num::Index j = 0; j < 2; ++j)
      x(i, j) = num::normal(rng);
  const gp::TrainedDkl m = toy_model(rng, x);
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  CHECK_THROWS_AS(sim::latent_neighbors(m, x, ids, "zz", 2), AnchorNotFound);
  CHECK_THROWS_AS(sim::latent_neighbors(m, x, ids, "a", 4), KTooLarge);
  CHECK_THROWS_AS(sim::latent_neighbors(m, x, ids, "a", -1), KTooLarge);
  CHECK_THROWS_AS(sim::latent_neighbors(m, x, {"a", "b"}, "a", 1),
                  LengthMismatch);
}

TEST_CASE("pearson: pinned value, symmetry, affine invariance") {
  num::Vector x(3), y(3);
  x << 1, 2, 3;
  y << 2, 4, 7;
  const double r = sim::pearson(x, y);
  CHECK(r == doctest::Approx(0.99339926779878285).epsilon(1e-15));
  CHECK(r == doctest::Approx(testsupport::oracle_pearson(
                 {1, 2, 3}, {2, 4, 7})).epsilon(1e-14));

  CHECK(sim::pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sim::pearson(x, (-x).eval()) == doctest::Approx(-1.0).epsilon(1e-15));

  num::Rng rng(9);
  num::Vector u(40), v(40);
  for (int i = 0; i < 40; ++i) {
    u(i) = num::normal(rng);
    v(i) = num::normal(rng);
  }
  const double base = sim::pearson(u, v);
  const num::Vector scaled = (2.5 * u.array() + 7.0).matrix();
  CHECK(std::abs(sim::pearson(scaled, v) - base) < 1e-12);
  CHECK(std::abs(sim::pearson(u, v) - sim::pearson(v, u)) < 1e-15);
  CHECK(sim::pearson((-u).eval(), v) ==
        doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("pearson guards") {
  num::Vector x(3), y(2), flat(3);
  x << 1, 2, 3;
  y << 1, 2;
  flat << 5, 5, 5;
  CHECK_THROWS_AS(sim::pearson(x, y), LengthMismatch);
  CHECK_THROWS_AS(sim::pearson(num::Vector::Zero(1), num::Vector::Zero(1)),
                  LengthMismatch);
  CHECK_THROWS_AS(sim::pearson(x, flat), ConstantInput);
  CHECK_THROWS_AS(sim::pearson(flat, x), ConstantInput);
}
