//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "moldkl/errors.hpp"
#include "moldkl/num/rng.hpp"
#include "moldkl/vae/vae.hpp"
#include "support/oracles.hpp"

using namespace moldkl;

namespace {

// one token per block, mostly position-determined with a few seeded flips;
// easy to reconstruct, so accuracy has room above the majority baseline
num::Matrix toy_corpus(int n, int max_len, int alphabet, std::uint64_t seed) {
  num::Rng rng(seed);
  num::Matrix x = num::Matrix::Zero(n, static_cast<num::Index>(max_len) *
                                           alphabet);
  for (int r = 0; r < n; ++r)
    for (int pos = 0; pos < max_len; ++pos) {
      int tok = pos % alphabet;
      if (rng.bounded(5) == 0)
        tok = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(alphabet)));
      x(r, static_cast<num::Index>(pos) * alphabet + tok) = 1.0;
    }
  return x;
}

}  // namespace

TEST_CASE("make_vae: shapes, determinism, guards") {
  vae::VaeConfig cfg;
  cfg.hidden = {5};
  cfg.latent_dim = 2;
  num::Rng rng(4);
  const vae::VaeParams p = vae::make_vae(3, 4, cfg, rng);
  CHECK(p.encoder.layers.front().weight.rows() == 12);
  CHECK(p.encoder.layers.back().weight.cols() == 4);  // mu + lnvar
  CHECK(p.decoder.layers.front().weight.rows() == 2);
  CHECK(p.decoder.layers.back().weight.cols() == 12);

  num::Rng r1(9), r2(9);
  std::vector<double> a, b;
  vae::VaeParams p1 = vae::make_vae(3, 4, cfg, r1);
  vae::VaeParams p2 = vae::make_vae(3, 4, cfg, r2);
  p1.encoder.pack(a);
  p1.decoder.pack(a);
  p2.encoder.pack(b);
  p2.decoder.pack(b);
  CHECK(a == b);

  CHECK_THROWS_AS(vae::make_vae(0, 4, cfg, rng), ShapeMismatch);
  CHECK_THROWS_AS(vae::make_vae(3, 1, cfg, rng), ShapeMismatch);
}

TEST_CASE("vae_encode: split outputs and width guard") {
  vae::VaeConfig cfg;
  cfg.hidden = {4};
  num::Rng rng(1);
  const vae::VaeParams p = vae::make_vae(2, 3, cfg, rng);
  const num::Matrix x = toy_corpus(5, 2, 3, 7);
  const auto [mu, lnvar] = vae::vae_encode(p, x);
  CHECK(mu.rows() == 5);
  CHECK(mu.cols() == 2);
  CHECK(lnvar.cols() == 2);
  CHECK(vae::vae_latent_map(p, x) == mu);

  const num::Matrix wrong = num::Matrix::Zero(5, 7);
  CHECK_THROWS_AS(vae::vae_encode(p, wrong), ShapeMismatch);
  CHECK_THROWS_AS(vae::vae_elbo(p, wrong, rng), ShapeMismatch);
}

TEST_CASE("kl term is non-negative for arbitrary parameters") {
  vae::VaeConfig cfg;
  cfg.hidden = {6};
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    num::Rng rng(seed);
    const vae::VaeParams p = vae::make_vae(3, 3, cfg, rng);
    const num::Matrix x = toy_corpus(6, 3, 3, seed + 100);
    const vae::ElboReport rep = vae::vae_elbo(p, x, rng);
    CHECK(rep.kl >= 0.0);
    CHECK(rep.reconstruction_nll >= 0.0);
    CHECK(std::isfinite(rep.elbo()));
  }
}

TEST_CASE("elbo gradients match central finite differences") {
  vae::VaeConfig cfg;
  cfg.hidden = {4};
  cfg.latent_dim = 2;
  num::Rng init(12);
  const vae::VaeParams p = vae::make_vae(2, 3, cfg, init);
  const num::Matrix x = toy_corpus(3, 2, 3, 55);
  const num::Rng frozen(777);  // every evaluation replays this draw

  std::vector<double> theta;
  p.encoder.pack(theta);
  p.decoder.pack(theta);

  auto loss_at = [&](const std::vector<double> &t) {
    vae::VaeParams q = p;
    q.encoder.unpack(t);
    q.decoder.unpack(t, q.encoder.parameter_count());
    num::Rng rng = frozen;
    const vae::ElboReport rep = vae::vae_elbo(q, x, rng);
    return rep.reconstruction_nll + rep.kl;
  };

  num::Rng rng = frozen;
  std::vector<double> analytic;
  vae::vae_elbo_grads(p, x, rng, &analytic);
  const std::vector<double> numeric =
      testsupport::fd_grad(loss_at, theta, 1e-5);
  REQUIRE(numeric.size() == analytic.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale =
        std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
    CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
  }

  // the grads flavor reports the same estimate as the plain one
  num::Rng r1 = frozen, r2 = frozen;
  const vae::ElboReport a = vae::vae_elbo(p, x, r1);
  const vae::ElboReport b = vae::vae_elbo_grads(p, x, r2, nullptr);
  CHECK(a.reconstruction_nll == b.reconstruction_nll);
  CHECK(a.kl == b.kl);
}

TEST_CASE("training: loss falls, kl stays non-negative, runs reproduce") {
  const num::Matrix x = toy_corpus(64, 5, 4, 9);
  vae::VaeConfig cfg;
  cfg.hidden = {16};
  cfg.epochs = 120;
  cfg.seed = 3;

  const vae::TrainVaeResult a = vae::train_vae(x, 5, 4, cfg);
  REQUIRE(a.loss_curve.size() == 121);
  CHECK(a.loss_curve.back() < a.loss_curve.front());
  for (double kl: a.kl_curve)
    CHECK(kl >= 0.0);
  for (double r: a.recon_curve)
    CHECK(r >= 0.0);

  const vae::TrainVaeResult b = vae::train_vae(x, 5, 4, cfg);
  CHECK(a.loss_curve == b.loss_curve);
  std::vector<double> pa, pb;
  a.params.encoder.pack(pa);
  a.params.decoder.pack(pa);
  b.params.encoder.pack(pb);
  b.params.decoder.pack(pb);
  CHECK(pa == pb);

  vae::VaeConfig other = cfg;
  other.seed = 4;
  CHECK(vae::train_vae(x, 5, 4, other).loss_curve != a.loss_curve);

  const double acc = vae::reconstruction_accuracy(a.params, x);
  const double base = vae::majority_baseline(x, 4);
  CHECK(acc > base);

  CHECK_THROWS_AS(vae::train_vae(num::Matrix(0, 20), 5, 4, cfg), EmptyCorpus);
}

TEST_CASE("majority baseline arithmetic") {
  num::Matrix x = num::Matrix::Zero(3, 4);  // 2 blocks, alphabet 2
  x(0, 0) = 1;
  x(0, 3) = 1;  // A B
  x(1, 0) = 1;
  x(1, 2) = 1;  // A A
  x(2, 0) = 1;
  x(2, 3) = 1;  // A B
  CHECK(vae::majority_baseline(x, 2) == doctest::Approx(4.0 / 6.0));
  CHECK_THROWS_AS(vae::majority_baseline(num::Matrix::Zero(2, 5), 2),
                  ShapeMismatch);
}
