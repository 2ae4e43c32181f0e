//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_VAE_VAE_HPP_
#define MOLDKL_VAE_VAE_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "moldkl/num/linalg.hpp"
#include "moldkl/num/mlp.hpp"
#include "moldkl/num/rng.hpp"

namespace moldkl::vae {

struct VaeConfig {
  int latent_dim = 2;
  std::vector<num::Index> hidden = {128};
  int epochs = 200;
  double lr = 5e-3;
  std::uint64_t seed = 0;
};

struct VaeParams {
  num::Mlp encoder;  // (max_len * alphabet) -> 2 * latent (mu, ln sigma^2)
  num::Mlp decoder;  // latent -> (max_len * alphabet) logits
  int latent_dim = 2;
  int max_len = 0;
  int alphabet_size = 0;
};

VaeParams make_vae(int max_len, int alphabet_size, const VaeConfig &cfg,
                   num::Rng &rng);

// Deterministic forward pass; first latent_dim output columns are mu,
// the rest ln sigma^2.
std::pair<num::Matrix, num::Matrix> vae_encode(const VaeParams &p,
                                               const num::Matrix &x);

struct ElboReport {
  double reconstruction_nll = 0.0;  // nats, mean per molecule
  double kl = 0.0;                  // nats, mean per molecule
  double elbo() const { return -(reconstruction_nll + kl); }
};

// One-sample reparameterized estimate: z = mu + sigma * eps.
ElboReport vae_elbo(const VaeParams &p, const num::Matrix &x, num::Rng &rng);

// Same estimate plus d(recon + kl)/dparams, packed encoder first in
// Mlp::pack order. The rng supplies the reparameterization draw, so two
// calls started from copies of one rng state share the identical noise;
// that property makes the gradient finite-difference checkable.
ElboReport vae_elbo_grads(const VaeParams &p, const num::Matrix &x,
                          num::Rng &rng, std::vector<double> *grads);

struct TrainVaeResult {
  VaeParams params;
  std::vector<double> loss_curve;   // recon + kl entering each epoch, plus final
  std::vector<double> kl_curve;     // same sampling points
  std::vector<double> recon_curve;
};

TrainVaeResult train_vae(const num::Matrix &x, int max_len,
                         int alphabet_size, const VaeConfig &cfg);

// mu_z per row, no sampling.
num::Matrix vae_latent_map(const VaeParams &p, const num::Matrix &x);

// Fraction of positions whose argmax decoder logit (from mu_z) matches the
// input token.
double reconstruction_accuracy(const VaeParams &p, const num::Matrix &x);

// Accuracy of always predicting the corpus-wide most frequent token.
double majority_baseline(const num::Matrix &x, int alphabet_size);

}  // namespace moldkl::vae

#endif  // MOLDKL_VAE_VAE_HPP_
