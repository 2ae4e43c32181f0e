//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_GP_DKL_HPP_
#define MOLDKL_GP_DKL_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "moldkl/num/linalg.hpp"
#include "moldkl/num/mlp.hpp"

namespace moldkl::gp {

struct DklConfig {
  int latent_dim = 2;
  std::vector<num::Index> hidden = {128, 32};
  int epochs = 500;
  double lr = 5e-3;
  std::uint64_t seed = 0;
  double init_log_lengthscale = 0.0;
  double init_log_outputscale = 0.0;
  double init_log_noise = std::log(0.01);
};

struct DklParams {
  num::Mlp mlp;
  double log_lengthscale = 0.0;
  double log_outputscale = 0.0;
  double log_noise = std::log(0.01);

  double lengthscale() const { return std::exp(log_lengthscale); }
  double outputscale() const { return std::exp(log_outputscale); }
  double noise() const { return std::exp(log_noise); }
};

struct TargetStats {
  double mean = 0.0;
  double std = 1.0;
};

// n == 1 degenerates to identity standardization; constant targets with
// n >= 2 are refused because the division by std would blow up.
TargetStats compute_target_stats(const num::Vector &y);

struct Posterior {
  num::Vector mean;  // target units
  num::Vector std;   // target units
};

struct TrainedDkl {
  DklParams params;
  num::Matrix train_embeddings;  // (n x latent_dim)
  num::Vector alpha;             // Ktilde^-1 ytilde
  num::CholeskyFactor chol;      // of Ktilde = K + (noise + jitter) I
  TargetStats target_stats;
  double jitter = 0.0;           // diagonal increment actually applied
};

// Latent coordinates of a one-hot batch (rows are molecules).
num::Matrix embed(const DklParams &p, const num::Matrix &x);

// K[i,j] = outputscale * exp(-|z1_i - z2_j|^2 / (2 l^2)).
num::Matrix kernel_matrix(const num::Matrix &z1, const num::Matrix &z2,
                          double lengthscale, double outputscale);

double nll(const DklParams &p, const num::Matrix &x, const num::Vector &y);

struct DklGrads {
  num::MlpGrads mlp;
  double d_log_lengthscale = 0.0;
  double d_log_outputscale = 0.0;
  double d_log_noise = 0.0;
};

DklGrads nll_grad(const DklParams &p, const num::Matrix &x,
                  const num::Vector &y);

struct TrainResult {
  TrainedDkl model;
  std::vector<double> loss_curve;  // nll entering each epoch, plus final
};

TrainResult train_dkl(const num::Matrix &x, const num::Vector &y,
                      const DklConfig &cfg);

// Warm start from existing parameters; used by the active loop's retrains.
TrainResult train_dkl_from(DklParams start, const num::Matrix &x,
                           const num::Vector &y, int epochs, double lr);

// Rebuilds the cached factorization/alpha for fixed parameters.
TrainedDkl condition(const DklParams &p, const num::Matrix &x,
                     const num::Vector &y);

Posterior predict(const TrainedDkl &m, const num::Matrix &x_query);

// Latent-space queries bypassing the feature map (grid surfaces).
Posterior predict_latent(const TrainedDkl &m, const num::Matrix &z_query);

// Identical to predict; batching shapes memory only. Queries are processed
// one at a time internally, so any batch_size gives bitwise-equal output.
Posterior batch_predict(const TrainedDkl &m, const num::Matrix &x_query,
                        int batch_size = 250);

struct LatentGrid {
  num::Vector z1;    // resolution values along the first latent axis
  num::Vector z2;
  num::Matrix mean;  // (resolution x resolution), [i,j] at (z1_i, z2_j)
  num::Matrix std;
};

// Uniform grid over the training embeddings' bounding box padded 10% per
// side. Requires latent_dim == 2.
LatentGrid latent_grid_predict(const TrainedDkl &m, int resolution);

}  // namespace moldkl::gp

#endif  // MOLDKL_GP_DKL_HPP_
