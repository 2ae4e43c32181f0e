//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/gp/dkl.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "moldkl/errors.hpp"
#include "moldkl/num/adam.hpp"

namespace moldkl::gp {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;

struct Factorization {
  num::CholeskyFactor chol;
  double jitter = 0.0;
};

// Jitter ladder: 1e-8 * mean(diag Ktilde), escalating tenfold up to 1e-2.
Factorization factorize_with_jitter(const num::Matrix &k, double noise) {
  const num::Index n = k.rows();
  const double diag_mean = k.diagonal().mean() + noise;
  const double max_jitter = 1e-2 * diag_mean;
  for (double jitter = 1e-8 * diag_mean; jitter <= max_jitter * (1 + 1e-12);
       jitter *= 10.0) {
    num::Matrix ktilde = k;
    ktilde.diagonal().array() += noise + jitter;
    try {
      return Factorization{num::cholesky(ktilde), jitter};
    } catch (const NotPositiveDefinite &) {
      // escalate
    }
  }
  throw NumericalFailure("kernel matrix not factorizable after jitter "
                         "escalation to 1e-2 (n = " +
                         std::to_string(n) + ")");
}

num::Vector standardize(const num::Vector &y, const TargetStats &stats) {
  return (y.array() - stats.mean) / stats.std;
}

struct Evaluation {
  double loss = 0.0;
  DklGrads grads;
};

// Shared by nll_grad and the training loop so the factorization is done once.
Evaluation evaluate(const DklParams &p, const num::Matrix &x,
                    const num::Vector &y) {
  if (x.rows() != y.size())
    throw ShapeMismatch("dkl: " + std::to_string(x.rows()) + " inputs vs " +
                        std::to_string(y.size()) + " targets");
  const TargetStats stats = compute_target_stats(y);
  const num::Vector yt = standardize(y, stats);
  const double l = p.lengthscale();
  const double of = p.outputscale();
  const double noise = p.noise();
  const num::Index n = x.rows();

  num::ForwardCache cache;
  num::Matrix z = num::mlp_forward(p.mlp, x, &cache);
  num::Matrix d2 = num::squared_distances(z, z);
  num::Matrix k = of * (-d2 / (2.0 * l * l)).array().exp().matrix();

  Factorization fac = factorize_with_jitter(k, noise);
  num::Vector alpha = fac.chol.solve(yt);

  Evaluation ev;
  ev.loss = 0.5 * yt.dot(alpha) + 0.5 * fac.chol.log_det() +
            0.5 * static_cast<double>(n) * kLn2Pi;

  // dL/dKtilde = 0.5 (Ktilde^-1 - alpha alpha^T)
  const num::Matrix eye = num::Matrix::Identity(n, n);
  num::Matrix g = 0.5 * (fac.chol.solve(eye) - alpha * alpha.transpose());

  num::Matrix gk = g.cwiseProduct(k);
  ev.grads.d_log_outputscale = gk.sum();
  ev.grads.d_log_lengthscale = gk.cwiseProduct(d2).sum() / (l * l);
  ev.grads.d_log_noise = noise * g.trace();

  // dL/dz_i = (2 / l^2) sum_j (G.K)_ij (z_j - z_i)
  num::Vector row_sums = gk.rowwise().sum();
  num::Matrix dz =
      (2.0 / (l * l)) * (gk * z - row_sums.asDiagonal() * z);
  ev.grads.mlp = num::mlp_backward(p.mlp, cache, dz);
  return ev;
}

std::vector<double> pack_params(const DklParams &p) {
  std::vector<double> flat;
  flat.reserve(p.mlp.parameter_count() + 3);
  p.mlp.pack(flat);
  flat.push_back(p.log_lengthscale);
  flat.push_back(p.log_outputscale);
  flat.push_back(p.log_noise);
  return flat;
}

void unpack_params(const std::vector<double> &flat, DklParams &p) {
  p.mlp.unpack(flat);
  p.log_lengthscale = flat[flat.size() - 3];
  p.log_outputscale = flat[flat.size() - 2];
  p.log_noise = flat[flat.size() - 1];
}

std::vector<double> pack_grads(const DklGrads &g) {
  std::vector<double> flat;
  g.mlp.pack(flat);
  flat.push_back(g.d_log_lengthscale);
  flat.push_back(g.d_log_outputscale);
  flat.push_back(g.d_log_noise);
  return flat;
}

TrainResult train_loop(DklParams params, const num::Matrix &x,
                       const num::Vector &y, int epochs, double lr) {
  std::vector<double> flat = pack_params(params);
  num::Adam adam(flat.size());
  num::AdamConfig acfg;
  acfg.lr = lr;

  TrainResult result;
  result.loss_curve.reserve(static_cast<std::size_t>(epochs) + 1);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Evaluation ev = evaluate(params, x, y);
    if (!std::isfinite(ev.loss))
      throw NumericalFailure("nll became non-finite at epoch " +
                             std::to_string(epoch));
    result.loss_curve.push_back(ev.loss);
    adam.step(acfg, flat, pack_grads(ev.grads));
    unpack_params(flat, params);
  }
  result.loss_curve.push_back(nll(params, x, y));
  result.model = condition(params, x, y);
  return result;
}

}  // namespace

TargetStats compute_target_stats(const num::Vector &y) {
  if (y.size() == 0)
    throw ShapeMismatch("target vector is empty");
  if (y.size() == 1)
    return TargetStats{0.0, 1.0};
  const double mean = y.mean();
  const double var = (y.array() - mean).square().sum() /
                     static_cast<double>(y.size());
  const double sd = std::sqrt(var);
  if (sd <= 1e-12 * std::max(1.0, std::abs(mean)))
    throw DegenerateTargets("targets are constant (std = " +
                            std::to_string(sd) + ")");
  return TargetStats{mean, sd};
}

num::Matrix embed(const DklParams &p, const num::Matrix &x) {
  return num::mlp_forward(p.mlp, x);
}

num::Matrix kernel_matrix(const num::Matrix &z1, const num::Matrix &z2,
                          double lengthscale, double outputscale) {
  num::Matrix d2 = num::squared_distances(z1, z2);
  return outputscale *
         (-d2 / (2.0 * lengthscale * lengthscale)).array().exp().matrix();
}

double nll(const DklParams &p, const num::Matrix &x, const num::Vector &y) {
  if (x.rows() != y.size())
    throw ShapeMismatch("dkl: " + std::to_string(x.rows()) + " inputs vs " +
                        std::to_string(y.size()) + " targets");
  const TargetStats stats = compute_target_stats(y);
  const num::Vector yt = standardize(y, stats);
  num::Matrix z = embed(p, x);
  num::Matrix k = kernel_matrix(z, z, p.lengthscale(), p.outputscale());
  Factorization fac = factorize_with_jitter(k, p.noise());
  num::Vector alpha = fac.chol.solve(yt);
  return 0.5 * yt.dot(alpha) + 0.5 * fac.chol.log_det() +
         0.5 * static_cast<double>(x.rows()) * kLn2Pi;
}

DklGrads nll_grad(const DklParams &p, const num::Matrix &x,
                  const num::Vector &y) {
  return evaluate(p, x, y).grads;
}

TrainResult train_dkl(const num::Matrix &x, const num::Vector &y,
                      const DklConfig &cfg) {
  if (x.rows() < 2)
    throw DatasetTooSmall("train_dkl needs at least 2 points, got " +
                          std::to_string(x.rows()));
  compute_target_stats(y);  // reject constant targets before any work
  num::Rng rng(cfg.seed);
  DklParams params;
  params.mlp = num::make_mlp(x.cols(), cfg.hidden, cfg.latent_dim, rng,
                             num::Activation::kTanh);
  params.log_lengthscale = cfg.init_log_lengthscale;
  params.log_outputscale = cfg.init_log_outputscale;
  params.log_noise = cfg.init_log_noise;
  return train_loop(std::move(params), x, y, cfg.epochs, cfg.lr);
}

TrainResult train_dkl_from(DklParams start, const num::Matrix &x,
                           const num::Vector &y, int epochs, double lr) {
  return train_loop(std::move(start), x, y, epochs, lr);
}

TrainedDkl condition(const DklParams &p, const num::Matrix &x,
                     const num::Vector &y) {
  TrainedDkl m;
  m.params = p;
  m.target_stats = compute_target_stats(y);
  m.train_embeddings = embed(p, x);
  num::Matrix k = kernel_matrix(m.train_embeddings, m.train_embeddings,
                                p.lengthscale(), p.outputscale());
  Factorization fac = factorize_with_jitter(k, p.noise());
  m.chol = std::move(fac.chol);
  m.jitter = fac.jitter;
  m.alpha = m.chol.solve(standardize(y, m.target_stats));
  return m;
}

Posterior predict(const TrainedDkl &m, const num::Matrix &x_query) {
  return predict_latent(m, embed(m.params, x_query));
}

Posterior predict_latent(const TrainedDkl &m, const num::Matrix &z_query) {
  if (z_query.cols() != m.train_embeddings.cols())
    throw ShapeMismatch("latent query dim " + std::to_string(z_query.cols()) +
                        " vs model " +
                        std::to_string(m.train_embeddings.cols()));
  const double l = m.params.lengthscale();
  const double of = m.params.outputscale();
  const double noise = m.params.noise();
  const num::Index nq = z_query.rows();

  Posterior post;
  post.mean.resize(nq);
  post.std.resize(nq);
  // One query per iteration: keeps results independent of caller batching.
  for (num::Index q = 0; q < nq; ++q) {
    num::Vector d2 = (m.train_embeddings.rowwise() - z_query.row(q))
                         .rowwise()
                         .squaredNorm();
    num::Vector kstar = of * (-d2.array() / (2.0 * l * l)).exp();
    const double mu = kstar.dot(m.alpha);
    num::Vector v = m.chol.forward_solve(kstar);
    const double var = std::max(0.0, of + noise - v.squaredNorm());
    post.mean(q) = mu * m.target_stats.std + m.target_stats.mean;
    post.std(q) = std::sqrt(var) * m.target_stats.std;
  }
  return post;
}

Posterior batch_predict(const TrainedDkl &m, const num::Matrix &x_query,
                        int batch_size) {
  if (batch_size < 1)
    throw ShapeMismatch("batch_size must be >= 1");
  const num::Index nq = x_query.rows();
  Posterior post;
  post.mean.resize(nq);
  post.std.resize(nq);
  for (num::Index start = 0; start < nq; start += batch_size) {
    const num::Index count = std::min<num::Index>(batch_size, nq - start);
    Posterior part = predict(m, x_query.middleRows(start, count));
    post.mean.segment(start, count) = part.mean;
    post.std.segment(start, count) = part.std;
  }
  return post;
}

LatentGrid latent_grid_predict(const TrainedDkl &m, int resolution) {
  if (m.train_embeddings.cols() != 2)
    throw LatentDimUnsupported("latent grid requires latent_dim = 2, model "
                               "has " +
                               std::to_string(m.train_embeddings.cols()));
  if (resolution < 2)
    throw ShapeMismatch("grid resolution must be >= 2");

  LatentGrid grid;
  grid.z1.resize(resolution);
  grid.z2.resize(resolution);
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = m.train_embeddings.col(axis).minCoeff();
    const double hi = m.train_embeddings.col(axis).maxCoeff();
    // Degenerate boxes (all embeddings equal) get a unit pad.
    const double pad = (hi > lo) ? 0.1 * (hi - lo) : 1.0;
    num::Vector &ax = (axis == 0) ? grid.z1 : grid.z2;
    for (int i = 0; i < resolution; ++i)
      ax(i) = (lo - pad) + (hi - lo + 2.0 * pad) * i /
                               static_cast<double>(resolution - 1);
  }

  num::Matrix zq(resolution * resolution, 2);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      zq(i * resolution + j, 0) = grid.z1(i);
      zq(i * resolution + j, 1) = grid.z2(j);
    }
  Posterior post = predict_latent(m, zq);
  grid.mean.resize(resolution, resolution);
  grid.std.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      grid.mean(i, j) = post.mean(i * resolution + j);
      grid.std(i, j) = post.std(i * resolution + j);
    }
  return grid;
}

}  // namespace moldkl::gp
