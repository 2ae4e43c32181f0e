//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/vae/vae.hpp"

#include <cmath>
#include <string>

#include "moldkl/errors.hpp"
#include "moldkl/num/adam.hpp"

namespace moldkl::vae {

namespace {

void check_input(const VaeParams &p, const num::Matrix &x) {
  const num::Index want =
      static_cast<num::Index>(p.max_len) * p.alphabet_size;
  if (x.cols() != want)
    throw ShapeMismatch("one-hot width " + std::to_string(x.cols()) +
                        " does not match model width " +
                        std::to_string(want));
}

// Row-wise softmax over each length-A block of the logit matrix, with the
// max subtracted for stability.
num::Matrix blockwise_softmax(const num::Matrix &logits, int alphabet) {
  num::Matrix probs(logits.rows(), logits.cols());
  const num::Index blocks = logits.cols() / alphabet;
  for (num::Index r = 0; r < logits.rows(); ++r)
    for (num::Index b = 0; b < blocks; ++b) {
      const auto seg = logits.row(r).segment(b * alphabet, alphabet);
      const double m = seg.maxCoeff();
      num::Vector e = (seg.array() - m).exp();
      probs.row(r).segment(b * alphabet, alphabet) = e / e.sum();
    }
  return probs;
}

struct ElboEval {
  ElboReport report;
  // dLoss/dparams for loss = recon + kl, meaned over the batch, packed as
  // encoder then decoder in Mlp::pack order.
  std::vector<double> grads;
};

ElboEval evaluate(const VaeParams &p, const num::Matrix &x, num::Rng &rng,
                  bool with_grads) {
  check_input(p, x);
  const num::Index n = x.rows();
  const int latent = p.latent_dim;

  num::ForwardCache enc_cache;
  const num::Matrix enc_out = num::mlp_forward(p.encoder, x, &enc_cache);
  const num::Matrix mu = enc_out.leftCols(latent);
  const num::Matrix lnvar = enc_out.rightCols(latent);
  const num::Matrix sigma = (lnvar.array() * 0.5).exp();

  num::Matrix eps(n, latent);
  for (num::Index i = 0; i < n; ++i)
    for (int d = 0; d < latent; ++d)
      eps(i, d) = num::normal(rng);
  const num::Matrix z = mu + sigma.cwiseProduct(eps);

  num::ForwardCache dec_cache;
  const num::Matrix logits = num::mlp_forward(p.decoder, z, &dec_cache);
  const num::Matrix probs = blockwise_softmax(logits, p.alphabet_size);

  // recon = -sum over positions of log prob(true token), mean per molecule
  double recon = 0.0;
  for (num::Index r = 0; r < n; ++r)
    for (num::Index c = 0; c < x.cols(); ++c)
      if (x(r, c) == 1.0)
        recon -= std::log(probs(r, c));
  recon /= static_cast<double>(n);

  const double kl =
      0.5 *
      (mu.array().square() + lnvar.array().exp() - lnvar.array() - 1.0)
          .sum() /
      static_cast<double>(n);

  ElboEval out;
  out.report.reconstruction_nll = recon;
  out.report.kl = kl;
  if (!with_grads)
    return out;

  const double inv_n = 1.0 / static_cast<double>(n);
  const num::Matrix dlogits = (probs - x) * inv_n;
  const num::MlpGrads dec_grads =
      num::mlp_backward(p.decoder, dec_cache, dlogits);

  // z = mu + sigma*eps with sigma = exp(lnvar/2); kl adds mu and
  // (exp(lnvar)-1)/2 terms directly.
  const num::Matrix dz = dec_grads.dinput;
  num::Matrix denc(n, 2 * latent);
  denc.leftCols(latent) = dz + inv_n * mu;
  denc.rightCols(latent) =
      0.5 * dz.cwiseProduct(eps).cwiseProduct(sigma) +
      (0.5 * inv_n) * (lnvar.array().exp() - 1.0).matrix();
  const num::MlpGrads enc_grads =
      num::mlp_backward(p.encoder, enc_cache, denc);

  enc_grads.pack(out.grads);
  dec_grads.pack(out.grads);
  return out;
}

}  // namespace

VaeParams make_vae(int max_len, int alphabet_size, const VaeConfig &cfg,
                   num::Rng &rng) {
  if (max_len < 1 || alphabet_size < 2)
    throw ShapeMismatch("vae needs max_len >= 1 and alphabet size >= 2");
  VaeParams p;
  p.latent_dim = cfg.latent_dim;
  p.max_len = max_len;
  p.alphabet_size = alphabet_size;
  const num::Index width =
      static_cast<num::Index>(max_len) * alphabet_size;
  p.encoder = num::make_mlp(width, cfg.hidden, 2 * cfg.latent_dim, rng);
  p.decoder = num::make_mlp(cfg.latent_dim, cfg.hidden, width, rng);
  return p;
}

std::pair<num::Matrix, num::Matrix> vae_encode(const VaeParams &p,
                                               const num::Matrix &x) {
  check_input(p, x);
  const num::Matrix out = num::mlp_forward(p.encoder, x);
  return {out.leftCols(p.latent_dim), out.rightCols(p.latent_dim)};
}

ElboReport vae_elbo(const VaeParams &p, const num::Matrix &x,
                    num::Rng &rng) {
  return evaluate(p, x, rng, false).report;
}

ElboReport vae_elbo_grads(const VaeParams &p, const num::Matrix &x,
                          num::Rng &rng, std::vector<double> *grads) {
  ElboEval ev = evaluate(p, x, rng, grads != nullptr);
  if (grads != nullptr)
    *grads = std::move(ev.grads);
  return ev.report;
}

TrainVaeResult train_vae(const num::Matrix &x, int max_len,
                         int alphabet_size, const VaeConfig &cfg) {
  if (x.rows() == 0)
    throw EmptyCorpus("vae training needs a non-empty corpus");
  num::Rng rng(cfg.seed);
  TrainVaeResult res;
  res.params = make_vae(max_len, alphabet_size, cfg, rng);

  std::vector<double> theta;
  res.params.encoder.pack(theta);
  res.params.decoder.pack(theta);
  num::Adam opt(theta.size());
  num::AdamConfig opt_cfg;
  opt_cfg.lr = cfg.lr;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const ElboEval ev = evaluate(res.params, x, rng, true);
    const double loss = ev.report.reconstruction_nll + ev.report.kl;
    if (!std::isfinite(loss))
      throw NumericalFailure("non-finite vae loss at epoch " +
                             std::to_string(epoch));
    res.loss_curve.push_back(loss);
    res.kl_curve.push_back(ev.report.kl);
    res.recon_curve.push_back(ev.report.reconstruction_nll);

    opt.step(opt_cfg, theta, ev.grads);
    res.params.encoder.unpack(theta);
    res.params.decoder.unpack(theta, res.params.encoder.parameter_count());
  }
  const ElboEval last = evaluate(res.params, x, rng, false);
  res.loss_curve.push_back(last.report.reconstruction_nll + last.report.kl);
  res.kl_curve.push_back(last.report.kl);
  res.recon_curve.push_back(last.report.reconstruction_nll);
  return res;
}

num::Matrix vae_latent_map(const VaeParams &p, const num::Matrix &x) {
  return vae_encode(p, x).first;
}

double reconstruction_accuracy(const VaeParams &p, const num::Matrix &x) {
  check_input(p, x);
  const num::Matrix mu = vae_latent_map(p, x);
  const num::Matrix logits = num::mlp_forward(p.decoder, mu);
  const int a = p.alphabet_size;
  long hits = 0;
  long total = 0;
  for (num::Index r = 0; r < x.rows(); ++r)
    for (int pos = 0; pos < p.max_len; ++pos) {
      const auto lseg =
          logits.row(r).segment(static_cast<num::Index>(pos) * a, a);
      const auto xseg =
          x.row(r).segment(static_cast<num::Index>(pos) * a, a);
      num::Index pred = 0;
      lseg.maxCoeff(&pred);
      num::Index truth = 0;
      xseg.maxCoeff(&truth);
      hits += pred == truth;
      ++total;
    }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double majority_baseline(const num::Matrix &x, int alphabet_size) {
  if (x.rows() == 0 || x.cols() == 0 || x.cols() % alphabet_size != 0)
    throw ShapeMismatch("one-hot matrix width must be a multiple of the "
                        "alphabet size");
  num::Vector counts = num::Vector::Zero(alphabet_size);
  const num::Index blocks = x.cols() / alphabet_size;
  for (num::Index r = 0; r < x.rows(); ++r)
    for (num::Index b = 0; b < blocks; ++b)
      counts += x.row(r).segment(b * alphabet_size, alphabet_size)
                    .transpose();
  return counts.maxCoeff() / counts.sum();
}

}  // namespace moldkl::vae
