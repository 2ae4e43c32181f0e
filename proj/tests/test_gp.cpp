//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "moldkl/errors.hpp"
#include "moldkl/gp/dkl.hpp"
#include "moldkl/num/rng.hpp"
#include "support/oracles.hpp"

using namespace moldkl;
using testsupport::fd_grad;
using testsupport::oracle_nll;
using testsupport::oracle_predict;
using testsupport::OraclePosterior;

namespace {

num::Matrix random_matrix(num::Rng &rng, int rows, int cols) {
  num::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = num::normal(rng);
  return m;
}

num::Vector random_vector(num::Rng &rng, int n) {
  num::Vector v(n);
  for (int i = 0; i < n; ++i)
    v(i) = num::normal(rng);
  return v;
}

gp::DklParams random_params(num::Rng &rng, int input_dim) {
  gp::DklParams p;
  p.mlp = num::make_mlp(input_dim, {3}, 2, rng);
  p.log_lengthscale = 0.5 * num::normal(rng);
  p.log_outputscale = 0.5 * num::normal(rng);
  p.log_noise = std::log(0.01) + 0.5 * num::normal(rng);
  return p;
}

}  // namespace

TEST_CASE("kernel_matrix matches the scalar formula") {
  num::Rng rng(1);
  const num::Matrix z1 = random_matrix(rng, 4, 2);
  const num::Matrix z2 = random_matrix(rng, 3, 2);
  const double l = 0.7, of = 1.3;
  const num::Matrix k = gp::kernel_matrix(z1, z2, l, of);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d2 = (z1.row(i) - z2.row(j)).squaredNorm();
      CHECK(k(i, j) ==
            doctest::Approx(of * std::exp(-d2 / (2 * l * l))).epsilon(1e-14));
    }
  // self-kernel diagonal equals the outputscale
  const num::Matrix kk = gp::kernel_matrix(z1, z1, l, of);
  for (int i = 0; i < 4; ++i)
    CHECK(kk(i, i) == doctest::Approx(of).epsilon(1e-14));
}

TEST_CASE("nll matches the dense oracle on 100 random instances") {
  num::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(9));  // 2..10
    const gp::DklParams p = random_params(rng, 2);
    const num::Matrix x = random_matrix(rng, n, 2);
    const num::Vector y = random_vector(rng, n);
    CHECK(std::abs(gp::nll(p, x, y) - oracle_nll(p, x, y)) < 1e-9);
  }
}

TEST_CASE("predict matches the dense oracle on 100 random instances") {
  num::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(9));
    const int nq = 1 + static_cast<int>(rng.bounded(5));
    const gp::DklParams p = random_params(rng, 2);
    const num::Matrix x = random_matrix(rng, n, 2);
    const num::Vector y = random_vector(rng, n);
    const num::Matrix xq = random_matrix(rng, nq, 2);

    const gp::TrainedDkl m = gp::condition(p, x, y);
    const gp::Posterior got = gp::predict(m, xq);
    const OraclePosterior want = oracle_predict(p, x, y, xq);
    for (int q = 0; q < nq; ++q) {
      CHECK(std::abs(got.mean(q) - want.mean[static_cast<std::size_t>(q)]) <
            1e-9);
      CHECK(std::abs(got.std(q) - want.std[static_cast<std::size_t>(q)]) <
            1e-9);
    }
  }
}

TEST_CASE("nll_grad matches central finite differences") {
  num::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(6));
    const gp::DklParams p = random_params(rng, 2);
    const num::Matrix x = random_matrix(rng, n, 2);
    const num::Vector y = random_vector(rng, n);

    std::vector<double> theta;
    p.mlp.pack(theta);
    theta.push_back(p.log_lengthscale);
    theta.push_back(p.log_outputscale);
    theta.push_back(p.log_noise);

    auto loss_at = [&](const std::vector<double> &t) {
      gp::DklParams q = p;
      q.mlp.unpack(t);
      q.log_lengthscale = t[t.size() - 3];
      q.log_outputscale = t[t.size() - 2];
      q.log_noise = t[t.size() - 1];
      return gp::nll(q, x, y);
    };

    const gp::DklGrads grads = gp::nll_grad(p, x, y);
    std::vector<double> analytic;
    grads.mlp.pack(analytic);
    analytic.push_back(grads.d_log_lengthscale);
    analytic.push_back(grads.d_log_outputscale);
    analytic.push_back(grads.d_log_noise);

    const std::vector<double> numeric = fd_grad(loss_at, theta, 1e-5);
    REQUIRE(numeric.size() == analytic.size());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const double scale =
          std::max({1.0, std::abs(analytic[i]), std::abs(numeric[i])});
      CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
    }
  }
}

TEST_CASE("target stats: population std, size guards") {
  num::Vector y(4);
  y << 1, 2, 3, 4;
  const gp::TargetStats s = gp::compute_target_stats(y);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));

  num::Vector single(1);
  single << 42.0;
  const gp::TargetStats one = gp::compute_target_stats(single);
  CHECK(one.mean == 0.0);
  CHECK(one.std == 1.0);

  num::Vector flat = num::Vector::Constant(5, 3.0);
  CHECK_THROWS_AS(gp::compute_target_stats(flat), DegenerateTargets);
  CHECK_THROWS_AS(gp::compute_target_stats(num::Vector()), ShapeMismatch);
}

// Interpolation at sigma_n^2 = 1e-8 is only meaningful when the kernel
// matrix is numerically invertible: a lengthscale much larger than the
// embedding spread collapses K toward rank one and no implementation can
// thread targets through it. Draws whose smallest kernel eigenvalue falls
// under 1e-3 * sigma_f^2 are therefore rejected; above that floor the
// ~2e-8 diagonal perturbation moves train means by well under 1e-3*std(y).
struct ToyProblem {
  gp::DklParams p;
  num::Matrix x;
  num::Vector y;
};

ToyProblem well_posed_problem(num::Rng &rng) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng.bounded(10));
    gp::DklParams p = random_params(rng, 3);
    p.log_lengthscale = std::log(0.35) + 0.15 * num::normal(rng);
    p.log_noise = std::log(1e-8);
    const num::Matrix x = random_matrix(rng, n, 3);
    const num::Matrix z = num::mlp_forward(p.mlp, x);
    const num::Matrix k =
        gp::kernel_matrix(z, z, p.lengthscale(), p.outputscale());
    const Eigen::SelfAdjointEigenSolver<num::Matrix> eig(k);
    if (eig.eigenvalues().minCoeff() >= 1e-3 * p.outputscale())
      return {p, x, random_vector(rng, n)};
  }
}

TEST_CASE("interpolation and variance bounds over 50 toy problems") {
  num::Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [p, x, y] = well_posed_problem(rng);
    const int n = static_cast<int>(y.size());

    const gp::TrainedDkl m = gp::condition(p, x, y);
    const gp::Posterior at_train = gp::predict(m, x);
    const double sd_y = std::sqrt(
        (y.array() - y.mean()).square().sum() / static_cast<double>(n));
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(at_train.mean(i) - y(i)) < 1e-3 * sd_y);

    const num::Matrix xq = random_matrix(rng, 8, 3);
    const gp::Posterior post = gp::predict(m, xq);
    const double var_cap =
        (p.outputscale() + p.noise() + m.jitter) * sd_y * sd_y;
    for (int q = 0; q < 8; ++q) {
      const double var = post.std(q) * post.std(q);
      CHECK(var >= 0.0);
      CHECK(var <= var_cap * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("batching is memory-only: identical posteriors for any batch") {
  num::Rng rng(44);
  const gp::DklParams p = random_params(rng, 2);
  const num::Matrix x = random_matrix(rng, 12, 2);
  const num::Vector y = random_vector(rng, 12);
  const num::Matrix xq = random_matrix(rng, 23, 2);
  const gp::TrainedDkl m = gp::condition(p, x, y);

  const gp::Posterior whole = gp::predict(m, xq);
  for (int batch: {1, 7, 250}) {
    const gp::Posterior part = gp::batch_predict(m, xq, batch);
    for (int q = 0; q < 23; ++q) {
      CHECK(part.mean(q) == whole.mean(q));
      CHECK(part.std(q) == whole.std(q));
    }
  }
  CHECK_THROWS_AS(gp::batch_predict(m, xq, 0), ShapeMismatch);
}

TEST_CASE("train_dkl: loss decreases and everything is deterministic") {
  num::Rng rng(55);
  const num::Matrix x = random_matrix(rng, 16, 4);
  num::Vector y(16);
  for (int i = 0; i < 16; ++i)
    y(i) = x(i, 0) * 2.0 + std::sin(x(i, 1));

  gp::DklConfig cfg;
  cfg.hidden = {8};
  cfg.epochs = 60;
  cfg.seed = 9;
  const gp::TrainResult a = gp::train_dkl(x, y, cfg);
  const gp::TrainResult b = gp::train_dkl(x, y, cfg);

  CHECK(a.loss_curve.size() == 61);
  CHECK(a.loss_curve.back() <= a.loss_curve.front());

  CHECK(a.loss_curve == b.loss_curve);
  std::vector<double> pa, pb;
  a.model.params.mlp.pack(pa);
  b.model.params.mlp.pack(pb);
  CHECK(pa == pb);
  CHECK(a.model.params.log_lengthscale == b.model.params.log_lengthscale);
  CHECK(a.model.jitter == b.model.jitter);
  CHECK(a.model.alpha == b.model.alpha);
  CHECK(a.model.train_embeddings == b.model.train_embeddings);

  gp::DklConfig other = cfg;
  other.seed = 10;
  const gp::TrainResult c = gp::train_dkl(x, y, other);
  CHECK(a.loss_curve != c.loss_curve);
}

TEST_CASE("train_dkl: input guards") {
  gp::DklConfig cfg;
  cfg.epochs = 1;
  num::Matrix x(1, 2);
  x << 0, 0;
  num::Vector y(1);
  y << 1.0;
  CHECK_THROWS_AS(gp::train_dkl(x, y, cfg), DatasetTooSmall);

  num::Matrix x2(3, 2);
  x2.setZero();
  num::Vector bad(2);
  bad << 1, 2;
  CHECK_THROWS_AS(gp::train_dkl(x2, bad, cfg), ShapeMismatch);

  num::Vector flat = num::Vector::Constant(3, 1.0);
  CHECK_THROWS_AS(gp::train_dkl(x2, flat, cfg), DegenerateTargets);
}

TEST_CASE("train_dkl_from refines without resetting") {
  num::Rng rng(66);
  const num::Matrix x = random_matrix(rng, 14, 3);
  num::Vector y(14);
  for (int i = 0; i < 14; ++i)
    y(i) = x(i, 0) - 0.5 * x(i, 2);

  gp::DklConfig cfg;
  cfg.hidden = {6};
  cfg.epochs = 40;
  const gp::TrainResult base = gp::train_dkl(x, y, cfg);
  const gp::TrainResult more =
      gp::train_dkl_from(base.model.params, x, y, 20, cfg.lr);
  CHECK(more.loss_curve.front() ==
        doctest::Approx(base.loss_curve.back()).epsilon(1e-12));
  CHECK(more.loss_curve.back() <= more.loss_curve.front() + 1e-9);
}

TEST_CASE("latent grid: padded box, consistency with predict_latent") {
  num::Rng rng(77);
  const gp::DklParams p = random_params(rng, 2);
  const num::Matrix x = random_matrix(rng, 10, 2);
  const num::Vector y = random_vector(rng, 10);
  const gp::TrainedDkl m = gp::condition(p, x, y);

  const gp::LatentGrid grid = gp::latent_grid_predict(m, 5);
  REQUIRE(grid.z1.size() == 5);
  REQUIRE(grid.mean.rows() == 5);
  REQUIRE(grid.mean.cols() == 5);

  const double lo = m.train_embeddings.col(0).minCoeff();
  const double hi = m.train_embeddings.col(0).maxCoeff();
  CHECK(grid.z1(0) ==
        doctest::Approx(lo - 0.1 * (hi - lo)).epsilon(1e-12));
  CHECK(grid.z1(4) ==
        doctest::Approx(hi + 0.1 * (hi - lo)).epsilon(1e-12));

  num::Matrix zq(1, 2);
  zq << grid.z1(2), grid.z2(3);
  const gp::Posterior point = gp::predict_latent(m, zq);
  CHECK(point.mean(0) == grid.mean(2, 3));
  CHECK(point.std(0) == grid.std(2, 3));

  CHECK_THROWS_AS(gp::latent_grid_predict(m, 1), ShapeMismatch);
}

TEST_CASE("latent grid requires a 2-d latent space") {
  num::Rng rng(88);
  gp::DklParams p;
  p.mlp = num::make_mlp(2, {3}, 1, rng);
  const num::Matrix x = random_matrix(rng, 6, 2);
  const num::Vector y = random_vector(rng, 6);
  const gp::TrainedDkl m = gp::condition(p, x, y);
  CHECK_THROWS_AS(gp::latent_grid_predict(m, 4), LatentDimUnsupported);
}

TEST_CASE("predict_latent rejects mismatched latent width") {
  num::Rng rng(99);
  const gp::DklParams p = random_params(rng, 2);
  const num::Matrix x = random_matrix(rng, 5, 2);
  const num::Vector y = random_vector(rng, 5);
  const gp::TrainedDkl m = gp::condition(p, x, y);
  const num::Matrix zq = random_matrix(rng, 2, 3);
  CHECK_THROWS_AS(gp::predict_latent(m, zq), ShapeMismatch);
}

TEST_CASE("condition applies the base jitter rung") {
  num::Rng rng(111);
  const gp::DklParams p = random_params(rng, 2);
  const num::Matrix x = random_matrix(rng, 6, 2);
  const num::Vector y = random_vector(rng, 6);
  const gp::TrainedDkl m = gp::condition(p, x, y);
  CHECK(m.jitter == doctest::Approx(1e-8 * (p.outputscale() + p.noise()))
                        .epsilon(1e-12));
}
