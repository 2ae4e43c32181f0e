//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/active/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "moldkl/errors.hpp"
#include "moldkl/io/files.hpp"
#include "moldkl/num/rng.hpp"
#include "moldkl/sim/similarity.hpp"

namespace moldkl::active {

namespace {

num::Matrix gather_rows(const num::Matrix &x, const std::vector<int> &rows) {
  num::Matrix out(static_cast<num::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<num::Index>(i)) = x.row(rows[i]);
  return out;
}

num::Vector gather(const num::Vector &y, const std::vector<int> &rows) {
  num::Vector out(static_cast<num::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<num::Index>(i)) = y(rows[i]);
  return out;
}

std::vector<int> draw_without_replacement(int total, int k, num::Rng &rng) {
  std::vector<int> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.bounded(
                          static_cast<std::uint64_t>(total - i)));
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

ActiveRunState init_run_with(const Problem &p, const RunConfig &cfg,
                             num::Rng &rng) {
  const int n = static_cast<int>(p.x.rows());
  if (cfg.n_init < 1 || cfg.n_init + 1 > n)
    throw DatasetTooSmall("n_init = " + std::to_string(cfg.n_init) +
                          " needs at least n_init + 1 = " +
                          std::to_string(cfg.n_init + 1) + " points, have " +
                          std::to_string(n));
  ActiveRunState st;
  st.measured = draw_without_replacement(n, cfg.n_init, rng);
  std::sort(st.measured.begin(), st.measured.end());
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  for (int i: st.measured)
    taken[static_cast<std::size_t>(i)] = true;
  for (int i = 0; i < n; ++i)
    if (!taken[static_cast<std::size_t>(i)])
      st.unmeasured.push_back(i);
  st.model = gp::train_dkl(gather_rows(p.x, st.measured),
                           gather(p.y, st.measured), cfg.dkl)
                 .model;
  return st;
}

// Selection policy: returns local positions into the scored pool.
using Selector = std::vector<int> (*)(const num::Vector &, int,
                                      num::Rng *);

std::vector<int> select_by_score(const num::Vector &scores, int k,
                                 num::Rng *) {
  return select_next(scores, k);
}

std::vector<int> select_uniform(const num::Vector &scores, int k,
                                num::Rng *rng) {
  return draw_without_replacement(static_cast<int>(scores.size()), k, *rng);
}

TrajectoryRecord step_with(ActiveRunState &state, const Problem &p,
                           const RunConfig &cfg,
                           const gp::TrainedDkl *reference,
                           Selector select, num::Rng *rng) {
  if (state.unmeasured.empty())
    throw ShapeMismatch("no unmeasured points left");

  const int cycle = state.cycle + 1;
  const num::Matrix x_m = gather_rows(p.x, state.measured);
  const num::Vector y_m = gather(p.y, state.measured);
  if (cfg.retrain_every > 0 && cycle % cfg.retrain_every == 0) {
    if (cfg.cold_start)
      state.model = gp::train_dkl(x_m, y_m, cfg.dkl).model;
    else
      state.model = gp::train_dkl_from(state.model.params, x_m, y_m,
                                       cfg.refine_epochs, cfg.dkl.lr)
                        .model;
  } else {
    state.model = gp::condition(state.model.params, x_m, y_m);
  }

  const num::Matrix x_u = gather_rows(p.x, state.unmeasured);
  const gp::Posterior post =
      gp::batch_predict(state.model, x_u, cfg.predict_batch);

  TrajectoryRecord rec;
  rec.cycle = cycle;
  rec.rmse_unmeasured = std::sqrt(
      (post.mean - gather(p.y, state.unmeasured)).squaredNorm() /
      static_cast<double>(state.unmeasured.size()));

  const int k = std::min(cfg.acq_batch,
                         static_cast<int>(state.unmeasured.size()));
  const num::Vector scores =
      acquisition(post, cfg.acquisition_mode, cfg.beta);
  const std::vector<int> local = select(scores, k, rng);

  rec.pred_mean.resize(k);
  rec.pred_std.resize(k);
  rec.true_value.resize(k);
  rec.error.resize(k);
  for (int i = 0; i < k; ++i) {
    const int ds = state.unmeasured[static_cast<std::size_t>(local[
        static_cast<std::size_t>(i)])];
    rec.chosen_indices.push_back(ds);
    rec.pred_mean(i) = post.mean(local[static_cast<std::size_t>(i)]);
    rec.pred_std(i) = post.std(local[static_cast<std::size_t>(i)]);
    rec.true_value(i) = p.y(ds);
    rec.error(i) = rec.pred_mean(i) - rec.true_value(i);
  }
  if (reference) {
    const gp::Posterior ref = gp::batch_predict(
        *reference, gather_rows(p.x, rec.chosen_indices),
        cfg.predict_batch);
    rec.ref_mean = ref.mean;
    rec.ref_std = ref.std;
  }

  for (int ds: rec.chosen_indices) {
    state.measured.push_back(ds);
    state.unmeasured.erase(std::find(state.unmeasured.begin(),
                                     state.unmeasured.end(), ds));
  }
  state.cycle = cycle;
  return rec;
}

RunResult run_with(const Problem &p, const RunConfig &cfg,
                   const gp::TrainedDkl *reference, Selector select) {
  num::Rng rng(cfg.seed);
  RunResult res;
  res.state = init_run_with(p, cfg, rng);
  while (!res.state.unmeasured.empty() &&
         (cfg.step_budget < 0 || res.state.cycle < cfg.step_budget)) {
    try {
      res.trajectory.push_back(
          step_with(res.state, p, cfg, reference, select, &rng));
    } catch (const NumericalFailure &e) {
      throw NumericalFailure("cycle " + std::to_string(res.state.cycle + 1) +
                             ": " + e.what());
    }
    if (cfg.latent_log_every > 0 &&
        res.state.cycle % cfg.latent_log_every == 0)
      res.latent_snapshots.emplace_back(
          res.state.cycle, gp::embed(res.state.model.params, p.x));
  }
  return res;
}

}  // namespace

ActiveRunState init_run(const Problem &p, const RunConfig &cfg) {
  num::Rng rng(cfg.seed);
  return init_run_with(p, cfg, rng);
}

num::Vector acquisition(const gp::Posterior &post, Mode mode, double beta) {
  if (post.mean.size() != post.std.size())
    throw ShapeMismatch("posterior mean/std lengths differ");
  if (mode == Mode::kMaximize)
    return post.mean + beta * post.std;
  return -post.mean + beta * post.std;
}

std::vector<int> select_next(const num::Vector &scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 0 || k > n)
    throw KTooLarge("cannot select " + std::to_string(k) + " of " +
                    std::to_string(n) + " scores");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores(a) != scores(b))
      return scores(a) > scores(b);
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

TrajectoryRecord step(ActiveRunState &state, const Problem &p,
                      const RunConfig &cfg,
                      const gp::TrainedDkl *reference) {
  return step_with(state, p, cfg, reference, select_by_score, nullptr);
}

RunResult run(const Problem &p, const RunConfig &cfg,
              const gp::TrainedDkl *reference) {
  return run_with(p, cfg, reference, select_by_score);
}

RunResult random_baseline(const Problem &p, const RunConfig &cfg,
                          const gp::TrainedDkl *reference) {
  return run_with(p, cfg, reference, select_uniform);
}

ReferenceComparison compare_to_reference(
    const std::vector<TrajectoryRecord> &trajectory) {
  std::vector<double> mean_a;
  std::vector<double> mean_r;
  std::vector<double> std_a;
  std::vector<double> std_r;
  int with_ref = 0;
  for (const TrajectoryRecord &rec: trajectory) {
    if (rec.ref_mean.size() == 0)
      continue;
    ++with_ref;
    for (num::Index i = 0; i < rec.ref_mean.size(); ++i) {
      mean_a.push_back(rec.pred_mean(i));
      mean_r.push_back(rec.ref_mean(i));
      std_a.push_back(rec.pred_std(i));
      std_r.push_back(rec.ref_std(i));
    }
  }
  if (with_ref < 3)
    throw InsufficientData("need at least 3 trajectory records with "
                           "reference predictions, have " +
                           std::to_string(with_ref));
  const auto vec = [](const std::vector<double> &v) {
    num::Vector out(static_cast<num::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      out(static_cast<num::Index>(i)) = v[i];
    return out;
  };
  ReferenceComparison cmp;
  cmp.pearson_mean = sim::pearson(vec(mean_a), vec(mean_r));
  cmp.pearson_std = sim::pearson(vec(std_a), vec(std_r));
  return cmp;
}

std::string trajectory_to_csv(const std::vector<TrajectoryRecord> &trajectory,
                              const Problem &p) {
  std::string out =
      "cycle,chosen_id,smiles,pred_mean,pred_std,true_value,error,"
      "ref_mean,ref_std,rmse_unmeasured\n";
  for (const TrajectoryRecord &rec: trajectory)
    for (std::size_t i = 0; i < rec.chosen_indices.size(); ++i) {
      const int ds = rec.chosen_indices[i];
      const num::Index li = static_cast<num::Index>(i);
      out += std::to_string(rec.cycle);
      out += ',';
      out += p.ids[static_cast<std::size_t>(ds)];
      out += ',';
      out += p.smiles[static_cast<std::size_t>(ds)];
      out += ',';
      out += io::format_double(rec.pred_mean(li));
      out += ',';
      out += io::format_double(rec.pred_std(li));
      out += ',';
      out += io::format_double(rec.true_value(li));
      out += ',';
      out += io::format_double(rec.error(li));
      out += ',';
      out += rec.ref_mean.size() ? io::format_double(rec.ref_mean(li)) : "";
      out += ',';
      out += rec.ref_std.size() ? io::format_double(rec.ref_std(li)) : "";
      out += ',';
      out += io::format_double(rec.rmse_unmeasured);
      out += '\n';
    }
  return out;
}

}  // namespace moldkl::active
