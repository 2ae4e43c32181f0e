//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_ACTIVE_LOOP_HPP_
#define MOLDKL_ACTIVE_LOOP_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "moldkl/gp/dkl.hpp"
#include "moldkl/num/linalg.hpp"

namespace moldkl::active {

enum class Mode { kMaximize, kMinimize };

struct RunConfig {
  int n_init = 100;
  Mode acquisition_mode = Mode::kMaximize;
  int acq_batch = 1;
  int predict_batch = 250;
  int retrain_every = 1;
  int step_budget = -1;  // < 0 runs to exhaustion
  std::uint64_t seed = 0;
  double beta = 1.0;      // acquisition weight on std
  bool cold_start = false;
  int refine_epochs = 50;      // warm-start epochs per retrain
  int latent_log_every = 0;    // snapshot interval in cycles, 0 = never
  gp::DklConfig dkl;
};

// Rows of x, y, ids, smiles are aligned.
struct Problem {
  num::Matrix x;
  num::Vector y;
  std::vector<std::string> ids;
  std::vector<std::string> smiles;
};

struct ActiveRunState {
  std::vector<int> measured;    // acquisition order after the seeded block
  std::vector<int> unmeasured;  // ascending dataset index
  gp::TrainedDkl model;
  int cycle = 0;
};

struct TrajectoryRecord {
  int cycle = 0;
  std::vector<int> chosen_indices;
  num::Vector pred_mean;  // target units, at the chosen points
  num::Vector pred_std;
  num::Vector true_value;
  num::Vector error;      // predicted minus ground truth
  num::Vector ref_mean;   // empty when no reference model is given
  num::Vector ref_std;
  double rmse_unmeasured = 0.0;  // before this cycle's acquisition
};

// Seeds `measured` with n_init draws (kept in ascending dataset order) and
// trains the initial model. Throws DatasetTooSmall.
ActiveRunState init_run(const Problem &p, const RunConfig &cfg);

// maximize: mu + beta*std; minimize: -mu + beta*std. Selection is always
// argmax of the scores.
num::Vector acquisition(const gp::Posterior &post, Mode mode,
                        double beta = 1.0);

// Top-k score indices, ties broken by lowest index. Throws KTooLarge.
std::vector<int> select_next(const num::Vector &scores, int k);

// One cycle: retrain (per retrain_every), predict the unmeasured pool,
// acquire, and record. The reference model is only logged, never consulted
// for acquisition.
TrajectoryRecord step(ActiveRunState &state, const Problem &p,
                      const RunConfig &cfg,
                      const gp::TrainedDkl *reference = nullptr);

struct RunResult {
  std::vector<TrajectoryRecord> trajectory;
  ActiveRunState state;
  // Full-corpus embeddings at each logged cycle (latent_log_every > 0).
  std::vector<std::pair<int, num::Matrix>> latent_snapshots;
};

RunResult run(const Problem &p, const RunConfig &cfg,
              const gp::TrainedDkl *reference = nullptr);

// Control arm: same loop, uniform selection from the seeded PRNG.
RunResult random_baseline(const Problem &p, const RunConfig &cfg,
                          const gp::TrainedDkl *reference = nullptr);

struct ReferenceComparison {
  double pearson_mean = 0.0;
  double pearson_std = 0.0;
};

// Pearson r between active and reference predictions across the
// trajectory. Throws InsufficientData below 3 records with references.
ReferenceComparison compare_to_reference(
    const std::vector<TrajectoryRecord> &trajectory);

// CSV with the pinned column schema, floats at 17 significant digits.
std::string trajectory_to_csv(const std::vector<TrajectoryRecord> &trajectory,
                              const Problem &p);

}  // namespace moldkl::active

#endif  // MOLDKL_ACTIVE_LOOP_HPP_
