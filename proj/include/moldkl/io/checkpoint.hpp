//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_IO_CHECKPOINT_HPP_
#define MOLDKL_IO_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "moldkl/gp/dkl.hpp"
#include "moldkl/selfies/selfies.hpp"
#include "moldkl/vae/vae.hpp"

namespace moldkl::io {

// Everything needed to reproduce predictions on any query: trained
// parameters plus the featurization (alphabet, max_len) and provenance
// (target name, dataset hash) the model was built against. The kernel
// factorization is rebuilt from the stored embeddings at read time.
struct DklCheckpoint {
  gp::DklConfig config;
  gp::TrainedDkl model;
  selfies::Alphabet alphabet;
  int max_len = 0;
  std::string target_name;
  std::uint64_t dataset_hash = 0;
};

struct VaeCheckpoint {
  vae::VaeConfig config;
  vae::VaeParams params;
  selfies::Alphabet alphabet;
  int max_len = 0;
  std::uint64_t dataset_hash = 0;
};

// Versioned JSON container with a payload hash; write-then-read is
// byte-stable and prediction-exact. Readers throw VersionMismatch on a
// version bump, CorruptFile on damage, ArtifactMismatch on the wrong
// model type, IoFailure on filesystem trouble.
void write_checkpoint(const DklCheckpoint &c, const std::string &path);
void write_checkpoint(const VaeCheckpoint &c, const std::string &path);
DklCheckpoint read_dkl_checkpoint(const std::string &path);
VaeCheckpoint read_vae_checkpoint(const std::string &path);

// Model type of a checkpoint file without decoding the payload.
std::string checkpoint_model_type(const std::string &path);

}  // namespace moldkl::io

#endif  // MOLDKL_IO_CHECKPOINT_HPP_
