//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_NUM_MLP_HPP_
#define MOLDKL_NUM_MLP_HPP_

#include <vector>

#include "moldkl/num/linalg.hpp"
#include "moldkl/num/rng.hpp"

namespace moldkl::num {

enum class Activation { kIdentity, kTanh, kRelu };

struct Layer {
  Matrix weight;  // (in x out)
  Vector bias;    // (out)
  Activation act = Activation::kIdentity;
};

struct Mlp {
  std::vector<Layer> layers;

  Index input_dim() const { return layers.front().weight.rows(); }
  Index output_dim() const { return layers.back().weight.cols(); }
  std::size_t parameter_count() const;

  // Flat packing in layer order, each layer as row-major weights then bias.
  // Order is pinned: the optimizer state and checkpoints index into it.
  void pack(std::vector<double> &out) const;
  void unpack(const std::vector<double> &in, std::size_t offset = 0);
};

// Glorot-uniform weights drawn row-major per layer, biases zero. Hidden
// layers get `hidden_act`, the output layer is linear.
Mlp make_mlp(Index input_dim, const std::vector<Index> &hidden,
             Index output_dim, Rng &rng,
             Activation hidden_act = Activation::kTanh);

struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre;   // pre-activation, one per layer
  std::vector<Matrix> post;  // post-activation, one per layer
};

// x rows are samples. Returns (n x output_dim).
Matrix mlp_forward(const Mlp &mlp, const Matrix &x,
                   ForwardCache *cache = nullptr);

struct MlpGrads {
  std::vector<Matrix> dweight;
  std::vector<Vector> dbias;
  Matrix dinput;

  void pack(std::vector<double> &out) const;
};

// grad_out is dLoss/dOutput (n x output_dim) for the cached forward pass.
MlpGrads mlp_backward(const Mlp &mlp, const ForwardCache &cache,
                      const Matrix &grad_out);

}  // namespace moldkl::num

#endif  // MOLDKL_NUM_MLP_HPP_
