//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/num/mlp.hpp"

#include <cmath>
#include <string>

#include "moldkl/errors.hpp"

namespace moldkl::num {

namespace {

Matrix apply_activation(Activation act, const Matrix &pre) {
  switch (act) {
  case Activation::kIdentity:
    return pre;
  case Activation::kTanh:
    return pre.array().tanh().matrix();
  case Activation::kRelu:
    return pre.cwiseMax(0.0);
  }
  throw Error("unknown activation");
}

// Derivative expressed through the cached pre/post activations.
Matrix activation_grad(Activation act, const Matrix &pre, const Matrix &post) {
  switch (act) {
  case Activation::kIdentity:
    return Matrix::Ones(pre.rows(), pre.cols());
  case Activation::kTanh:
    return (1.0 - post.array().square()).matrix();
  case Activation::kRelu:
    return (pre.array() > 0.0).cast<double>().matrix();
  }
  throw Error("unknown activation");
}

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const Layer &l: layers)
    n += static_cast<std::size_t>(l.weight.size()) +
         static_cast<std::size_t>(l.bias.size());
  return n;
}

void Mlp::pack(std::vector<double> &out) const {
  for (const Layer &l: layers) {
    for (Index i = 0; i < l.weight.rows(); ++i)
      for (Index j = 0; j < l.weight.cols(); ++j)
        out.push_back(l.weight(i, j));
    for (Index j = 0; j < l.bias.size(); ++j)
      out.push_back(l.bias(j));
  }
}

void Mlp::unpack(const std::vector<double> &in, std::size_t offset) {
  std::size_t k = offset;
  if (in.size() < offset + parameter_count())
    throw ShapeMismatch("mlp unpack: need " +
                        std::to_string(parameter_count()) + " values from " +
                        std::to_string(in.size() - offset));
  for (Layer &l: layers) {
    for (Index i = 0; i < l.weight.rows(); ++i)
      for (Index j = 0; j < l.weight.cols(); ++j)
        l.weight(i, j) = in[k++];
    for (Index j = 0; j < l.bias.size(); ++j)
      l.bias(j) = in[k++];
  }
}

Mlp make_mlp(Index input_dim, const std::vector<Index> &hidden,
             Index output_dim, Rng &rng, Activation hidden_act) {
  if (input_dim <= 0 || output_dim <= 0)
    throw ShapeMismatch("make_mlp: non-positive layer width");
  for (Index h: hidden)
    if (h <= 0)
      throw ShapeMismatch("make_mlp: non-positive hidden width");

  std::vector<Index> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);

  Mlp mlp;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    Layer layer;
    const Index fan_in = dims[i];
    const Index fan_out = dims[i + 1];
    const double a =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    layer.weight.resize(fan_in, fan_out);
    for (Index r = 0; r < fan_in; ++r)
      for (Index c = 0; c < fan_out; ++c)
        layer.weight(r, c) = a * (2.0 * rng.uniform01() - 1.0);
    layer.bias = Vector::Zero(fan_out);
    layer.act =
        (i + 2 == dims.size()) ? Activation::kIdentity : hidden_act;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

Matrix mlp_forward(const Mlp &mlp, const Matrix &x, ForwardCache *cache) {
  if (mlp.layers.empty())
    throw ShapeMismatch("mlp_forward: no layers");
  if (x.cols() != mlp.input_dim())
    throw ShapeMismatch("mlp_forward: input width " +
                        std::to_string(x.cols()) + " vs " +
                        std::to_string(mlp.input_dim()));
  if (cache != nullptr) {
    cache->input = x;
    cache->pre.clear();
    cache->post.clear();
  }
  Matrix h = x;
  for (const Layer &l: mlp.layers) {
    Matrix pre = h * l.weight;
    pre.rowwise() += l.bias.transpose();
    Matrix post = apply_activation(l.act, pre);
    if (cache != nullptr) {
      cache->pre.push_back(pre);
      cache->post.push_back(post);
    }
    h = std::move(post);
  }
  return h;
}

MlpGrads mlp_backward(const Mlp &mlp, const ForwardCache &cache,
                      const Matrix &grad_out) {
  const std::size_t n_layers = mlp.layers.size();
  if (cache.pre.size() != n_layers || cache.post.size() != n_layers)
    throw ShapeMismatch("mlp_backward: cache does not match network");
  if (grad_out.rows() != cache.input.rows() ||
      grad_out.cols() != mlp.output_dim())
    throw ShapeMismatch("mlp_backward: bad grad_out shape");

  MlpGrads grads;
  grads.dweight.resize(n_layers);
  grads.dbias.resize(n_layers);

  Matrix delta = grad_out;
  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer &l = mlp.layers[li];
    delta = delta.cwiseProduct(
        activation_grad(l.act, cache.pre[li], cache.post[li]));
    const Matrix &below = (li == 0) ? cache.input : cache.post[li - 1];
    grads.dweight[li] = below.transpose() * delta;
    grads.dbias[li] = delta.colwise().sum().transpose();
    delta = delta * l.weight.transpose();
  }
  grads.dinput = std::move(delta);
  return grads;
}

void MlpGrads::pack(std::vector<double> &out) const {
  for (std::size_t li = 0; li < dweight.size(); ++li) {
    const Matrix &w = dweight[li];
    for (Index i = 0; i < w.rows(); ++i)
      for (Index j = 0; j < w.cols(); ++j)
        out.push_back(w(i, j));
    for (Index j = 0; j < dbias[li].size(); ++j)
      out.push_back(dbias[li](j));
  }
}

}  // namespace moldkl::num
