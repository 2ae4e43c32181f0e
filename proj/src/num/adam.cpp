//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/num/adam.hpp"

#include <cmath>
#include <string>

#include "moldkl/errors.hpp"

namespace moldkl::num {

void Adam::step(const AdamConfig &cfg, std::vector<double> &params,
                const std::vector<double> &grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ShapeMismatch("adam: got " + std::to_string(params.size()) +
                        " params / " + std::to_string(grads.size()) +
                        " grads, state holds " + std::to_string(m_.size()));
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = cfg.beta1 * m_[i] + (1.0 - cfg.beta1) * g;
    v_[i] = cfg.beta2 * v_[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace moldkl::num
