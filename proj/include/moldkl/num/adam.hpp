//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_NUM_ADAM_HPP_
#define MOLDKL_NUM_ADAM_HPP_

#include <cstdint>
#include <vector>

namespace moldkl::num {

struct AdamConfig {
  double lr = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction over a flat parameter vector.
class Adam {
 public:
  explicit Adam(std::size_t n_params)
      : m_(n_params, 0.0), v_(n_params, 0.0) { }

  void step(const AdamConfig &cfg, std::vector<double> &params,
            const std::vector<double> &grads);

  std::int64_t t() const { return t_; }

 private:
  std::vector<double> m_;
  std::vector<double> v_;
  std::int64_t t_ = 0;
};

}  // namespace moldkl::num

#endif  // MOLDKL_NUM_ADAM_HPP_
