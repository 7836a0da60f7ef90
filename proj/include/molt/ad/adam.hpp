// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_AD_ADAM_HPP_
#define MOLT_AD_ADAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "molt/ad/tensor.hpp"

namespace molt::ad {

// Bias-corrected Adam. One state object owns the moment buffers for a fixed
// parameter list; supports a per-parameter learning rate for discriminative
// fine-tuning.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step_count = 0;
  std::vector<std::vector<double>> m;  // first moments, one per parameter
  std::vector<std::vector<double>> v;  // second moments

  void init(std::span<const Tensor> params);
};

// Single update with one learning rate for all parameters.
void adam_step(std::span<Tensor> params, AdamState& state, double lr);

// Per-parameter learning rates (lrs.size() == params.size()).
void adam_step(std::span<Tensor> params, AdamState& state,
               std::span<const double> lrs);

}  // namespace molt::ad

#endif  // MOLT_AD_ADAM_HPP_
