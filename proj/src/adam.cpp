// SPDX-License-Identifier: Apache-2.0

#include "molt/ad/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace molt::ad {

void AdamState::init(std::span<const Tensor> params) {
  step_count = 0;
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.emplace_back(p.size(), 0.0);
    v.emplace_back(p.size(), 0.0);
  }
}

void adam_step(std::span<Tensor> params, AdamState& state, double lr) {
  std::vector<double> lrs(params.size(), lr);
  adam_step(params, state, lrs);
}

void adam_step(std::span<Tensor> params, AdamState& state,
               std::span<const double> lrs) {
  if (state.m.size() != params.size() || lrs.size() != params.size()) {
    throw std::invalid_argument("adam_step: state/lr size mismatch");
  }
  ++state.step_count;
  const double bc1 =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& param = params[p];
    if (state.m[p].size() != param.size()) {
      throw std::invalid_argument("adam_step: moment shape mismatch");
    }
    auto values = param.values_mut();
    const bool has_grad = param.has_grad();
    auto grads = has_grad ? param.grad() : std::span<const double>();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = has_grad ? grads[i] : 0.0;
      state.m[p][i] = state.beta1 * state.m[p][i] + (1.0 - state.beta1) * g;
      state.v[p][i] =
          state.beta2 * state.v[p][i] + (1.0 - state.beta2) * g * g;
      const double m_hat = state.m[p][i] / bc1;
      const double v_hat = state.v[p][i] / bc2;
      values[i] -= lrs[p] * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace molt::ad
