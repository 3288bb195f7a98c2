// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/nn/optim.hpp"

#include "sim/core/error.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::nn {

bool SgdMomentum::decays(const std::string& name) const {
  for (const auto& prefix : no_decay_prefixes_)
    if (name.rfind(prefix, 0) == 0) return false;
  return true;
}

std::vector<std::string> SgdMomentum::decayed_set(const std::vector<Param>& params) const {
  std::vector<std::string> out;
  for (const auto& p : params)
    if (p.trainable && decays(p.name)) out.push_back(p.name);
  return out;
}

void SgdMomentum::step(std::vector<Param>& params, float lr) {
  for (auto& p : params) {
    if (!p.trainable) continue;
    if (!p.grad) throw NumericError("trainable parameter " + p.name + " has no gradient");
    auto [it, inserted] = buffers_.try_emplace(p.name);
    if (inserted) it->second = Tensor::zeros(p.value->shape());
    else if (!it->second.same_shape(*p.value))
      throw ShapeError("momentum buffer shape mismatch for " + p.name);
    const float wd = decays(p.name) ? weight_decay_ : 0.0f;
    kern::sgd_momentum_update(p.value->data(), p.grad->data(), it->second.data(),
                              p.value->numel(), lr, momentum_, wd);
  }
}

}  // namespace sim::nn
