// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sim/core/tensor.hpp"
#include "sim/nn/layer.hpp"

namespace sim::nn {

// SGD with momentum and coupled weight decay: the decay term is added to the
// gradient before the momentum update.
//
//   g' = g + wd * p        (p in the decayed set)
//   buf = mu * buf + g'
//   p  -= lr * buf
//
// Weight decay applies to every trainable parameter unless its name starts
// with one of `no_decay_prefixes`; the default is to exclude nothing.
// Momentum buffers are keyed by parameter name so they survive checkpointing
// and model re-construction on resume.
class SgdMomentum {
 public:
  SgdMomentum(float momentum, float weight_decay,
              std::vector<std::string> no_decay_prefixes = {})
      : momentum_(momentum),
        weight_decay_(weight_decay),
        no_decay_prefixes_(std::move(no_decay_prefixes)) {}

  void step(std::vector<Param>& params, float lr);

  bool decays(const std::string& name) const;
  // Names of the parameters that receive weight decay, for config audits.
  std::vector<std::string> decayed_set(const std::vector<Param>& params) const;

  std::map<std::string, Tensor>& buffers() { return buffers_; }
  const std::map<std::string, Tensor>& buffers() const { return buffers_; }
  float momentum() const { return momentum_; }
  float weight_decay() const { return weight_decay_; }

 private:
  float momentum_;
  float weight_decay_;
  std::vector<std::string> no_decay_prefixes_;
  std::map<std::string, Tensor> buffers_;
};

}  // namespace sim::nn
