// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sim/core/tensor.hpp"

namespace sim::nn {

enum class Mode { kTrain, kEval };

// Per-layer activation context saved by a forward pass. A Tape owns one slot
// per layer, so two forward passes (the two SimSiam views) can be kept alive
// at the same time and backpropagated independently.
struct LayerCtx {
  std::vector<Tensor> saved;
  std::vector<std::int32_t> isaved;
  std::vector<i64> in_shape;
};

class Tape {
 public:
  Tape() = default;
  explicit Tape(std::size_t n_layers) : slots_(n_layers) {}
  LayerCtx& at(int id) { return slots_[static_cast<std::size_t>(id)]; }
  const LayerCtx& at(int id) const { return slots_[static_cast<std::size_t>(id)]; }
  void clear() {
    for (auto& s : slots_) s = LayerCtx{};
  }

 private:
  std::vector<LayerCtx> slots_;
};

// Sequentially assigned layer ids; one generator per model.
struct IdGen {
  int next = 0;
  int operator()() { return next++; }
};

// A named parameter or buffer. Buffers (running statistics) have
// trainable == false and a null grad.
struct Param {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
  bool trainable = true;
};

}  // namespace sim::nn
