// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "sim/core/error.hpp"
#include "sim/core/tensor.hpp"

namespace sim::train {

struct OptimConfig {
  double base_lr = 0.03;
  i64 batch_size = 128;
  double weight_decay = 5e-4;
  double momentum = 0.9;
  i64 epochs = 400;
  bool mixed_precision = false;

  double scaled_lr() const { return base_lr * static_cast<double>(batch_size) / 256.0; }
  void validate() const {
    if (base_lr <= 0) throw ConfigError("base_lr must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (weight_decay < 0) throw ConfigError("weight_decay must be non-negative");
    if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0,1)");
    if (epochs < 1) throw ConfigError("epochs must be positive");
  }
};

// Cosine decay over normalized progress t in [0,1], linearly scaled base LR.
inline double lr_at(double t, const OptimConfig& cfg) {
  if (t < 0.0 || t > 1.0)
    throw ConfigError("schedule progress " + std::to_string(t) + " outside [0,1]");
  return cfg.scaled_lr() * 0.5 * (1.0 + std::cos(M_PI * t));
}

}  // namespace sim::train
