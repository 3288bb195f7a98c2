// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "sim/core/tensor.hpp"

namespace sim::train {

// Symmetric SimSiam objective over [B,D] batches:
//   L = 0.5*D(p1, sg(z2)) + 0.5*D(p2, sg(z1)),  D(a,b) = -mean_i cos(a_i, b_i)
// with stop-gradient on both projections: the returned gradients cover p1 and
// p2 only, and dL/dz is identically zero by construction.
struct SimSiamLoss {
  float value = 0;
  Tensor dp1, dp2;
};

SimSiamLoss simsiam_loss(const Tensor& p1, const Tensor& p2, const Tensor& z1,
                         const Tensor& z2);

// Loss value alone (no gradients), for monitors.
float simsiam_loss_value(const Tensor& p1, const Tensor& p2, const Tensor& z1,
                         const Tensor& z2);

}  // namespace sim::train
