// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels. Straight transcriptions of the defining formulas,
// double-precision accumulation, no blocking, no OpenMP. They exist to check
// the parallel kernels and are also used by the benchmark tool; keep them
// independent of sim::kern.
#pragma once

#include "sim/core/tensor.hpp"

namespace sim::ref {

void gemm_nn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
             const float* B, i64 ldb, float beta, float* C, i64 ldc);

void conv2d_forward(const Tensor& x, const Tensor& w, i64 stride, i64 pad, Tensor& y);

void batch_norm_forward_train(const float* x, i64 B, i64 C, i64 HW,
                              const float* gamma, const float* beta, float eps, float* y);
void group_norm_forward(const float* x, i64 B, i64 C, i64 HW, i64 groups,
                        const float* gamma, const float* beta, float eps, float* y);
void weight_standardize(const float* w, i64 cout, i64 fanin, float eps, float* w_hat);

void maxpool_forward(const float* x, i64 B, i64 C, i64 H, i64 W,
                     i64 k, i64 stride, i64 pad, float* y, i64 ho, i64 wo);

}  // namespace sim::ref
