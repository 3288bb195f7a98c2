// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
//
// OpenMP-parallel compute kernels. Every kernel is deterministic: each output
// element is owned by exactly one thread and inner accumulations run in a
// fixed order, so results do not depend on the thread count.
#pragma once

#include "sim/core/tensor.hpp"

namespace sim::kern {

// ---- GEMM (row-major) ------------------------------------------------------
// C[M,N] = alpha * A[M,K] * B[K,N] + beta * C
void sgemm_nn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc);
// C[M,N] = alpha * A[M,K] * B[N,K]^T + beta * C
void sgemm_nt(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc);
// C[M,N] = alpha * A[K,M]^T * B[K,N] + beta * C
void sgemm_tn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc);

// ---- Convolution -----------------------------------------------------------
struct ConvDims {
  i64 batch, cin, h, w;
  i64 cout, kh, kw;
  i64 stride, pad;
  i64 ho, wo;
};

ConvDims conv_dims(const std::vector<i64>& x_shape, const std::vector<i64>& w_shape,
                   i64 stride, i64 pad);

// y[B,Cout,Ho,Wo] = conv(x[B,Cin,H,W], w[Cout,Cin,kh,kw])
void conv2d_forward(const Tensor& x, const Tensor& w, i64 stride, i64 pad, Tensor& y);
// dx (optional) is overwritten; dw (optional) is accumulated (+=).
void conv2d_backward(const Tensor& x, const Tensor& w, i64 stride, i64 pad,
                     const Tensor& dy, Tensor* dx, Tensor* dw);

// im2col for one image: x[Cin,H,W] -> col rows [Cin*kh*kw] x cols [Ho*Wo],
// written at column offset `col_off` of a matrix with row stride `col_ld`.
void im2col(const float* x, const ConvDims& d, float* col, i64 col_ld, i64 col_off);
void col2im(const float* col, const ConvDims& d, float* dx, i64 col_ld, i64 col_off);

// ---- Normalization ---------------------------------------------------------
// All norm kernels use biased (population) variance, and treat the input as
// [B, C, HW] (pass HW = H*W, or 1 for fully connected activations).

void batch_norm_forward_train(const float* x, i64 B, i64 C, i64 HW,
                              const float* gamma, const float* beta, float eps,
                              float momentum, float* running_mean, float* running_var,
                              float* y, float* save_mean, float* save_invstd);
void batch_norm_forward_eval(const float* x, i64 B, i64 C, i64 HW,
                             const float* gamma, const float* beta, float eps,
                             const float* running_mean, const float* running_var, float* y);
// dgamma/dbeta accumulated (+=); dx overwritten.
void batch_norm_backward(const float* x, const float* dy, i64 B, i64 C, i64 HW,
                         const float* gamma, const float* save_mean, const float* save_invstd,
                         float* dx, float* dgamma, float* dbeta);

// save_mean/save_invstd hold one entry per (sample, group): length B*groups.
void group_norm_forward(const float* x, i64 B, i64 C, i64 HW, i64 groups,
                        const float* gamma, const float* beta, float eps,
                        float* y, float* save_mean, float* save_invstd);
void group_norm_backward(const float* x, const float* dy, i64 B, i64 C, i64 HW, i64 groups,
                         const float* gamma, const float* save_mean, const float* save_invstd,
                         float* dx, float* dgamma, float* dbeta);

// Weight standardization over the fan-in of each output channel.
// save_invstd (length cout) is needed by the backward pass; may be null.
void weight_standardize_forward(const float* w, i64 cout, i64 fanin, float eps,
                                float* w_hat, float* save_invstd);
void weight_standardize_backward(const float* w_hat, const float* save_invstd,
                                 const float* d_what, i64 cout, i64 fanin, float* dw);

// ---- Activations / pooling -------------------------------------------------
void relu_forward(const float* x, float* y, i64 n);
void relu_backward(const float* x, const float* dy, float* dx, i64 n);

// argmax holds, per output element, the flat h*W+w index of the selected
// input element (needed by the backward scatter).
void maxpool_forward(const float* x, i64 B, i64 C, i64 H, i64 W,
                     i64 k, i64 stride, i64 pad, float* y, std::int32_t* argmax,
                     i64 ho, i64 wo);
void maxpool_backward(const float* dy, const std::int32_t* argmax, i64 B, i64 C,
                      i64 H, i64 W, i64 ho, i64 wo, float* dx);
inline i64 pool_out_dim(i64 in, i64 k, i64 stride, i64 pad) {
  return (in + 2 * pad - k) / stride + 1;
}

void global_avg_pool_forward(const float* x, i64 B, i64 C, i64 HW, float* y);
void global_avg_pool_backward(const float* dy, i64 B, i64 C, i64 HW, float* dx);

// ---- Elementwise / misc ----------------------------------------------------
void add_inplace(float* y, const float* x, i64 n);          // y += x
void axpy(float a, const float* x, float* y, i64 n);        // y += a*x
void scale_inplace(float* y, float a, i64 n);
void half_quantize_inplace(float* y, i64 n);                // round to fp16 grid

// Rows of x[N,D] scaled to unit L2 norm; returns the smallest row norm seen
// (callers reject degenerate rows).
float l2_normalize_rows(const float* x, i64 N, i64 D, float* y);

void softmax_rows(const float* logits, i64 N, i64 C, float* probs);

// SGD with momentum: g' = g + wd*p ; buf = mu*buf + g' ; p -= lr*buf
void sgd_momentum_update(float* p, const float* g, float* buf, i64 n,
                         float lr, float momentum, float weight_decay);

}  // namespace sim::kern
