// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "sim/core/half.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::kern {

void relu_forward(const float* x, float* y, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward(const float* x, const float* dy, float* dx, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : 0.0f;
}

void add_inplace(float* y, const float* x, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) y[i] += x[i];
}

void axpy(float a, const float* x, float* y, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_inplace(float* y, float a, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) y[i] *= a;
}

void half_quantize_inplace(float* y, i64 n) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) y[i] = half_round(y[i]);
}

float l2_normalize_rows(const float* x, i64 N, i64 D, float* y) {
  float min_norm = std::numeric_limits<float>::infinity();
#pragma omp parallel for schedule(static) reduction(min : min_norm)
  for (i64 r = 0; r < N; ++r) {
    const float* xr = x + r * D;
    double sq = 0.0;
    for (i64 j = 0; j < D; ++j) sq += static_cast<double>(xr[j]) * xr[j];
    const float norm = static_cast<float>(std::sqrt(sq));
    min_norm = std::min(min_norm, norm);
    const float inv = norm > 0.0f ? 1.0f / norm : 0.0f;
    float* yr = y + r * D;
    for (i64 j = 0; j < D; ++j) yr[j] = xr[j] * inv;
  }
  return min_norm;
}

void softmax_rows(const float* logits, i64 N, i64 C, float* probs) {
#pragma omp parallel for schedule(static)
  for (i64 r = 0; r < N; ++r) {
    const float* z = logits + r * C;
    float* p = probs + r * C;
    float zmax = z[0];
    for (i64 c = 1; c < C; ++c) zmax = std::max(zmax, z[c]);
    double sum = 0.0;
    for (i64 c = 0; c < C; ++c) {
      p[c] = std::exp(z[c] - zmax);
      sum += p[c];
    }
    const float inv = static_cast<float>(1.0 / sum);
    for (i64 c = 0; c < C; ++c) p[c] *= inv;
  }
}

void sgd_momentum_update(float* p, const float* g, float* buf, i64 n,
                         float lr, float momentum, float weight_decay) {
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < n; ++i) {
    const float grad = g[i] + weight_decay * p[i];
    buf[i] = momentum * buf[i] + grad;
    p[i] -= lr * buf[i];
  }
}

}  // namespace sim::kern
