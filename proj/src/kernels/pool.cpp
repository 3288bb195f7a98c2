// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <limits>

#include "sim/kernels/kern.hpp"

namespace sim::kern {

void maxpool_forward(const float* x, i64 B, i64 C, i64 H, i64 W,
                     i64 k, i64 stride, i64 pad, float* y, std::int32_t* argmax,
                     i64 ho, i64 wo) {
#pragma omp parallel for schedule(static)
  for (i64 bc = 0; bc < B * C; ++bc) {
    const float* xs = x + bc * H * W;
    float* ys = y + bc * ho * wo;
    std::int32_t* as = argmax + bc * ho * wo;
    for (i64 oy = 0; oy < ho; ++oy) {
      for (i64 ox = 0; ox < wo; ++ox) {
        const i64 y0 = oy * stride - pad;
        const i64 x0 = ox * stride - pad;
        float best = -std::numeric_limits<float>::infinity();
        std::int32_t best_idx = -1;
        for (i64 ky = std::max<i64>(0, -y0); ky < k && y0 + ky < H; ++ky) {
          for (i64 kx = std::max<i64>(0, -x0); kx < k && x0 + kx < W; ++kx) {
            const i64 idx = (y0 + ky) * W + (x0 + kx);
            if (xs[idx] > best) {
              best = xs[idx];
              best_idx = static_cast<std::int32_t>(idx);
            }
          }
        }
        ys[oy * wo + ox] = best;
        as[oy * wo + ox] = best_idx;
      }
    }
  }
}

void maxpool_backward(const float* dy, const std::int32_t* argmax, i64 B, i64 C,
                      i64 H, i64 W, i64 ho, i64 wo, float* dx) {
#pragma omp parallel for schedule(static)
  for (i64 bc = 0; bc < B * C; ++bc) {
    float* dxs = dx + bc * H * W;
    std::fill(dxs, dxs + H * W, 0.0f);
    const float* dys = dy + bc * ho * wo;
    const std::int32_t* as = argmax + bc * ho * wo;
    for (i64 p = 0; p < ho * wo; ++p)
      if (as[p] >= 0) dxs[as[p]] += dys[p];
  }
}

void global_avg_pool_forward(const float* x, i64 B, i64 C, i64 HW, float* y) {
#pragma omp parallel for schedule(static)
  for (i64 bc = 0; bc < B * C; ++bc) {
    double sum = 0.0;
    const float* xs = x + bc * HW;
    for (i64 p = 0; p < HW; ++p) sum += xs[p];
    y[bc] = static_cast<float>(sum / HW);
  }
}

void global_avg_pool_backward(const float* dy, i64 B, i64 C, i64 HW, float* dx) {
#pragma omp parallel for schedule(static)
  for (i64 bc = 0; bc < B * C; ++bc) {
    const float g = dy[bc] / static_cast<float>(HW);
    float* dxs = dx + bc * HW;
    for (i64 p = 0; p < HW; ++p) dxs[p] = g;
  }
}

}  // namespace sim::kern
