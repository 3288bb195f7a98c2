// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/kernels/ref.hpp"

#include <cmath>
#include <limits>

#include "sim/core/error.hpp"

namespace sim::ref {

void gemm_nn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
             const float* B, i64 ldb, float beta, float* C, i64 ldc) {
  for (i64 i = 0; i < M; ++i) {
    for (i64 j = 0; j < N; ++j) {
      double acc = 0.0;
      for (i64 k = 0; k < K; ++k)
        acc += static_cast<double>(A[i * lda + k]) * B[k * ldb + j];
      C[i * ldc + j] = static_cast<float>(alpha * acc +
                                          (beta == 0.0f ? 0.0 : beta * C[i * ldc + j]));
    }
  }
}

void conv2d_forward(const Tensor& x, const Tensor& w, i64 stride, i64 pad, Tensor& y) {
  const i64 B = x.dim(0), Cin = x.dim(1), H = x.dim(2), W = x.dim(3);
  const i64 Cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (w.dim(1) != Cin) throw ShapeError("ref conv: channel mismatch");
  const i64 Ho = (H + 2 * pad - kh) / stride + 1;
  const i64 Wo = (W + 2 * pad - kw) / stride + 1;
  y = Tensor({B, Cout, Ho, Wo});
  for (i64 n = 0; n < B; ++n)
    for (i64 co = 0; co < Cout; ++co)
      for (i64 oy = 0; oy < Ho; ++oy)
        for (i64 ox = 0; ox < Wo; ++ox) {
          double acc = 0.0;
          for (i64 ci = 0; ci < Cin; ++ci)
            for (i64 ky = 0; ky < kh; ++ky)
              for (i64 kx = 0; kx < kw; ++kx) {
                const i64 iy = oy * stride - pad + ky;
                const i64 ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                acc += static_cast<double>(x.at(n, ci, iy, ix)) * w.at(co, ci, ky, kx);
              }
          y.at(n, co, oy, ox) = static_cast<float>(acc);
        }
}

void batch_norm_forward_train(const float* x, i64 B, i64 C, i64 HW,
                              const float* gamma, const float* beta, float eps, float* y) {
  for (i64 c = 0; c < C; ++c) {
    double sum = 0.0;
    i64 n = 0;
    for (i64 b = 0; b < B; ++b)
      for (i64 p = 0; p < HW; ++p, ++n) sum += x[(b * C + c) * HW + p];
    const double mean = sum / n;
    double var = 0.0;
    for (i64 b = 0; b < B; ++b)
      for (i64 p = 0; p < HW; ++p) {
        const double d = x[(b * C + c) * HW + p] - mean;
        var += d * d;
      }
    var /= n;
    for (i64 b = 0; b < B; ++b)
      for (i64 p = 0; p < HW; ++p) {
        const double xh = (x[(b * C + c) * HW + p] - mean) / std::sqrt(var + eps);
        y[(b * C + c) * HW + p] = static_cast<float>(gamma[c] * xh + beta[c]);
      }
  }
}

void group_norm_forward(const float* x, i64 B, i64 C, i64 HW, i64 groups,
                        const float* gamma, const float* beta, float eps, float* y) {
  const i64 cpg = C / groups;
  for (i64 b = 0; b < B; ++b)
    for (i64 g = 0; g < groups; ++g) {
      double sum = 0.0;
      for (i64 cc = 0; cc < cpg; ++cc)
        for (i64 p = 0; p < HW; ++p) sum += x[(b * C + g * cpg + cc) * HW + p];
      const double mean = sum / (cpg * HW);
      double var = 0.0;
      for (i64 cc = 0; cc < cpg; ++cc)
        for (i64 p = 0; p < HW; ++p) {
          const double d = x[(b * C + g * cpg + cc) * HW + p] - mean;
          var += d * d;
        }
      var /= (cpg * HW);
      for (i64 cc = 0; cc < cpg; ++cc) {
        const i64 c = g * cpg + cc;
        for (i64 p = 0; p < HW; ++p) {
          const double xh = (x[(b * C + c) * HW + p] - mean) / std::sqrt(var + eps);
          y[(b * C + c) * HW + p] = static_cast<float>(gamma[c] * xh + beta[c]);
        }
      }
    }
}

void weight_standardize(const float* w, i64 cout, i64 fanin, float eps, float* w_hat) {
  for (i64 c = 0; c < cout; ++c) {
    double sum = 0.0;
    for (i64 i = 0; i < fanin; ++i) sum += w[c * fanin + i];
    const double mean = sum / fanin;
    double var = 0.0;
    for (i64 i = 0; i < fanin; ++i) {
      const double d = w[c * fanin + i] - mean;
      var += d * d;
    }
    var /= fanin;
    for (i64 i = 0; i < fanin; ++i)
      w_hat[c * fanin + i] = static_cast<float>((w[c * fanin + i] - mean) / std::sqrt(var + eps));
  }
}

void maxpool_forward(const float* x, i64 B, i64 C, i64 H, i64 W,
                     i64 k, i64 stride, i64 pad, float* y, i64 ho, i64 wo) {
  for (i64 bc = 0; bc < B * C; ++bc)
    for (i64 oy = 0; oy < ho; ++oy)
      for (i64 ox = 0; ox < wo; ++ox) {
        float best = -std::numeric_limits<float>::infinity();
        for (i64 ky = 0; ky < k; ++ky)
          for (i64 kx = 0; kx < k; ++kx) {
            const i64 iy = oy * stride - pad + ky;
            const i64 ix = ox * stride - pad + kx;
            if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
            best = std::max(best, x[bc * H * W + iy * W + ix]);
          }
        y[bc * ho * wo + oy * wo + ox] = best;
      }
}

}  // namespace sim::ref
