// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "sim/kernels/kern.hpp"

namespace sim::kern {

void batch_norm_forward_train(const float* x, i64 B, i64 C, i64 HW,
                              const float* gamma, const float* beta, float eps,
                              float momentum, float* running_mean, float* running_var,
                              float* y, float* save_mean, float* save_invstd) {
  const i64 count = B * HW;
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < C; ++c) {
    double sum = 0.0;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) sum += xc[p];
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) {
        const double d = xc[p] - mean;
        sq += d * d;
      }
    }
    const double var = sq / static_cast<double>(count);  // population variance
    const float invstd = static_cast<float>(1.0 / std::sqrt(var + eps));
    save_mean[c] = static_cast<float>(mean);
    save_invstd[c] = invstd;
    running_mean[c] = (1.0f - momentum) * running_mean[c] + momentum * static_cast<float>(mean);
    running_var[c] = (1.0f - momentum) * running_var[c] + momentum * static_cast<float>(var);
    const float g = gamma[c] * invstd;
    const float bshift = beta[c] - static_cast<float>(mean) * g;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      float* yc = y + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) yc[p] = g * xc[p] + bshift;
    }
  }
}

void batch_norm_forward_eval(const float* x, i64 B, i64 C, i64 HW,
                             const float* gamma, const float* beta, float eps,
                             const float* running_mean, const float* running_var, float* y) {
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < C; ++c) {
    const float invstd = 1.0f / std::sqrt(running_var[c] + eps);
    const float g = gamma[c] * invstd;
    const float bshift = beta[c] - running_mean[c] * g;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      float* yc = y + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) yc[p] = g * xc[p] + bshift;
    }
  }
}

void batch_norm_backward(const float* x, const float* dy, i64 B, i64 C, i64 HW,
                         const float* gamma, const float* save_mean, const float* save_invstd,
                         float* dx, float* dgamma, float* dbeta) {
  const i64 count = B * HW;
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < C; ++c) {
    const float mean = save_mean[c];
    const float invstd = save_invstd[c];
    double sum_dy = 0.0, sum_dy_xh = 0.0;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      const float* dyc = dy + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) {
        const float xh = (xc[p] - mean) * invstd;
        sum_dy += dyc[p];
        sum_dy_xh += dyc[p] * xh;
      }
    }
    dgamma[c] += static_cast<float>(sum_dy_xh);
    dbeta[c] += static_cast<float>(sum_dy);
    const float mean_dy = static_cast<float>(sum_dy / count);
    const float mean_dy_xh = static_cast<float>(sum_dy_xh / count);
    const float g = gamma[c] * invstd;
    for (i64 b = 0; b < B; ++b) {
      const float* xc = x + (b * C + c) * HW;
      const float* dyc = dy + (b * C + c) * HW;
      float* dxc = dx + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) {
        const float xh = (xc[p] - mean) * invstd;
        dxc[p] = g * (dyc[p] - mean_dy - xh * mean_dy_xh);
      }
    }
  }
}

void group_norm_forward(const float* x, i64 B, i64 C, i64 HW, i64 groups,
                        const float* gamma, const float* beta, float eps,
                        float* y, float* save_mean, float* save_invstd) {
  const i64 cpg = C / groups;
  const i64 m = cpg * HW;
#pragma omp parallel for schedule(static) collapse(2)
  for (i64 b = 0; b < B; ++b) {
    for (i64 g = 0; g < groups; ++g) {
      const float* xs = x + (b * C + g * cpg) * HW;
      double sum = 0.0;
      for (i64 i = 0; i < m; ++i) sum += xs[i];
      const double mean = sum / static_cast<double>(m);
      double sq = 0.0;
      for (i64 i = 0; i < m; ++i) {
        const double d = xs[i] - mean;
        sq += d * d;
      }
      const float invstd = static_cast<float>(1.0 / std::sqrt(sq / m + eps));
      save_mean[b * groups + g] = static_cast<float>(mean);
      save_invstd[b * groups + g] = invstd;
      float* ys = y + (b * C + g * cpg) * HW;
      for (i64 cc = 0; cc < cpg; ++cc) {
        const i64 c = g * cpg + cc;
        const float gm = gamma[c] * invstd;
        const float bs = beta[c] - static_cast<float>(mean) * gm;
        const float* xr = xs + cc * HW;
        float* yr = ys + cc * HW;
        for (i64 p = 0; p < HW; ++p) yr[p] = gm * xr[p] + bs;
      }
    }
  }
}

void group_norm_backward(const float* x, const float* dy, i64 B, i64 C, i64 HW, i64 groups,
                         const float* gamma, const float* save_mean, const float* save_invstd,
                         float* dx, float* dgamma, float* dbeta) {
  const i64 cpg = C / groups;
  const i64 m = cpg * HW;
#pragma omp parallel for schedule(static) collapse(2)
  for (i64 b = 0; b < B; ++b) {
    for (i64 g = 0; g < groups; ++g) {
      const float mean = save_mean[b * groups + g];
      const float invstd = save_invstd[b * groups + g];
      const float* xs = x + (b * C + g * cpg) * HW;
      const float* dys = dy + (b * C + g * cpg) * HW;
      double sum_gy = 0.0, sum_gy_xh = 0.0;
      for (i64 cc = 0; cc < cpg; ++cc) {
        const float gm = gamma[g * cpg + cc];
        const float* xr = xs + cc * HW;
        const float* dyr = dys + cc * HW;
        for (i64 p = 0; p < HW; ++p) {
          const float xh = (xr[p] - mean) * invstd;
          const float gy = gm * dyr[p];
          sum_gy += gy;
          sum_gy_xh += gy * xh;
        }
      }
      const float mean_gy = static_cast<float>(sum_gy / m);
      const float mean_gy_xh = static_cast<float>(sum_gy_xh / m);
      float* dxs = dx + (b * C + g * cpg) * HW;
      for (i64 cc = 0; cc < cpg; ++cc) {
        const float gm = gamma[g * cpg + cc];
        const float* xr = xs + cc * HW;
        const float* dyr = dys + cc * HW;
        float* dxr = dxs + cc * HW;
        for (i64 p = 0; p < HW; ++p) {
          const float xh = (xr[p] - mean) * invstd;
          dxr[p] = invstd * (gm * dyr[p] - mean_gy - xh * mean_gy_xh);
        }
      }
    }
  }
  // Affine gradients accumulate over the batch; done per channel to keep the
  // summation order fixed.
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < C; ++c) {
    const i64 g = c / cpg;
    double dg = 0.0, db = 0.0;
    for (i64 b = 0; b < B; ++b) {
      const float mean = save_mean[b * groups + g];
      const float invstd = save_invstd[b * groups + g];
      const float* xr = x + (b * C + c) * HW;
      const float* dyr = dy + (b * C + c) * HW;
      for (i64 p = 0; p < HW; ++p) {
        dg += dyr[p] * (xr[p] - mean) * invstd;
        db += dyr[p];
      }
    }
    dgamma[c] += static_cast<float>(dg);
    dbeta[c] += static_cast<float>(db);
  }
}

void weight_standardize_forward(const float* w, i64 cout, i64 fanin, float eps,
                                float* w_hat, float* save_invstd) {
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < cout; ++c) {
    const float* wr = w + c * fanin;
    double sum = 0.0;
    for (i64 i = 0; i < fanin; ++i) sum += wr[i];
    const double mean = sum / static_cast<double>(fanin);
    double sq = 0.0;
    for (i64 i = 0; i < fanin; ++i) {
      const double d = wr[i] - mean;
      sq += d * d;
    }
    const float invstd = static_cast<float>(1.0 / std::sqrt(sq / fanin + eps));
    if (save_invstd) save_invstd[c] = invstd;
    float* out = w_hat + c * fanin;
    for (i64 i = 0; i < fanin; ++i)
      out[i] = (wr[i] - static_cast<float>(mean)) * invstd;
  }
}

void weight_standardize_backward(const float* w_hat, const float* save_invstd,
                                 const float* d_what, i64 cout, i64 fanin, float* dw) {
#pragma omp parallel for schedule(static)
  for (i64 c = 0; c < cout; ++c) {
    const float* wh = w_hat + c * fanin;
    const float* g = d_what + c * fanin;
    double sum_g = 0.0, sum_g_wh = 0.0;
    for (i64 i = 0; i < fanin; ++i) {
      sum_g += g[i];
      sum_g_wh += g[i] * wh[i];
    }
    const float mean_g = static_cast<float>(sum_g / fanin);
    const float mean_g_wh = static_cast<float>(sum_g_wh / fanin);
    const float invstd = save_invstd[c];
    float* out = dw + c * fanin;
    for (i64 i = 0; i < fanin; ++i)
      out[i] = invstd * (g[i] - mean_g - wh[i] * mean_g_wh);
  }
}

}  // namespace sim::kern
