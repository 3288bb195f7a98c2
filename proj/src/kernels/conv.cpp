// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstring>
#include <vector>

#include "sim/core/error.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::kern {

ConvDims conv_dims(const std::vector<i64>& xs, const std::vector<i64>& ws,
                   i64 stride, i64 pad) {
  if (xs.size() != 4 || ws.size() != 4)
    throw ShapeError("conv2d expects 4-d input and weight");
  if (xs[1] != ws[1])
    throw ShapeError("conv2d channel mismatch: input " + shape_str(xs) + " vs weight " +
                     shape_str(ws));
  ConvDims d;
  d.batch = xs[0];
  d.cin = xs[1];
  d.h = xs[2];
  d.w = xs[3];
  d.cout = ws[0];
  d.kh = ws[2];
  d.kw = ws[3];
  d.stride = stride;
  d.pad = pad;
  d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
  d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
  if (d.ho < 1 || d.wo < 1) throw ShapeError("conv2d output would be empty");
  return d;
}

void im2col(const float* x, const ConvDims& d, float* col, i64 col_ld, i64 col_off) {
  const i64 hw = d.h * d.w;
  const i64 howo = d.ho * d.wo;
  for (i64 c = 0; c < d.cin; ++c) {
    const float* xc = x + c * hw;
    for (i64 ky = 0; ky < d.kh; ++ky) {
      for (i64 kx = 0; kx < d.kw; ++kx) {
        float* row = col + ((c * d.kh + ky) * d.kw + kx) * col_ld + col_off;
        for (i64 oy = 0; oy < d.ho; ++oy) {
          const i64 iy = oy * d.stride - d.pad + ky;
          float* out = row + oy * d.wo;
          if (iy < 0 || iy >= d.h) {
            std::memset(out, 0, static_cast<size_t>(d.wo) * sizeof(float));
            continue;
          }
          const float* xrow = xc + iy * d.w;
          for (i64 ox = 0; ox < d.wo; ++ox) {
            const i64 ix = ox * d.stride - d.pad + kx;
            out[ox] = (ix >= 0 && ix < d.w) ? xrow[ix] : 0.0f;
          }
        }
        (void)howo;
      }
    }
  }
}

void col2im(const float* col, const ConvDims& d, float* dx, i64 col_ld, i64 col_off) {
  const i64 hw = d.h * d.w;
  for (i64 c = 0; c < d.cin; ++c) {
    float* xc = dx + c * hw;
    for (i64 ky = 0; ky < d.kh; ++ky) {
      for (i64 kx = 0; kx < d.kw; ++kx) {
        const float* row = col + ((c * d.kh + ky) * d.kw + kx) * col_ld + col_off;
        for (i64 oy = 0; oy < d.ho; ++oy) {
          const i64 iy = oy * d.stride - d.pad + ky;
          if (iy < 0 || iy >= d.h) continue;
          const float* in = row + oy * d.wo;
          float* xrow = xc + iy * d.w;
          for (i64 ox = 0; ox < d.wo; ++ox) {
            const i64 ix = ox * d.stride - d.pad + kx;
            if (ix >= 0 && ix < d.w) xrow[ix] += in[ox];
          }
        }
      }
    }
  }
}

namespace {

// Images per im2col chunk, bounded by a ~64 MB scratch budget. Chunking is a
// pure function of the shapes so runs are reproducible.
i64 chunk_images(const ConvDims& d) {
  const i64 cols_per_image = d.ho * d.wo;
  const i64 rows = d.cin * d.kh * d.kw;
  const i64 budget = 16u << 20;  // floats
  i64 chunk = budget / std::max<i64>(1, rows * cols_per_image);
  return std::clamp<i64>(chunk, 1, d.batch);
}

bool is_pointwise(const ConvDims& d) {
  return d.kh == 1 && d.kw == 1 && d.stride == 1 && d.pad == 0;
}

}  // namespace

void conv2d_forward(const Tensor& x, const Tensor& w, i64 stride, i64 pad, Tensor& y) {
  const ConvDims d = conv_dims(x.shape(), w.shape(), stride, pad);
  y = Tensor({d.batch, d.cout, d.ho, d.wo});
  const i64 howo = d.ho * d.wo;
  const i64 k2 = d.cin * d.kh * d.kw;

  if (is_pointwise(d)) {
    // 1x1 stride-1: y[n] = w * x[n], no packing needed.
    for (i64 n = 0; n < d.batch; ++n) {
      sgemm_nn(d.cout, howo, d.cin, 1.0f, w.data(), d.cin,
               x.data() + n * d.cin * howo, howo, 0.0f,
               y.data() + n * d.cout * howo, howo);
    }
    return;
  }

  const i64 chunk = chunk_images(d);
  std::vector<float> col(static_cast<size_t>(k2 * chunk * howo));
  std::vector<float> ybuf(static_cast<size_t>(d.cout * chunk * howo));
  for (i64 n0 = 0; n0 < d.batch; n0 += chunk) {
    const i64 nb = std::min(chunk, d.batch - n0);
    const i64 ld = nb * howo;
#pragma omp parallel for schedule(static)
    for (i64 n = 0; n < nb; ++n)
      im2col(x.data() + (n0 + n) * d.cin * d.h * d.w, d, col.data(), ld, n * howo);
    sgemm_nn(d.cout, ld, k2, 1.0f, w.data(), k2, col.data(), ld, 0.0f, ybuf.data(), ld);
#pragma omp parallel for schedule(static) collapse(2)
    for (i64 n = 0; n < nb; ++n)
      for (i64 c = 0; c < d.cout; ++c)
        std::memcpy(y.data() + ((n0 + n) * d.cout + c) * howo,
                    ybuf.data() + c * ld + n * howo,
                    static_cast<size_t>(howo) * sizeof(float));
  }
}

void conv2d_backward(const Tensor& x, const Tensor& w, i64 stride, i64 pad,
                     const Tensor& dy, Tensor* dx, Tensor* dw) {
  const ConvDims d = conv_dims(x.shape(), w.shape(), stride, pad);
  const i64 howo = d.ho * d.wo;
  const i64 k2 = d.cin * d.kh * d.kw;
  if (dy.shape() != std::vector<i64>{d.batch, d.cout, d.ho, d.wo})
    throw ShapeError("conv2d_backward: dy shape " + shape_str(dy.shape()) + " unexpected");
  if (dx) *dx = Tensor(x.shape());
  if (dw && dw->shape() != w.shape()) *dw = Tensor(w.shape());

  if (is_pointwise(d)) {
    for (i64 n = 0; n < d.batch; ++n) {
      const float* dyn = dy.data() + n * d.cout * howo;
      if (dw)
        sgemm_nt(d.cout, d.cin, howo, 1.0f, dyn, howo,
                 x.data() + n * d.cin * howo, howo, 1.0f, dw->data(), d.cin);
      if (dx)
        sgemm_tn(d.cin, howo, d.cout, 1.0f, w.data(), d.cin, dyn, howo, 0.0f,
                 dx->data() + n * d.cin * howo, howo);
    }
    return;
  }

  const i64 chunk = chunk_images(d);
  std::vector<float> col(static_cast<size_t>(k2 * chunk * howo));
  std::vector<float> dybuf(static_cast<size_t>(d.cout * chunk * howo));
  std::vector<float> dcol(dx ? static_cast<size_t>(k2 * chunk * howo) : 0);
  for (i64 n0 = 0; n0 < d.batch; n0 += chunk) {
    const i64 nb = std::min(chunk, d.batch - n0);
    const i64 ld = nb * howo;
#pragma omp parallel for schedule(static)
    for (i64 n = 0; n < nb; ++n)
      im2col(x.data() + (n0 + n) * d.cin * d.h * d.w, d, col.data(), ld, n * howo);
#pragma omp parallel for schedule(static) collapse(2)
    for (i64 n = 0; n < nb; ++n)
      for (i64 c = 0; c < d.cout; ++c)
        std::memcpy(dybuf.data() + c * ld + n * howo,
                    dy.data() + ((n0 + n) * d.cout + c) * howo,
                    static_cast<size_t>(howo) * sizeof(float));
    if (dw)
      sgemm_nt(d.cout, k2, ld, 1.0f, dybuf.data(), ld, col.data(), ld, 1.0f,
               dw->data(), k2);
    if (dx) {
      sgemm_tn(k2, ld, d.cout, 1.0f, w.data(), k2, dybuf.data(), ld, 0.0f,
               dcol.data(), ld);
#pragma omp parallel for schedule(static)
      for (i64 n = 0; n < nb; ++n)
        col2im(dcol.data(), d, dx->data() + (n0 + n) * d.cin * d.h * d.w, ld, n * howo);
    }
  }
}

}  // namespace sim::kern
