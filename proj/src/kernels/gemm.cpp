// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "sim/kernels/kern.hpp"

namespace sim::kern {

namespace {
// Cache blocking. KB*NB floats of B (~1 MB) stay resident in L2 while a row
// tile of C is updated; the 4-row micro update keeps 4 accumulator rows in L1.
constexpr i64 kRowTile = 64;
constexpr i64 kNB = 1024;
constexpr i64 kKB = 256;
}  // namespace

void sgemm_nn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc) {
  const i64 tiles = (M + kRowTile - 1) / kRowTile;
#pragma omp parallel for schedule(static)
  for (i64 t = 0; t < tiles; ++t) {
    const i64 i_lo = t * kRowTile;
    const i64 i_hi = std::min(i_lo + kRowTile, M);
    for (i64 j0 = 0; j0 < N; j0 += kNB) {
      const i64 jb = std::min(kNB, N - j0);
      for (i64 k0 = 0; k0 < K; k0 += kKB) {
        const i64 kb = std::min(kKB, K - k0);
        i64 i = i_lo;
        for (; i + 4 <= i_hi; i += 4) {
          float* c0 = C + i * ldc + j0;
          float* c1 = c0 + ldc;
          float* c2 = c1 + ldc;
          float* c3 = c2 + ldc;
          if (k0 == 0) {
            if (beta == 0.0f) {
              for (i64 j = 0; j < jb; ++j) c0[j] = c1[j] = c2[j] = c3[j] = 0.0f;
            } else if (beta != 1.0f) {
              for (i64 j = 0; j < jb; ++j) {
                c0[j] *= beta;
                c1[j] *= beta;
                c2[j] *= beta;
                c3[j] *= beta;
              }
            }
          }
          for (i64 k = k0; k < k0 + kb; ++k) {
            const float a0 = alpha * A[(i + 0) * lda + k];
            const float a1 = alpha * A[(i + 1) * lda + k];
            const float a2 = alpha * A[(i + 2) * lda + k];
            const float a3 = alpha * A[(i + 3) * lda + k];
            const float* __restrict b = B + k * ldb + j0;
            for (i64 j = 0; j < jb; ++j) {
              const float bj = b[j];
              c0[j] += a0 * bj;
              c1[j] += a1 * bj;
              c2[j] += a2 * bj;
              c3[j] += a3 * bj;
            }
          }
        }
        for (; i < i_hi; ++i) {
          float* c = C + i * ldc + j0;
          if (k0 == 0) {
            if (beta == 0.0f) {
              for (i64 j = 0; j < jb; ++j) c[j] = 0.0f;
            } else if (beta != 1.0f) {
              for (i64 j = 0; j < jb; ++j) c[j] *= beta;
            }
          }
          for (i64 k = k0; k < k0 + kb; ++k) {
            const float a = alpha * A[i * lda + k];
            const float* __restrict b = B + k * ldb + j0;
            for (i64 j = 0; j < jb; ++j) c[j] += a * b[j];
          }
        }
      }
    }
  }
}

void sgemm_tn(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc) {
  const i64 tiles = (M + kRowTile - 1) / kRowTile;
#pragma omp parallel for schedule(static)
  for (i64 t = 0; t < tiles; ++t) {
    const i64 i_lo = t * kRowTile;
    const i64 i_hi = std::min(i_lo + kRowTile, M);
    for (i64 j0 = 0; j0 < N; j0 += kNB) {
      const i64 jb = std::min(kNB, N - j0);
      for (i64 k0 = 0; k0 < K; k0 += kKB) {
        const i64 kb = std::min(kKB, K - k0);
        i64 i = i_lo;
        for (; i + 4 <= i_hi; i += 4) {
          float* c0 = C + i * ldc + j0;
          float* c1 = c0 + ldc;
          float* c2 = c1 + ldc;
          float* c3 = c2 + ldc;
          if (k0 == 0) {
            if (beta == 0.0f) {
              for (i64 j = 0; j < jb; ++j) c0[j] = c1[j] = c2[j] = c3[j] = 0.0f;
            } else if (beta != 1.0f) {
              for (i64 j = 0; j < jb; ++j) {
                c0[j] *= beta;
                c1[j] *= beta;
                c2[j] *= beta;
                c3[j] *= beta;
              }
            }
          }
          for (i64 k = k0; k < k0 + kb; ++k) {
            const float* arow = A + k * lda + i;
            const float a0 = alpha * arow[0];
            const float a1 = alpha * arow[1];
            const float a2 = alpha * arow[2];
            const float a3 = alpha * arow[3];
            const float* __restrict b = B + k * ldb + j0;
            for (i64 j = 0; j < jb; ++j) {
              const float bj = b[j];
              c0[j] += a0 * bj;
              c1[j] += a1 * bj;
              c2[j] += a2 * bj;
              c3[j] += a3 * bj;
            }
          }
        }
        for (; i < i_hi; ++i) {
          float* c = C + i * ldc + j0;
          if (k0 == 0) {
            if (beta == 0.0f) {
              for (i64 j = 0; j < jb; ++j) c[j] = 0.0f;
            } else if (beta != 1.0f) {
              for (i64 j = 0; j < jb; ++j) c[j] *= beta;
            }
          }
          for (i64 k = k0; k < k0 + kb; ++k) {
            const float a = alpha * A[k * lda + i];
            const float* __restrict b = B + k * ldb + j0;
            for (i64 j = 0; j < jb; ++j) c[j] += a * b[j];
          }
        }
      }
    }
  }
}

void sgemm_nt(i64 M, i64 N, i64 K, float alpha, const float* A, i64 lda,
              const float* B, i64 ldb, float beta, float* C, i64 ldc) {
  const i64 tiles = (M + 3) / 4;
#pragma omp parallel for schedule(static)
  for (i64 t = 0; t < tiles; ++t) {
    const i64 i = t * 4;
    const i64 ib = std::min<i64>(4, M - i);
    for (i64 j = 0; j < N; j += 4) {
      const i64 jb = std::min<i64>(4, N - j);
      float acc[4][4] = {};
      for (i64 r = 0; r < ib; ++r) {
        const float* __restrict a = A + (i + r) * lda;
        for (i64 c = 0; c < jb; ++c) {
          const float* __restrict b = B + (j + c) * ldb;
          float s = 0.0f;
          for (i64 k = 0; k < K; ++k) s += a[k] * b[k];
          acc[r][c] = s;
        }
      }
      for (i64 r = 0; r < ib; ++r)
        for (i64 c = 0; c < jb; ++c) {
          float* out = C + (i + r) * ldc + (j + c);
          *out = alpha * acc[r][c] + (beta == 0.0f ? 0.0f : beta * *out);
        }
    }
  }
}

}  // namespace sim::kern
