// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/train/loss.hpp"

#include <cmath>

#include "sim/core/error.hpp"

namespace sim::train {

namespace {

constexpr double kMinNorm = 1e-12;

void check_pair(const Tensor& a, const Tensor& b, const char* an, const char* bn) {
  if (a.ndim() != 2 || b.ndim() != 2 || !a.same_shape(b))
    throw ShapeError(std::string("simsiam_loss: ") + an + " " + shape_str(a.shape()) +
                     " vs " + bn + " " + shape_str(b.shape()));
}

// Accumulates one direction D(p, sg(z)); writes dL/dp scaled by `grad_scale`
// when dp is non-null. Returns sum of cosines.
double direction(const Tensor& p, const Tensor& z, const char* pn, const char* zn,
                 Tensor* dp, double grad_scale) {
  const i64 B = p.dim(0), D = p.dim(1);
  double cos_sum = 0;
  for (i64 i = 0; i < B; ++i) {
    const float* pi = p.data() + i * D;
    const float* zi = z.data() + i * D;
    double pp = 0, zz = 0, pz = 0;
    for (i64 j = 0; j < D; ++j) {
      pp += static_cast<double>(pi[j]) * pi[j];
      zz += static_cast<double>(zi[j]) * zi[j];
      pz += static_cast<double>(pi[j]) * zi[j];
    }
    const double pnorm = std::sqrt(pp), znorm = std::sqrt(zz);
    if (pnorm < kMinNorm)
      throw NumericError(std::string("simsiam_loss: zero-norm row ") + std::to_string(i) +
                         " in " + pn);
    if (znorm < kMinNorm)
      throw NumericError(std::string("simsiam_loss: zero-norm row ") + std::to_string(i) +
                         " in " + zn);
    const double c = pz / (pnorm * znorm);
    cos_sum += c;
    if (dp) {
      float* g = dp->data() + i * D;
      // d(-cos)/dp = -(z_hat - p_hat*cos)/|p|
      for (i64 j = 0; j < D; ++j)
        g[j] = static_cast<float>(grad_scale * -(zi[j] / znorm - (pi[j] / pnorm) * c) / pnorm);
    }
  }
  return cos_sum;
}

}  // namespace

SimSiamLoss simsiam_loss(const Tensor& p1, const Tensor& p2, const Tensor& z1,
                         const Tensor& z2) {
  check_pair(p1, z2, "p1", "z2");
  check_pair(p2, z1, "p2", "z1");
  check_pair(p1, p2, "p1", "p2");
  const i64 B = p1.dim(0);
  SimSiamLoss out;
  out.dp1 = Tensor::zeros(p1.shape());
  out.dp2 = Tensor::zeros(p2.shape());
  const double scale = 0.5 / static_cast<double>(B);
  const double c1 = direction(p1, z2, "p1", "z2", &out.dp1, scale);
  const double c2 = direction(p2, z1, "p2", "z1", &out.dp2, scale);
  out.value = static_cast<float>(-scale * (c1 + c2));
  return out;
}

float simsiam_loss_value(const Tensor& p1, const Tensor& p2, const Tensor& z1,
                         const Tensor& z2) {
  check_pair(p1, z2, "p1", "z2");
  check_pair(p2, z1, "p2", "z1");
  const i64 B = p1.dim(0);
  const double scale = 0.5 / static_cast<double>(B);
  const double c1 = direction(p1, z2, "p1", "z2", nullptr, 0);
  const double c2 = direction(p2, z1, "p2", "z1", nullptr, 0);
  return static_cast<float>(-scale * (c1 + c2));
}

}  // namespace sim::train
