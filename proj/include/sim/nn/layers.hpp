// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sim/nn/layer.hpp"

namespace sim::nn {

enum class NormKind { kBatchNorm, kGroupNormWS };

// 2-d convolution, no bias (all convs feed a normalization layer). With
// `weight_standardized` the kernel is standardized per output channel at
// forward time and gradients flow through the standardization.
class Conv2d {
 public:
  Conv2d(IdGen& ids, i64 cin, i64 cout, i64 k, i64 stride, i64 pad,
         bool weight_standardized, float ws_eps);

  Tensor forward(const Tensor& x, Mode mode, Tape* tape) const;
  Tensor backward(const Tensor& dy, Tape& tape);
  void collect(const std::string& prefix, std::vector<Param>& out);

  // Kernel as applied at forward time (standardized when WS is on).
  Tensor effective_weight() const;

  Tensor weight;
  Tensor grad_weight;
  i64 cin, cout, ksize, stride, pad;
  bool ws;
  float ws_eps;
  int id;
};

// BatchNorm or GroupNorm over [B,C,H,W] or [B,C] inputs. GroupNorm carries no
// running statistics. `affine` exists for the projector's final norm.
class NormLayer {
 public:
  NormLayer(IdGen& ids, NormKind kind, i64 channels, i64 groups, float eps,
            float momentum, bool affine = true);

  Tensor forward(const Tensor& x, Mode mode, Tape* tape);
  Tensor backward(const Tensor& dy, Tape& tape);
  void collect(const std::string& prefix, std::vector<Param>& out);

  NormKind kind;
  i64 channels, groups;
  float eps, momentum;
  bool affine;
  Tensor gamma, beta, grad_gamma, grad_beta;
  Tensor running_mean, running_var;  // BatchNorm only
  int id;
};

class Relu {
 public:
  explicit Relu(IdGen& ids) : id(ids()) {}
  Tensor forward(const Tensor& x, Tape* tape) const;
  Tensor backward(const Tensor& dy, Tape& tape) const;
  int id;
};

class MaxPool {
 public:
  MaxPool(IdGen& ids, i64 k, i64 stride, i64 pad)
      : k(k), stride(stride), pad(pad), id(ids()) {}
  Tensor forward(const Tensor& x, Tape* tape) const;
  Tensor backward(const Tensor& dy, Tape& tape) const;
  i64 k, stride, pad;
  int id;
};

class GlobalAvgPool {
 public:
  explicit GlobalAvgPool(IdGen& ids) : id(ids()) {}
  Tensor forward(const Tensor& x, Tape* tape) const;
  Tensor backward(const Tensor& dy, Tape& tape) const;
  int id;
};

class Linear {
 public:
  Linear(IdGen& ids, i64 in_dim, i64 out_dim, bool with_bias);
  Tensor forward(const Tensor& x, Tape* tape) const;
  Tensor backward(const Tensor& dy, Tape& tape);
  void collect(const std::string& prefix, std::vector<Param>& out);

  Tensor weight, grad_weight;  // [out, in]
  std::optional<Tensor> bias, grad_bias;
  i64 in_dim, out_dim;
  int id;
};

}  // namespace sim::nn
