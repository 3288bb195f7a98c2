// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/nn/layers.hpp"

#include <cmath>

#include "sim/core/error.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::nn {

namespace {
// Channel count and spatial size for [B,C] or [B,C,H,W] inputs.
void norm_dims(const std::vector<i64>& shape, i64 expect_c, i64* B, i64* C, i64* HW) {
  if (shape.size() == 2) {
    *B = shape[0];
    *C = shape[1];
    *HW = 1;
  } else if (shape.size() == 4) {
    *B = shape[0];
    *C = shape[1];
    *HW = shape[2] * shape[3];
  } else {
    throw ShapeError("norm layer expects 2-d or 4-d input, got " + shape_str(shape));
  }
  if (*C != expect_c)
    throw ShapeError("norm layer configured for " + std::to_string(expect_c) +
                     " channels, got input " + shape_str(shape));
}
}  // namespace

// ---- Conv2d -----------------------------------------------------------------

Conv2d::Conv2d(IdGen& ids, i64 cin_, i64 cout_, i64 k, i64 stride_, i64 pad_,
               bool weight_standardized, float ws_eps_)
    : weight({cout_, cin_, k, k}),
      grad_weight({cout_, cin_, k, k}),
      cin(cin_),
      cout(cout_),
      ksize(k),
      stride(stride_),
      pad(pad_),
      ws(weight_standardized),
      ws_eps(ws_eps_),
      id(ids()) {}

Tensor Conv2d::effective_weight() const {
  if (!ws) return weight;
  Tensor w_hat(weight.shape());
  kern::weight_standardize_forward(weight.data(), cout, cin * ksize * ksize, ws_eps,
                                   w_hat.data(), nullptr);
  return w_hat;
}

Tensor Conv2d::forward(const Tensor& x, Mode /*mode*/, Tape* tape) const {
  Tensor y;
  if (!ws) {
    kern::conv2d_forward(x, weight, stride, pad, y);
    if (tape) {
      auto& ctx = tape->at(id);
      ctx.saved = {x};
    }
    return y;
  }
  const i64 fanin = cin * ksize * ksize;
  Tensor w_hat(weight.shape());
  Tensor invstd({cout});
  kern::weight_standardize_forward(weight.data(), cout, fanin, ws_eps, w_hat.data(),
                                   invstd.data());
  kern::conv2d_forward(x, w_hat, stride, pad, y);
  if (tape) {
    auto& ctx = tape->at(id);
    ctx.saved = {x, std::move(w_hat), std::move(invstd)};
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& dy, Tape& tape) {
  const auto& ctx = tape.at(id);
  const Tensor& x = ctx.saved[0];
  Tensor dx;
  if (!ws) {
    kern::conv2d_backward(x, weight, stride, pad, dy, &dx, &grad_weight);
    return dx;
  }
  const Tensor& w_hat = ctx.saved[1];
  const Tensor& invstd = ctx.saved[2];
  Tensor d_what(weight.shape());
  {
    // need d(loss)/d(w_hat) separately so it can be pulled back through WS
    Tensor d_what_zero(weight.shape());
    kern::conv2d_backward(x, w_hat, stride, pad, dy, &dx, &d_what_zero);
    d_what = std::move(d_what_zero);
  }
  Tensor dw(weight.shape());
  kern::weight_standardize_backward(w_hat.data(), invstd.data(), d_what.data(), cout,
                                    cin * ksize * ksize, dw.data());
  kern::add_inplace(grad_weight.data(), dw.data(), dw.numel());
  return dx;
}

void Conv2d::collect(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".weight", &weight, &grad_weight, true});
}

// ---- NormLayer ----------------------------------------------------------------

NormLayer::NormLayer(IdGen& ids, NormKind kind_, i64 channels_, i64 groups_, float eps_,
                     float momentum_, bool affine_)
    : kind(kind_),
      channels(channels_),
      groups(groups_),
      eps(eps_),
      momentum(momentum_),
      affine(affine_),
      gamma(Tensor::full({channels_}, 1.0f)),
      beta({channels_}),
      grad_gamma({channels_}),
      grad_beta({channels_}),
      id(ids()) {
  if (kind == NormKind::kBatchNorm) {
    running_mean = Tensor({channels_});
    running_var = Tensor::full({channels_}, 1.0f);
  } else {
    if (groups < 1 || channels % groups != 0)
      throw ConfigError("group count " + std::to_string(groups) +
                        " does not divide channel count " + std::to_string(channels));
  }
}

Tensor NormLayer::forward(const Tensor& x, Mode mode, Tape* tape) {
  i64 B, C, HW;
  norm_dims(x.shape(), channels, &B, &C, &HW);
  Tensor y(x.shape());
  if (kind == NormKind::kBatchNorm) {
    if (mode == Mode::kTrain) {
      Tensor mean({C}), invstd({C});
      kern::batch_norm_forward_train(x.data(), B, C, HW, gamma.data(), beta.data(), eps,
                                     momentum, running_mean.data(), running_var.data(),
                                     y.data(), mean.data(), invstd.data());
      if (tape) {
        auto& ctx = tape->at(id);
        ctx.saved = {x, std::move(mean), std::move(invstd)};
        ctx.isaved = {1};  // train mode
      }
    } else {
      kern::batch_norm_forward_eval(x.data(), B, C, HW, gamma.data(), beta.data(), eps,
                                    running_mean.data(), running_var.data(), y.data());
      if (tape) {
        auto& ctx = tape->at(id);
        Tensor mean = running_mean;
        Tensor invstd({C});
        for (i64 c = 0; c < C; ++c)
          invstd[c] = 1.0f / std::sqrt(running_var[c] + eps);
        ctx.saved = {x, std::move(mean), std::move(invstd)};
        ctx.isaved = {0};
      }
    }
  } else {
    Tensor mean({B * groups}), invstd({B * groups});
    kern::group_norm_forward(x.data(), B, C, HW, groups, gamma.data(), beta.data(), eps,
                             y.data(), mean.data(), invstd.data());
    if (tape) {
      auto& ctx = tape->at(id);
      ctx.saved = {x, std::move(mean), std::move(invstd)};
    }
  }
  return y;
}

Tensor NormLayer::backward(const Tensor& dy, Tape& tape) {
  const auto& ctx = tape.at(id);
  const Tensor& x = ctx.saved[0];
  const Tensor& mean = ctx.saved[1];
  const Tensor& invstd = ctx.saved[2];
  i64 B, C, HW;
  norm_dims(x.shape(), channels, &B, &C, &HW);
  Tensor dx(x.shape());
  if (kind == NormKind::kBatchNorm) {
    if (!ctx.isaved.empty() && ctx.isaved[0] == 0) {
      // eval mode: the normalization is an affine map with fixed statistics
      Tensor dg({C}), db({C});
      for (i64 b = 0; b < B; ++b)
        for (i64 c = 0; c < C; ++c) {
          const float g = gamma[c] * invstd[c];
          for (i64 p = 0; p < HW; ++p) {
            const i64 i = (b * C + c) * HW + p;
            dx[i] = dy[i] * g;
            dg[c] += dy[i] * (x[i] - mean[c]) * invstd[c];
            db[c] += dy[i];
          }
        }
      if (affine) {
        kern::add_inplace(grad_gamma.data(), dg.data(), C);
        kern::add_inplace(grad_beta.data(), db.data(), C);
      }
      return dx;
    }
    kern::batch_norm_backward(x.data(), dy.data(), B, C, HW, gamma.data(), mean.data(),
                              invstd.data(), dx.data(), grad_gamma.data(),
                              grad_beta.data());
  } else {
    kern::group_norm_backward(x.data(), dy.data(), B, C, HW, groups, gamma.data(),
                              mean.data(), invstd.data(), dx.data(), grad_gamma.data(),
                              grad_beta.data());
  }
  if (!affine) {
    // gradients for a fixed (1, 0) affine are discarded
    grad_gamma.zero();
    grad_beta.zero();
  }
  return dx;
}

void NormLayer::collect(const std::string& prefix, std::vector<Param>& out) {
  if (affine) {
    out.push_back({prefix + ".gamma", &gamma, &grad_gamma, true});
    out.push_back({prefix + ".beta", &beta, &grad_beta, true});
  }
  if (kind == NormKind::kBatchNorm) {
    out.push_back({prefix + ".running_mean", &running_mean, nullptr, false});
    out.push_back({prefix + ".running_var", &running_var, nullptr, false});
  }
}

// ---- Relu ----------------------------------------------------------------

Tensor Relu::forward(const Tensor& x, Tape* tape) const {
  Tensor y(x.shape());
  kern::relu_forward(x.data(), y.data(), x.numel());
  if (tape) tape->at(id).saved = {x};
  return y;
}

Tensor Relu::backward(const Tensor& dy, Tape& tape) const {
  const Tensor& x = tape.at(id).saved[0];
  Tensor dx(x.shape());
  kern::relu_backward(x.data(), dy.data(), dx.data(), x.numel());
  return dx;
}

// ---- MaxPool ---------------------------------------------------------------

Tensor MaxPool::forward(const Tensor& x, Tape* tape) const {
  const i64 B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const i64 ho = kern::pool_out_dim(H, k, stride, pad);
  const i64 wo = kern::pool_out_dim(W, k, stride, pad);
  Tensor y({B, C, ho, wo});
  std::vector<std::int32_t> argmax(static_cast<size_t>(B * C * ho * wo));
  kern::maxpool_forward(x.data(), B, C, H, W, k, stride, pad, y.data(), argmax.data(),
                        ho, wo);
  if (tape) {
    auto& ctx = tape->at(id);
    ctx.isaved = std::move(argmax);
    ctx.in_shape = x.shape();
  }
  return y;
}

Tensor MaxPool::backward(const Tensor& dy, Tape& tape) const {
  const auto& ctx = tape.at(id);
  const auto& s = ctx.in_shape;
  Tensor dx({s[0], s[1], s[2], s[3]});
  kern::maxpool_backward(dy.data(), ctx.isaved.data(), s[0], s[1], s[2], s[3],
                         dy.dim(2), dy.dim(3), dx.data());
  return dx;
}

// ---- GlobalAvgPool -----------------------------------------------------------

Tensor GlobalAvgPool::forward(const Tensor& x, Tape* tape) const {
  const i64 B = x.dim(0), C = x.dim(1), HW = x.dim(2) * x.dim(3);
  Tensor y({B, C});
  kern::global_avg_pool_forward(x.data(), B, C, HW, y.data());
  if (tape) tape->at(id).in_shape = x.shape();
  return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy, Tape& tape) const {
  const auto& s = tape.at(id).in_shape;
  Tensor dx({s[0], s[1], s[2], s[3]});
  kern::global_avg_pool_backward(dy.data(), s[0], s[1], s[2] * s[3], dx.data());
  return dx;
}

// ---- Linear ------------------------------------------------------------------

Linear::Linear(IdGen& ids, i64 in_dim_, i64 out_dim_, bool with_bias)
    : weight({out_dim_, in_dim_}),
      grad_weight({out_dim_, in_dim_}),
      in_dim(in_dim_),
      out_dim(out_dim_),
      id(ids()) {
  if (with_bias) {
    bias = Tensor({out_dim_});
    grad_bias = Tensor({out_dim_});
  }
}

Tensor Linear::forward(const Tensor& x, Tape* tape) const {
  if (x.ndim() != 2 || x.dim(1) != in_dim)
    throw ShapeError("linear expects [B," + std::to_string(in_dim) + "], got " +
                     shape_str(x.shape()));
  const i64 B = x.dim(0);
  Tensor y({B, out_dim});
  kern::sgemm_nt(B, out_dim, in_dim, 1.0f, x.data(), in_dim, weight.data(), in_dim,
                 0.0f, y.data(), out_dim);
  if (bias) {
    const Tensor& b = *bias;
#pragma omp parallel for schedule(static)
    for (i64 r = 0; r < B; ++r)
      for (i64 c = 0; c < out_dim; ++c) y.at(r, c) += b[c];
  }
  if (tape) tape->at(id).saved = {x};
  return y;
}

Tensor Linear::backward(const Tensor& dy, Tape& tape) {
  const Tensor& x = tape.at(id).saved[0];
  const i64 B = x.dim(0);
  Tensor dx({B, in_dim});
  kern::sgemm_nn(B, in_dim, out_dim, 1.0f, dy.data(), out_dim, weight.data(), in_dim,
                 0.0f, dx.data(), in_dim);
  kern::sgemm_tn(out_dim, in_dim, B, 1.0f, dy.data(), out_dim, x.data(), in_dim, 1.0f,
                 grad_weight.data(), in_dim);
  if (grad_bias) {
    Tensor& gb = *grad_bias;
    for (i64 r = 0; r < B; ++r)
      for (i64 c = 0; c < out_dim; ++c) gb[c] += dy.at(r, c);
  }
  return dx;
}

void Linear::collect(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".weight", &weight, &grad_weight, true});
  if (bias) out.push_back({prefix + ".bias", &*bias, &*grad_bias, true});
}

}  // namespace sim::nn
