// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/nn/model.hpp"

#include <cmath>

#include "sim/core/error.hpp"
#include "sim/core/rng.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::nn {

std::array<int, 4> BackboneConfig::units() const {
  switch (depth) {
    case 26:  return {2, 2, 2, 2};
    case 50:  return {3, 4, 6, 3};
    case 101: return {3, 4, 23, 3};
    case 152: return {3, 8, 36, 3};
    default:
      throw ConfigError("unknown depth preset " + std::to_string(depth) +
                        " (known: 26, 50, 101, 152)");
  }
}

i64 BackboneConfig::scale(i64 base) const {
  const i64 c = static_cast<i64>(std::llround(static_cast<double>(base) * width_mult));
  if (c < 1)
    throw ConfigError("width_mult " + std::to_string(width_mult) +
                      " collapses a " + std::to_string(base) + "-channel tensor");
  return c;
}

void BackboneConfig::validate() const {
  units();  // throws on unknown preset
  if (width_mult <= 0) throw ConfigError("width_mult must be positive");
  if (norm_eps <= 0) throw ConfigError("norm_eps must be positive");
  if (ws_eps <= 0) throw ConfigError("ws_eps must be positive");
  if (feature_dim() != 4 * scale(512))
    throw ConfigError("width_mult yields inconsistent channel rounding");
  if (norm == NormKind::kGroupNormWS) {
    if (groups < 1) throw ConfigError("groups must be >= 1");
    auto check = [&](i64 ch) {
      if (ch % groups != 0)
        throw ConfigError("channel count " + std::to_string(ch) +
                          " not divisible by groups=" + std::to_string(groups));
    };
    i64 cin = stem_width();
    for (int s = 0; s < 4; ++s) {
      const i64 mid = scale(64ll << s);
      const i64 out = 4 * mid;
      for (int u = 0; u < units()[s]; ++u) {
        check(u == 0 ? cin : out);  // norm1
        check(mid);                 // norm2, norm3
        if (u == 0) cin = out;
      }
      cin = out;
    }
    check(feature_dim());  // final norm
  }
}

void HeadConfig::validate() const {
  if (projector_layers < 1) throw ConfigError("projector_layers must be >= 1");
  if (projector_dim < 1 || predictor_hidden < 1)
    throw ConfigError("head dimensions must be positive");
  if (predictor_hidden >= projector_dim)
    throw ConfigError("predictor_hidden must be smaller than projector_dim (bottleneck)");
}

// ---- PreactUnit --------------------------------------------------------------

PreactUnit::PreactUnit(IdGen& ids, const BackboneConfig& cfg, i64 cin, i64 cmid,
                       i64 cout, i64 stride)
    : norm1(ids, cfg.norm, cin, cfg.groups, cfg.norm_eps, cfg.bn_momentum),
      relu1(ids),
      conv1(ids, cin, cmid, 1, 1, 0, cfg.norm == NormKind::kGroupNormWS, cfg.ws_eps),
      norm2(ids, cfg.norm, cmid, cfg.groups, cfg.norm_eps, cfg.bn_momentum),
      relu2(ids),
      conv2(ids, cmid, cmid, 3, stride, 1, cfg.norm == NormKind::kGroupNormWS, cfg.ws_eps),
      norm3(ids, cfg.norm, cmid, cfg.groups, cfg.norm_eps, cfg.bn_momentum),
      relu3(ids),
      conv3(ids, cmid, cout, 1, 1, 0, cfg.norm == NormKind::kGroupNormWS, cfg.ws_eps) {
  if (cin != cout || stride != 1)
    downsample.emplace(ids, cin, cout, 1, stride, 0,
                       cfg.norm == NormKind::kGroupNormWS, cfg.ws_eps);
}

Tensor PreactUnit::forward(const Tensor& x, Mode mode, Tape* tape) {
  Tensor pre = relu1.forward(norm1.forward(x, mode, tape), tape);
  Tensor shortcut = downsample ? downsample->forward(pre, mode, tape) : x;
  Tensor t = conv1.forward(pre, mode, tape);
  t = conv2.forward(relu2.forward(norm2.forward(t, mode, tape), tape), mode, tape);
  t = conv3.forward(relu3.forward(norm3.forward(t, mode, tape), tape), mode, tape);
  kern::add_inplace(t.data(), shortcut.data(), t.numel());
  return t;
}

Tensor PreactUnit::backward(const Tensor& dy, Tape& tape) {
  Tensor dt = conv3.backward(dy, tape);
  dt = norm3.backward(relu3.backward(dt, tape), tape);
  dt = conv2.backward(dt, tape);
  dt = norm2.backward(relu2.backward(dt, tape), tape);
  Tensor dpre = conv1.backward(dt, tape);
  if (downsample) {
    Tensor dproj = downsample->backward(dy, tape);
    kern::add_inplace(dpre.data(), dproj.data(), dpre.numel());
  }
  Tensor dx = norm1.backward(relu1.backward(dpre, tape), tape);
  if (!downsample) kern::add_inplace(dx.data(), dy.data(), dx.numel());
  return dx;
}

void PreactUnit::collect(const std::string& prefix, std::vector<Param>& out) {
  norm1.collect(prefix + ".norm1", out);
  conv1.collect(prefix + ".conv1", out);
  norm2.collect(prefix + ".norm2", out);
  conv2.collect(prefix + ".conv2", out);
  norm3.collect(prefix + ".norm3", out);
  conv3.collect(prefix + ".conv3", out);
  if (downsample) downsample->collect(prefix + ".downsample", out);
}

// ---- ResNetV2 ----------------------------------------------------------------

ResNetV2::ResNetV2(IdGen& ids, const BackboneConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const bool ws = cfg.norm == NormKind::kGroupNormWS;
  if (cfg.stem == StemKind::kStandard) {
    stem_conv_ = std::make_unique<Conv2d>(ids, 3, cfg_.stem_width(), 7, 2, 3, ws, cfg.ws_eps);
    stem_pool_.emplace(ids, 3, 2, 1);
  } else {
    // CIFAR stem: 3x3 stride 1 and no max-pool
    stem_conv_ = std::make_unique<Conv2d>(ids, 3, cfg_.stem_width(), 3, 1, 1, ws, cfg.ws_eps);
  }
  i64 cin = cfg_.stem_width();
  const auto units = cfg_.units();
  for (int s = 0; s < 4; ++s) {
    const i64 mid = cfg_.scale(64ll << s);
    const i64 out = 4 * mid;
    std::vector<PreactUnit> stage;
    for (int u = 0; u < units[s]; ++u) {
      const i64 stride = (u == 0 && s > 0) ? 2 : 1;
      stage.emplace_back(ids, cfg_, u == 0 ? cin : out, mid, out, stride);
    }
    blocks_.push_back(std::move(stage));
    cin = out;
  }
  final_norm_ = std::make_unique<NormLayer>(ids, cfg.norm, cfg_.feature_dim(), cfg.groups,
                                            cfg.norm_eps, cfg.bn_momentum);
  final_relu_ = std::make_unique<Relu>(ids);
  gap_ = std::make_unique<GlobalAvgPool>(ids);
}

Tensor ResNetV2::forward(const Tensor& x, Mode mode, Tape* tape) {
  if (x.ndim() != 4 || x.dim(1) != 3)
    throw ShapeError("backbone expects [B,3,H,W], got " + shape_str(x.shape()));
  Tensor t = stem_conv_->forward(x, mode, tape);
  if (stem_pool_) t = stem_pool_->forward(t, tape);
  for (auto& stage : blocks_)
    for (auto& unit : stage) t = unit.forward(t, mode, tape);
  t = final_relu_->forward(final_norm_->forward(t, mode, tape), tape);
  return gap_->forward(t, tape);
}

Tensor ResNetV2::backward(const Tensor& dfeat, Tape& tape) {
  Tensor dt = gap_->backward(dfeat, tape);
  dt = final_norm_->backward(final_relu_->backward(dt, tape), tape);
  for (auto stage = blocks_.rbegin(); stage != blocks_.rend(); ++stage)
    for (auto unit = stage->rbegin(); unit != stage->rend(); ++unit)
      dt = unit->backward(dt, tape);
  if (stem_pool_) dt = stem_pool_->backward(dt, tape);
  return stem_conv_->backward(dt, tape);
}

void ResNetV2::collect(std::vector<Param>& out) {
  stem_conv_->collect("stem.conv", out);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (std::size_t u = 0; u < blocks_[b].size(); ++u)
      blocks_[b][u].collect("block" + std::to_string(b + 1) + ".unit" + std::to_string(u + 1),
                            out);
  final_norm_->collect("final.norm", out);
}

std::vector<std::string> ResNetV2::layer_trace() const {
  std::vector<std::string> trace;
  trace.push_back("conv" + std::to_string(stem_conv_->ksize) + "x" +
                  std::to_string(stem_conv_->ksize) + "s" + std::to_string(stem_conv_->stride));
  if (stem_pool_) trace.push_back("maxpool");
  for (const auto& stage : blocks_)
    for (const auto& unit : stage) {
      trace.push_back("norm-relu-conv1x1");
      trace.push_back("norm-relu-conv3x3");
      trace.push_back("norm-relu-conv1x1");
      if (unit.downsample) trace.push_back("downsample1x1");
      trace.push_back("residual-add");
    }
  trace.push_back("norm-relu");
  trace.push_back("global-avg-pool");
  return trace;
}

// ---- MlpHead -------------------------------------------------------------------

MlpHead::MlpHead(IdGen& ids, const std::vector<Spec>& spec, float bn_eps, float bn_momentum) {
  for (const auto& s : spec) {
    Entry e{Linear(ids, s.in, s.out, s.bias), std::nullopt, std::nullopt};
    if (s.with_norm)
      e.norm.emplace(ids, NormKind::kBatchNorm, s.out, 1, bn_eps, bn_momentum, s.norm_affine);
    if (s.relu) e.relu.emplace(ids);
    entries.push_back(std::move(e));
  }
}

Tensor MlpHead::forward(const Tensor& x, Mode mode, Tape* tape) {
  Tensor t = x;
  for (auto& e : entries) {
    t = e.lin.forward(t, tape);
    if (e.norm) t = e.norm->forward(t, mode, tape);
    if (e.relu) t = e.relu->forward(t, tape);
  }
  return t;
}

Tensor MlpHead::backward(const Tensor& dy, Tape& tape) {
  Tensor dt = dy;
  for (auto e = entries.rbegin(); e != entries.rend(); ++e) {
    if (e->relu) dt = e->relu->backward(dt, tape);
    if (e->norm) dt = e->norm->backward(dt, tape);
    dt = e->lin.backward(dt, tape);
  }
  return dt;
}

void MlpHead::collect(const std::string& prefix, std::vector<Param>& out) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string layer = prefix + ".layer" + std::to_string(i + 1);
    entries[i].lin.collect(layer + ".linear", out);
    if (entries[i].norm) entries[i].norm->collect(layer + ".norm", out);
  }
}

// ---- SimSiamModel ---------------------------------------------------------------

SimSiamModel::SimSiamModel(const BackboneConfig& backbone_cfg,
                           std::optional<HeadConfig> head_cfg)
    : head_cfg_(std::move(head_cfg)) {
  backbone_ = std::make_unique<ResNetV2>(ids_, backbone_cfg);
  if (head_cfg_) {
    head_cfg_->validate();
    const i64 d = backbone_cfg.feature_dim();
    const i64 pd = head_cfg_->projector_dim;
    std::vector<MlpHead::Spec> proj;
    for (int l = 0; l < head_cfg_->projector_layers; ++l) {
      const bool last = l + 1 == head_cfg_->projector_layers;
      // every projector layer is normalized; no nonlinearity and no affine
      // after the last one
      proj.push_back({l == 0 ? d : pd, pd, /*bias=*/false, /*with_norm=*/true,
                      /*norm_affine=*/!last, /*relu=*/!last});
    }
    projector_ = std::make_unique<MlpHead>(ids_, proj, head_cfg_->bn_eps,
                                           head_cfg_->bn_momentum);
    std::vector<MlpHead::Spec> pred = {
        {pd, head_cfg_->predictor_hidden, false, true, true, true},
        {head_cfg_->predictor_hidden, pd, true, false, false, false},
    };
    predictor_ = std::make_unique<MlpHead>(ids_, pred, head_cfg_->bn_eps,
                                           head_cfg_->bn_momentum);
  }
}

Tensor SimSiamModel::features(const Tensor& images, Mode mode, Tape* tape) {
  return backbone_->forward(images, mode, tape);
}

Tensor SimSiamModel::project(const Tensor& feats, Mode mode, Tape* tape) {
  if (!projector_) throw ConfigError("model was built without SimSiam heads");
  return projector_->forward(feats, mode, tape);
}

Tensor SimSiamModel::predict(const Tensor& z, Mode mode, Tape* tape) {
  if (!predictor_) throw ConfigError("model was built without SimSiam heads");
  return predictor_->forward(z, mode, tape);
}

std::pair<Tensor, Tensor> SimSiamModel::view_forward(const Tensor& images, Mode mode,
                                                     Tape* tape) {
  Tensor z = project(features(images, mode, tape), mode, tape);
  Tensor p = predict(z, mode, tape);
  return {std::move(z), std::move(p)};
}

void SimSiamModel::view_backward(const Tensor& dp, Tape& tape) {
  if (!predictor_) throw ConfigError("model was built without SimSiam heads");
  Tensor dz = predictor_->backward(dp, tape);
  Tensor dfeat = projector_->backward(dz, tape);
  backbone_->backward(dfeat, tape);
}

std::vector<Param> SimSiamModel::params() {
  std::vector<Param> out;
  backbone_->collect(out);
  if (projector_) projector_->collect("projector", out);
  if (predictor_) predictor_->collect("predictor", out);
  return out;
}

void SimSiamModel::zero_grads() {
  for (auto& p : params())
    if (p.grad) p.grad->zero();
}

void SimSiamModel::init_params(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1417));
  for (auto& p : params()) {
    if (!p.trainable) continue;  // running stats stay at (0, 1)
    Tensor& t = *p.value;
    const auto& s = t.shape();
    if (s.size() == 4) {
      // conv kernels: He init over fan-out
      const double std = std::sqrt(2.0 / static_cast<double>(s[0] * s[2] * s[3]));
      for (i64 i = 0; i < t.numel(); ++i) t[i] = static_cast<float>(rng.normal(0.0, std));
    } else if (s.size() == 2) {
      const double std = std::sqrt(1.0 / static_cast<double>(s[1]));
      for (i64 i = 0; i < t.numel(); ++i) t[i] = static_cast<float>(rng.normal(0.0, std));
    } else if (p.name.ends_with(".bias")) {
      t.zero();
    } else if (p.name.ends_with(".gamma")) {
      t.fill(1.0f);
    } else if (p.name.ends_with(".beta")) {
      t.zero();
    }
  }
}

std::vector<Param> filter_params(const std::vector<Param>& params, const std::string& prefix) {
  std::vector<Param> out;
  for (const auto& p : params)
    if (p.name.rfind(prefix, 0) == 0) out.push_back(p);
  return out;
}

bool is_backbone_param(const std::string& name) {
  return name.rfind("projector.", 0) != 0 && name.rfind("predictor.", 0) != 0;
}

}  // namespace sim::nn
