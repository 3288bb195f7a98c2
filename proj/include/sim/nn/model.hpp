// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
//
// ResNet-V2 backbone (pre-activation bottleneck units, BatchNorm or
// GroupNorm+WeightStandardization) plus the SimSiam projector/predictor heads.
//
// Canonical parameter names, the contract shared with checkpoint surgery:
//   stem.conv.weight
//   block{b}.unit{u}.norm{k}.gamma|beta[|running_mean|running_var]   k in 1..3
//   block{b}.unit{u}.conv{k}.weight                                  k in 1..3
//   block{b}.unit{u}.downsample.weight            (projection shortcut only)
//   final.norm.gamma|beta[|running_mean|running_var]
//   projector.layer{i}.linear.weight / projector.layer{i}.norm.*
//   predictor.layer{i}.linear.weight[|bias] / predictor.layer{i}.norm.*
// Indices are 1-based without zero padding.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sim/nn/layers.hpp"

namespace sim::nn {

enum class StemKind { kStandard, kCifar };

struct BackboneConfig {
  int depth = 50;
  double width_mult = 1.0;
  StemKind stem = StemKind::kStandard;
  NormKind norm = NormKind::kBatchNorm;
  i64 groups = 32;
  float ws_eps = 1e-10f;
  float norm_eps = 1e-5f;
  float bn_momentum = 0.1f;

  std::array<int, 4> units() const;  // bottleneck units per stage
  i64 scale(i64 base_channels) const;
  i64 stem_width() const { return scale(64); }
  i64 feature_dim() const { return scale(2048); }
  void validate() const;
};

struct HeadConfig {
  int projector_layers = 3;
  i64 projector_dim = 2048;
  i64 predictor_hidden = 512;
  float bn_eps = 1e-5f;
  float bn_momentum = 0.1f;
  void validate() const;
};

// Pre-activation bottleneck: norm-relu before each conv, shortcut taken from
// the pre-activated input when a projection is needed.
struct PreactUnit {
  PreactUnit(IdGen& ids, const BackboneConfig& cfg, i64 cin, i64 cmid, i64 cout,
             i64 stride);
  Tensor forward(const Tensor& x, Mode mode, Tape* tape);
  Tensor backward(const Tensor& dy, Tape& tape);
  void collect(const std::string& prefix, std::vector<Param>& out);

  NormLayer norm1;
  Relu relu1;
  Conv2d conv1;
  NormLayer norm2;
  Relu relu2;
  Conv2d conv2;
  NormLayer norm3;
  Relu relu3;
  Conv2d conv3;
  std::optional<Conv2d> downsample;
};

class ResNetV2 {
 public:
  ResNetV2(IdGen& ids, const BackboneConfig& cfg);
  Tensor forward(const Tensor& x, Mode mode, Tape* tape);
  Tensor backward(const Tensor& dfeat, Tape& tape);
  void collect(std::vector<Param>& out);
  const BackboneConfig& config() const { return cfg_; }
  bool has_stem_pool() const { return stem_pool_.has_value(); }
  std::vector<std::string> layer_trace() const;

 private:
  BackboneConfig cfg_;
  std::unique_ptr<Conv2d> stem_conv_;
  std::optional<MaxPool> stem_pool_;
  std::vector<std::vector<PreactUnit>> blocks_;
  std::unique_ptr<NormLayer> final_norm_;
  std::unique_ptr<Relu> final_relu_;
  std::unique_ptr<GlobalAvgPool> gap_;
};

// Linear -> [BatchNorm] -> [ReLU] stack used for both SimSiam heads.
class MlpHead {
 public:
  struct Spec {
    i64 in, out;
    bool bias;
    bool with_norm;
    bool norm_affine;
    bool relu;
  };
  MlpHead(IdGen& ids, const std::vector<Spec>& spec, float bn_eps, float bn_momentum);
  Tensor forward(const Tensor& x, Mode mode, Tape* tape);
  Tensor backward(const Tensor& dy, Tape& tape);
  void collect(const std::string& prefix, std::vector<Param>& out);

  struct Entry {
    Linear lin;
    std::optional<NormLayer> norm;
    std::optional<Relu> relu;
  };
  std::vector<Entry> entries;
};

// Backbone plus optional SimSiam heads. The heads always use BatchNorm
// regardless of the backbone norm kind; they are freshly initialized in every
// experiment and never loaded from pretrained checkpoints.
class SimSiamModel {
 public:
  SimSiamModel(const BackboneConfig& backbone_cfg, std::optional<HeadConfig> head_cfg);

  Tape make_tape() const { return Tape(static_cast<std::size_t>(ids_.next)); }

  Tensor features(const Tensor& images, Mode mode, Tape* tape = nullptr);
  Tensor project(const Tensor& feats, Mode mode, Tape* tape);    // z
  Tensor predict(const Tensor& z, Mode mode, Tape* tape);        // p
  // Full SimSiam view pass: images -> (z, p) sharing one tape.
  std::pair<Tensor, Tensor> view_forward(const Tensor& images, Mode mode, Tape* tape);
  // Pull the loss gradient wrt p back through predictor, projector, backbone.
  // The projection z receives gradient only through the predictor (the loss's
  // direct use of z is behind stop-gradient).
  void view_backward(const Tensor& dp, Tape& tape);

  std::vector<Param> params();
  void zero_grads();
  void init_params(std::uint64_t seed);
  bool has_head() const { return projector_ != nullptr; }

  ResNetV2& backbone() { return *backbone_; }
  i64 feature_dim() const { return backbone_->config().feature_dim(); }
  const std::optional<HeadConfig>& head_config() const { return head_cfg_; }

 private:
  IdGen ids_;
  std::optional<HeadConfig> head_cfg_;
  std::unique_ptr<ResNetV2> backbone_;
  std::unique_ptr<MlpHead> projector_;
  std::unique_ptr<MlpHead> predictor_;
};

// Prefix-filtered views of a parameter list.
std::vector<Param> filter_params(const std::vector<Param>& params, const std::string& prefix);
bool is_backbone_param(const std::string& name);

}  // namespace sim::nn
