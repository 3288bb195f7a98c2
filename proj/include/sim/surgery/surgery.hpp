// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sim/nn/model.hpp"
#include "sim/surgery/checkpoint.hpp"

namespace sim::surgery {

// GN+WS -> BN weight surgery. Copies every convolution kernel (bit-exact by
// default, or standardized when bake_ws) into a BatchNorm-layout checkpoint
// whose normalization sites are at default initialization: gamma=1, beta=0,
// running_mean=0, running_var=1. Source normalization parameters and
// classifier-head tensors (head.*) are dropped. Converting a checkpoint that
// already records surgery is rejected rather than re-applied.
Checkpoint convert_gn_to_bn(const Checkpoint& src, const nn::BackboneConfig& cfg,
                            bool bake_ws);

struct SurgeryReport {
  bool pass = true;
  std::vector<std::string> failures;
  i64 conv_tensors = 0;
  i64 norm_sites = 0;
  std::string summary() const;
};

// Checks dst against src under the convert contract: conv tensors equal
// (bit-exact, or within 1e-6 of the standardized kernel when bake_ws), every
// BN site at defaults, no GroupNorm leftovers (meta must record the BatchNorm
// kind and every site must carry running stats), no unexpected extras.
SurgeryReport verify_surgery(const Checkpoint& src, const Checkpoint& dst,
                             const nn::BackboneConfig& cfg, bool bake_ws);

// ---- model <-> checkpoint bridge ---------------------------------------------

// Snapshot of every model parameter and buffer under canonical names.
Checkpoint model_to_checkpoint(nn::SimSiamModel& model,
                               std::map<std::string, std::string> meta);

struct LoadStats {
  i64 loaded = 0;
  std::vector<std::string> skipped;  // head tensors absent from the checkpoint
};

// Copies checkpoint tensors into a built model. Backbone parameters must
// match exactly (missing or unexpected names abort, shapes checked); head
// parameters are loaded when present and left freshly initialized otherwise.
// Checkpoint head tensors with no model counterpart are an error unless
// `allow_unused_heads`.
LoadStats load_into_model(const Checkpoint& ckpt, nn::SimSiamModel& model,
                          bool allow_unused_heads = true);

}  // namespace sim::surgery
