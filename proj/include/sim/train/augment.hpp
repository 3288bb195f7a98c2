// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "sim/core/rng.hpp"
#include "sim/core/tensor.hpp"

namespace sim::train {

// natural-224: full SimSiam recipe at 224x224. cifar-32: same minus blur at
// 32x32. identity: plain resize, both views equal (test hook).
enum class AugPolicy { kNatural224, kCifar32, kIdentity };

AugPolicy aug_policy_from_string(const std::string& s);
std::string aug_policy_name(AugPolicy p);

struct AugmentConfig {
  AugPolicy policy = AugPolicy::kNatural224;
  i64 out_size = 224;
  double crop_scale_min = 0.2;
  double crop_scale_max = 1.0;
  double hflip_p = 0.5;
  double jitter_p = 0.8;
  double jitter_brightness = 0.4;
  double jitter_contrast = 0.4;
  double jitter_saturation = 0.4;
  double jitter_hue = 0.1;
  double grayscale_p = 0.2;
  double blur_p = 0.5;  // zeroed by the cifar-32 preset

  static AugmentConfig preset(AugPolicy policy);
  void validate() const;
};

struct ViewPair {
  Tensor view1, view2;  // [3, out_size, out_size], raw [0,1] range
  i64 source_id = -1;
  std::uint64_t seed = 0;
};

// One augmented view drawn from `rng`; input is a raw [3,H,W] image in [0,1].
Tensor augment_view(const Tensor& img, const AugmentConfig& cfg, Rng& rng);

// Two independently augmented views; bit-identical for a fixed seed.
ViewPair augment_pair(const Tensor& img, const AugmentConfig& cfg, std::uint64_t seed,
                      i64 source_id = -1);

}  // namespace sim::train
