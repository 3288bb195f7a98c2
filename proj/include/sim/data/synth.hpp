// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sim/data/manifest.hpp"

namespace sim::data {

// Synthetic class-conditional dataset for desk-scale tests: each class gets a
// distinct color plus a distinct stripe/checker/ring texture, with per-image
// phase and noise, so both color and texture carry the label.
struct SynthSpec {
  std::string out_dir;
  i64 n = 70;
  int classes = 7;
  i64 image_size = 32;
  std::uint64_t seed = 0;
  // Optional class proportions. Shorter vectors leave the remaining
  // probability mass split uniformly over the unspecified classes, so a
  // HAM-like profile is just {0.67, 0.11}.
  std::vector<double> imbalance;
};

std::vector<i64> synth_class_counts(const SynthSpec& spec);

// Writes PNGs plus manifest.csv under out_dir; byte-identical per seed.
Manifest synth_dataset(const SynthSpec& spec);

// One synthetic image without touching disk (used by augmentation tests).
Tensor synth_image(int cls, i64 image_size, std::uint64_t image_seed);

}  // namespace sim::data
