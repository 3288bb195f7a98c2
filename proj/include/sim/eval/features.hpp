// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sim/data/manifest.hpp"
#include "sim/nn/model.hpp"

namespace sim::eval {

// Eval-mode backbone features for the given manifest entries: decode, resize
// to image_size, normalize with the manifest statistics, batch through the
// model. Returns [indices.size(), feature_dim].
Tensor extract_features(nn::SimSiamModel& model, const data::Manifest& manifest,
                        const std::vector<i64>& indices, i64 image_size, i64 batch_size);

std::vector<int> labels_of(const data::Manifest& manifest, const std::vector<i64>& indices);

}  // namespace sim::eval
