// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/eval/features.hpp"

#include <cstring>

#include "sim/core/error.hpp"
#include "sim/data/image.hpp"

namespace sim::eval {

Tensor extract_features(nn::SimSiamModel& model, const data::Manifest& manifest,
                        const std::vector<i64>& indices, i64 image_size, i64 batch_size) {
  if (indices.empty()) throw DataError("extract_features: empty index list");
  if (batch_size < 1) throw ConfigError("extract_features: batch_size must be positive");
  const i64 N = static_cast<i64>(indices.size());
  const i64 D = model.feature_dim();
  Tensor feats({N, D});

  const std::array<float, 3>* mean = manifest.has_stats ? &manifest.mean : nullptr;
  const std::array<float, 3>* stddev = manifest.has_stats ? &manifest.stddev : nullptr;

  for (i64 start = 0; start < N; start += batch_size) {
    const i64 B = std::min(batch_size, N - start);
    Tensor batch({B, 3, image_size, image_size});
    const i64 stride = 3 * image_size * image_size;
    for (i64 b = 0; b < B; ++b) {
      const auto& entry =
          manifest.entries[static_cast<std::size_t>(indices[static_cast<std::size_t>(start + b)])];
      const Tensor img = data::load_image(entry.path, image_size, mean, stddev);
      std::memcpy(batch.data() + b * stride, img.data(),
                  static_cast<std::size_t>(stride) * sizeof(float));
    }
    const Tensor out = model.features(batch, nn::Mode::kEval, nullptr);
    std::memcpy(feats.data() + start * D, out.data(),
                static_cast<std::size_t>(B * D) * sizeof(float));
  }
  return feats;
}

std::vector<int> labels_of(const data::Manifest& manifest, const std::vector<i64>& indices) {
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (i64 idx : indices)
    labels.push_back(manifest.label_index(manifest.entries[static_cast<std::size_t>(idx)].label));
  return labels;
}

}  // namespace sim::eval
