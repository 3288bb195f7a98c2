// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "sim/core/tensor.hpp"

namespace sim::data {

inline const std::vector<std::string> kSplitTags = {"pretrain", "finetune", "val", "test"};

struct ManifestEntry {
  std::string path;
  std::string label;
  std::string split;  // one of kSplitTags, or "unassigned" before splitting
};

// Dataset manifest: entries, class vocabulary, and frozen normalization
// statistics. Serialized as CSV with '#'-prefixed metadata lines:
//   # simsurgeon-manifest v1
//   # classes: a,b,c
//   # mean: r,g,b        (present once stats are computed)
//   # std: r,g,b
//   path,label,split
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
  bool has_stats = false;
  std::array<float, 3> mean{0, 0, 0};
  std::array<float, 3> stddev{1, 1, 1};

  int label_index(const std::string& label) const;  // throws on unknown label
  std::map<std::string, i64> split_counts() const;
  std::map<std::string, i64> class_counts(const std::string& split = "") const;
  std::vector<i64> indices_of(const std::string& split) const;
  void validate(bool require_split_tags) const;

  void save(const std::string& path) const;
  static Manifest load(const std::string& path);
};

struct SplitSpec {
  double pretrain = 0.60;
  double finetune = 0.10;
  double val = 0.10;
  double test = 0.20;
  std::uint64_t seed = 0;
  bool stratified = false;
  void validate() const;
  std::array<double, 4> fractions() const { return {pretrain, finetune, val, test}; }
};

// Floor sizes with the remainder assigned to pretrain.
std::array<i64, 4> split_sizes(i64 n, const SplitSpec& spec);

// Deterministic split assignment; stratified keeps per-class proportions
// within one sample per split.
Manifest build_splits(const Manifest& src, const SplitSpec& spec);

// Per-channel mean/std over the pretrain split's decoded pixels (population
// std), frozen into the manifest for downstream normalization.
void compute_stats(Manifest& m);

// HAM10000-style metadata ingest: CSV with `image_id` and `dx` columns;
// entries point at <images_dir>/<image_id>.jpg.
Manifest ingest_ham(const std::string& metadata_csv, const std::string& images_dir);

// CIFAR-10 binary batch ingest; entries use `file.bin#index` paths.
Manifest ingest_cifar(const std::vector<std::string>& bin_paths);

}  // namespace sim::data
