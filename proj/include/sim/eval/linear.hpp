// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "sim/core/tensor.hpp"
#include "sim/eval/metrics.hpp"

namespace sim::eval {

// Linear-probe protocol: one linear layer on frozen features, focal loss,
// SGD momentum with a cosine-decayed LR and no weight decay, model selected
// per trial by best validation balanced accuracy.
struct ProbeConfig {
  double gamma = 4.0;
  int trials = 3;
  i64 epochs = 30;
  double lr = 0.1;
  i64 batch = 128;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  void validate() const;
};

struct TrialResult {
  i64 best_epoch = 0;  // 1-based epoch whose weights were selected
  double val_balanced_accuracy = 0;
  double test_balanced_accuracy = 0;
  double test_macro_f1 = 0;
  std::vector<double> test_per_class_recall;
};

struct EvalReport {
  double balanced_accuracy = 0;  // mean over trials
  double macro_f1 = 0;
  std::vector<double> per_class_recall;
  double selected_trial_val_score = 0;  // mean of per-trial best validation scores
  std::vector<TrialResult> trials;
  std::vector<int> excluded_classes;
};

EvalReport linear_evaluate(const Tensor& train_feats, const std::vector<int>& train_labels,
                           const Tensor& val_feats, const std::vector<int>& val_labels,
                           const Tensor& test_feats, const std::vector<int>& test_labels,
                           int num_classes, const ProbeConfig& cfg);

}  // namespace sim::eval
