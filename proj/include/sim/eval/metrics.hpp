// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sim/core/tensor.hpp"

namespace sim::eval {

// Cosine-similarity weighted kNN vote: top-k neighbors weighted exp(sim/tau),
// ties on the vote broken toward the smallest class index.
std::vector<int> knn_predict(const Tensor& train_feats, const std::vector<int>& train_labels,
                             const Tensor& query_feats, i64 k, double temperature,
                             int num_classes);

// Mean over the batch of -(1-p_t)^gamma * log(p_t); gamma=0 is cross-entropy.
float focal_loss(const Tensor& logits, const std::vector<int>& labels, double gamma);
// Returns the loss and writes dL/dlogits.
float focal_loss_backward(const Tensor& logits, const std::vector<int>& labels, double gamma,
                          Tensor& dlogits);

struct BalancedMetrics {
  double balanced_accuracy = 0;
  double macro_f1 = 0;
  std::vector<double> per_class_recall;  // NaN-free; excluded classes carry 0
  std::vector<i64> support;
  std::vector<int> excluded_classes;  // absent from y_true, left out of the means
};

BalancedMetrics balanced_metrics(const std::vector<int>& pred, const std::vector<int>& truth,
                                 int num_classes);

// Collapse diagnostic: mean per-dimension standard deviation of L2-normalized
// rows (population variance). Healthy spreads sit near 1/sqrt(D), collapsed
// representations near 0.
double collapse_std(const Tensor& feats);

}  // namespace sim::eval
