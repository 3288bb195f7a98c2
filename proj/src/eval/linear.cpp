// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/eval/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sim/core/error.hpp"
#include "sim/core/rng.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::eval {

void ProbeConfig::validate() const {
  if (gamma < 0) throw ConfigError("probe gamma must be non-negative");
  if (trials < 1) throw ConfigError("probe trials must be >= 1");
  if (epochs < 1 || batch < 1) throw ConfigError("probe epochs and batch must be positive");
  if (lr <= 0) throw ConfigError("probe lr must be positive");
  if (momentum < 0 || momentum >= 1) throw ConfigError("probe momentum must be in [0,1)");
}

namespace {

// logits = X W^T + b for row-major X [B,D], W [C,D]
void probe_logits(const float* X, i64 B, i64 D, const Tensor& W, const Tensor& bias,
                  Tensor& logits) {
  kern::sgemm_nt(B, W.dim(0), D, 1.0f, X, D, W.data(), D, 0.0f, logits.data(), W.dim(0));
  const i64 C = W.dim(0);
  for (i64 i = 0; i < B; ++i)
    for (i64 j = 0; j < C; ++j) logits[i * C + j] += bias[j];
}

std::vector<int> probe_predict(const Tensor& feats, const Tensor& W, const Tensor& bias) {
  const i64 N = feats.dim(0), C = W.dim(0);
  Tensor logits({N, C});
  probe_logits(feats.data(), N, feats.dim(1), W, bias, logits);
  std::vector<int> pred(static_cast<std::size_t>(N));
  for (i64 i = 0; i < N; ++i) {
    int best = 0;
    for (i64 j = 1; j < C; ++j)
      if (logits[i * C + j] > logits[i * C + best]) best = static_cast<int>(j);
    pred[static_cast<std::size_t>(i)] = best;
  }
  return pred;
}

}  // namespace

EvalReport linear_evaluate(const Tensor& train_feats, const std::vector<int>& train_labels,
                           const Tensor& val_feats, const std::vector<int>& val_labels,
                           const Tensor& test_feats, const std::vector<int>& test_labels,
                           int num_classes, const ProbeConfig& cfg) {
  cfg.validate();
  if (train_feats.ndim() != 2 || train_feats.dim(0) < 1)
    throw DataError("linear_evaluate: empty train split");
  if (val_feats.dim(0) < 1 || test_feats.dim(0) < 1)
    throw DataError("linear_evaluate: empty val or test split");
  const i64 N = train_feats.dim(0), D = train_feats.dim(1), C = num_classes;
  if (static_cast<i64>(train_labels.size()) != N)
    throw DataError("linear_evaluate: train label count mismatch");

  EvalReport report;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(derive_seed(cfg.seed, 0xE7A1, static_cast<std::uint64_t>(trial)));
    Tensor W({C, D}), bias({C});
    for (i64 i = 0; i < W.numel(); ++i)
      W[i] = static_cast<float>(rng.normal(0.0, 0.01));
    Tensor mW = Tensor::zeros({C, D}), mb = Tensor::zeros({C});

    Tensor best_W = W, best_bias = bias;
    double best_val = -1;
    i64 best_epoch = 0;

    std::vector<i64> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    const i64 steps_per_epoch = (N + cfg.batch - 1) / cfg.batch;
    const i64 total_steps = steps_per_epoch * cfg.epochs;
    i64 step = 0;

    for (i64 epoch = 1; epoch <= cfg.epochs; ++epoch) {
      rng.shuffle(order);
      for (i64 start = 0; start < N; start += cfg.batch, ++step) {
        const i64 B = std::min<i64>(cfg.batch, N - start);
        Tensor X({B, D});
        std::vector<int> y(static_cast<std::size_t>(B));
        for (i64 b = 0; b < B; ++b) {
          const i64 src = order[static_cast<std::size_t>(start + b)];
          std::copy_n(train_feats.data() + src * D, D, X.data() + b * D);
          y[static_cast<std::size_t>(b)] = train_labels[static_cast<std::size_t>(src)];
        }
        Tensor logits({B, C});
        probe_logits(X.data(), B, D, W, bias, logits);
        Tensor dlogits;
        const float loss = focal_loss_backward(logits, y, cfg.gamma, dlogits);
        if (!std::isfinite(loss)) throw NumericError("linear probe loss is not finite");

        Tensor dW = Tensor::zeros({C, D});
        kern::sgemm_tn(C, D, B, 1.0f, dlogits.data(), C, X.data(), D, 0.0f, dW.data(), D);
        Tensor db = Tensor::zeros({C});
        for (i64 i = 0; i < B; ++i)
          for (i64 j = 0; j < C; ++j) db[j] += dlogits[i * C + j];

        const double t = static_cast<double>(step) / static_cast<double>(total_steps);
        const float lr = static_cast<float>(cfg.lr * 0.5 * (1.0 + std::cos(M_PI * t)));
        kern::sgd_momentum_update(W.data(), dW.data(), mW.data(), W.numel(), lr,
                                  static_cast<float>(cfg.momentum), 0.0f);
        kern::sgd_momentum_update(bias.data(), db.data(), mb.data(), bias.numel(), lr,
                                  static_cast<float>(cfg.momentum), 0.0f);
      }
      const auto val_pred = probe_predict(val_feats, W, bias);
      const auto val_m = balanced_metrics(val_pred, val_labels, num_classes);
      if (val_m.balanced_accuracy > best_val) {
        best_val = val_m.balanced_accuracy;
        best_W = W;
        best_bias = bias;
        best_epoch = epoch;
      }
    }

    const auto test_pred = probe_predict(test_feats, best_W, best_bias);
    const auto test_m = balanced_metrics(test_pred, test_labels, num_classes);
    TrialResult tr;
    tr.best_epoch = best_epoch;
    tr.val_balanced_accuracy = best_val;
    tr.test_balanced_accuracy = test_m.balanced_accuracy;
    tr.test_macro_f1 = test_m.macro_f1;
    tr.test_per_class_recall = test_m.per_class_recall;
    if (trial == 0) report.excluded_classes = test_m.excluded_classes;
    report.trials.push_back(std::move(tr));
  }

  const double inv = 1.0 / static_cast<double>(cfg.trials);
  report.per_class_recall.assign(static_cast<std::size_t>(num_classes), 0.0);
  for (const auto& tr : report.trials) {
    report.balanced_accuracy += tr.test_balanced_accuracy * inv;
    report.macro_f1 += tr.test_macro_f1 * inv;
    report.selected_trial_val_score += tr.val_balanced_accuracy * inv;
    for (std::size_t c = 0; c < tr.test_per_class_recall.size(); ++c)
      report.per_class_recall[c] += tr.test_per_class_recall[c] * inv;
  }
  return report;
}

}  // namespace sim::eval
