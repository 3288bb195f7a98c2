// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sim/core/error.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::eval {

std::vector<int> knn_predict(const Tensor& train_feats, const std::vector<int>& train_labels,
                             const Tensor& query_feats, i64 k, double temperature,
                             int num_classes) {
  if (train_feats.ndim() != 2 || query_feats.ndim() != 2 ||
      train_feats.dim(1) != query_feats.dim(1))
    throw ShapeError("knn_predict: bank " + shape_str(train_feats.shape()) + " vs query " +
                     shape_str(query_feats.shape()));
  const i64 N = train_feats.dim(0), M = query_feats.dim(0), D = train_feats.dim(1);
  if (N < 1) throw DataError("knn_predict: empty feature bank");
  if (static_cast<i64>(train_labels.size()) != N)
    throw DataError("knn_predict: label count mismatch");
  if (k < 1 || k > N)
    throw DataError("knn_predict: k=" + std::to_string(k) + " outside [1," +
                    std::to_string(N) + "]");
  if (temperature <= 0) throw ConfigError("knn_predict: temperature must be positive");
  for (int l : train_labels)
    if (l < 0 || l >= num_classes) throw DataError("knn_predict: label out of range");

  Tensor bank({N, D}), queries({M, D});
  if (kern::l2_normalize_rows(train_feats.data(), N, D, bank.data()) < 1e-12f)
    throw NumericError("knn_predict: zero-norm bank row");
  if (kern::l2_normalize_rows(query_feats.data(), M, D, queries.data()) < 1e-12f)
    throw NumericError("knn_predict: zero-norm query row");

  Tensor sims({M, N});
  kern::sgemm_nt(M, N, D, 1.0f, queries.data(), D, bank.data(), D, 0.0f, sims.data(), N);

  std::vector<int> out(static_cast<std::size_t>(M));
#pragma omp parallel
  {
    std::vector<i64> idx(static_cast<std::size_t>(N));
    std::vector<double> votes(static_cast<std::size_t>(num_classes));
#pragma omp for schedule(static)
    for (i64 q = 0; q < M; ++q) {
      const float* s = sims.data() + q * N;
      std::iota(idx.begin(), idx.end(), 0);
      std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](i64 a, i64 b) {
        return s[a] != s[b] ? s[a] > s[b] : a < b;
      });
      std::fill(votes.begin(), votes.end(), 0.0);
      for (i64 j = 0; j < k; ++j) {
        const i64 n = idx[static_cast<std::size_t>(j)];
        votes[static_cast<std::size_t>(train_labels[static_cast<std::size_t>(n)])] +=
            std::exp(static_cast<double>(s[n]) / temperature);
      }
      int best = 0;
      for (int c = 1; c < num_classes; ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)])
          best = c;
      out[static_cast<std::size_t>(q)] = best;
    }
  }
  return out;
}

namespace {

constexpr double kProbFloor = 1e-7;

void check_labels(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.ndim() != 2) throw ShapeError("focal_loss expects [B,C] logits");
  if (static_cast<i64>(labels.size()) != logits.dim(0))
    throw DataError("focal_loss: label count mismatch");
  for (int l : labels)
    if (l < 0 || l >= logits.dim(1))
      throw DataError("focal_loss: label " + std::to_string(l) + " out of range [0," +
                      std::to_string(logits.dim(1)) + ")");
}

}  // namespace

float focal_loss(const Tensor& logits, const std::vector<int>& labels, double gamma) {
  check_labels(logits, labels);
  if (gamma < 0) throw ConfigError("focal gamma must be non-negative");
  const i64 B = logits.dim(0), C = logits.dim(1);
  Tensor probs({B, C});
  kern::softmax_rows(logits.data(), B, C, probs.data());
  double total = 0;
  for (i64 i = 0; i < B; ++i) {
    const double pt = std::clamp(
        static_cast<double>(probs[i * C + labels[static_cast<std::size_t>(i)]]), kProbFloor,
        1.0 - kProbFloor);
    total += -std::pow(1.0 - pt, gamma) * std::log(pt);
  }
  return static_cast<float>(total / static_cast<double>(B));
}

float focal_loss_backward(const Tensor& logits, const std::vector<int>& labels, double gamma,
                          Tensor& dlogits) {
  check_labels(logits, labels);
  if (gamma < 0) throw ConfigError("focal gamma must be non-negative");
  const i64 B = logits.dim(0), C = logits.dim(1);
  Tensor probs({B, C});
  kern::softmax_rows(logits.data(), B, C, probs.data());
  dlogits = Tensor::zeros(logits.shape());
  double total = 0;
  for (i64 i = 0; i < B; ++i) {
    const int t = labels[static_cast<std::size_t>(i)];
    const double pt =
        std::clamp(static_cast<double>(probs[i * C + t]), kProbFloor, 1.0 - kProbFloor);
    const double one_minus = 1.0 - pt;
    total += -std::pow(one_minus, gamma) * std::log(pt);
    // dL/dp_t, then chain through softmax: dp_t/dlogit_j = p_t (delta_tj - p_j)
    const double df_dpt =
        gamma * std::pow(one_minus, gamma - 1.0) * std::log(pt) - std::pow(one_minus, gamma) / pt;
    for (i64 j = 0; j < C; ++j) {
      const double pj = probs[i * C + j];
      const double delta = (j == t) ? 1.0 : 0.0;
      dlogits[i * C + j] =
          static_cast<float>(df_dpt * pt * (delta - pj) / static_cast<double>(B));
    }
  }
  return static_cast<float>(total / static_cast<double>(B));
}

BalancedMetrics balanced_metrics(const std::vector<int>& pred, const std::vector<int>& truth,
                                 int num_classes) {
  if (pred.size() != truth.size())
    throw DataError("balanced_metrics: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(truth.size()) + " labels");
  if (num_classes < 1) throw ConfigError("balanced_metrics: need at least one class");
  const auto nc = static_cast<std::size_t>(num_classes);
  std::vector<i64> tp(nc, 0), fp(nc, 0), support(nc, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = pred[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw DataError("balanced_metrics: label out of range");
    ++support[static_cast<std::size_t>(t)];
    if (p == t) ++tp[static_cast<std::size_t>(p)];
    else ++fp[static_cast<std::size_t>(p)];
  }

  BalancedMetrics m;
  m.support = support;
  m.per_class_recall.assign(nc, 0.0);
  double recall_sum = 0, f1_sum = 0;
  int included = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    if (support[c] == 0) {
      m.excluded_classes.push_back(static_cast<int>(c));
      continue;
    }
    const double recall = static_cast<double>(tp[c]) / static_cast<double>(support[c]);
    m.per_class_recall[c] = recall;
    const i64 predicted = tp[c] + fp[c];
    const double precision =
        predicted > 0 ? static_cast<double>(tp[c]) / static_cast<double>(predicted) : 0.0;
    const double f1 =
        (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    recall_sum += recall;
    f1_sum += f1;
    ++included;
  }
  if (included == 0) throw DataError("balanced_metrics: no class has support");
  m.balanced_accuracy = recall_sum / included;
  m.macro_f1 = f1_sum / included;
  return m;
}

double collapse_std(const Tensor& feats) {
  if (feats.ndim() != 2) throw ShapeError("collapse_std expects [N,D]");
  const i64 N = feats.dim(0), D = feats.dim(1);
  if (N < 2) throw DataError("collapse_std needs at least 2 rows");
  Tensor unit({N, D});
  if (kern::l2_normalize_rows(feats.data(), N, D, unit.data()) < 1e-12f)
    throw NumericError("collapse_std: zero-norm feature row");
  double acc = 0;
  for (i64 j = 0; j < D; ++j) {
    double sum = 0, sumsq = 0;
    for (i64 i = 0; i < N; ++i) {
      const double v = unit[i * D + j];
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(N);
    const double var = std::max(0.0, sumsq / static_cast<double>(N) - mean * mean);
    acc += std::sqrt(var);
  }
  return acc / static_cast<double>(D);
}

}  // namespace sim::eval
