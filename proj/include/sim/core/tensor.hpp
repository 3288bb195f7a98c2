// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace sim {

using i64 = std::int64_t;

// Dense row-major float tensor with value semantics. All shapes are
// contiguous; there are no views or strides.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<i64> shape);
  Tensor(std::initializer_list<i64> shape) : Tensor(std::vector<i64>(shape)) {}

  static Tensor zeros(std::vector<i64> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<i64> shape, float v);
  static Tensor from(std::vector<i64> shape, std::vector<float> values);

  i64 numel() const { return static_cast<i64>(data_.size()); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  i64 dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<i64>& shape() const { return shape_; }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& operator[](i64 i) { return data_[static_cast<size_t>(i)]; }
  float operator[](i64 i) const { return data_[static_cast<size_t>(i)]; }

  // NCHW accessor for 4-d tensors.
  float& at(i64 n, i64 c, i64 h, i64 w) {
    return data_[static_cast<size_t>(((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
  }
  float at(i64 n, i64 c, i64 h, i64 w) const {
    return data_[static_cast<size_t>(((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
  }
  // Row-major accessor for 2-d tensors.
  float& at(i64 r, i64 c) { return data_[static_cast<size_t>(r * shape_[1] + c)]; }
  float at(i64 r, i64 c) const { return data_[static_cast<size_t>(r * shape_[1] + c)]; }

  void fill(float v);
  void zero() { fill(0.0f); }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Reinterprets the buffer with a new shape of identical element count.
  Tensor reshaped(std::vector<i64> new_shape) const&;
  Tensor reshaped(std::vector<i64> new_shape) &&;

  bool all_finite() const;

 private:
  std::vector<i64> shape_;
  std::vector<float> data_;
};

i64 shape_numel(const std::vector<i64>& shape);
std::string shape_str(const std::vector<i64>& shape);

}  // namespace sim
