// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sim/core/tensor.hpp"

namespace sim::surgery {

enum class Dtype { kF32, kF64, kI64, kI32, kU8 };

std::size_t dtype_size(Dtype d);
std::string dtype_name(Dtype d);
Dtype dtype_from_name(const std::string& s);

// One named dense array: dtype, shape, and little-endian raw bytes.
struct TensorEntry {
  Dtype dtype = Dtype::kF32;
  std::vector<i64> shape;
  std::vector<unsigned char> data;

  i64 numel() const { return shape_numel(shape); }
  bool bytes_equal(const TensorEntry& other) const {
    return dtype == other.dtype && shape == other.shape && data == other.data;
  }

  static TensorEntry from_tensor(const Tensor& t);
  Tensor to_tensor() const;  // f32 entries only
};

// Ordered map of canonical tensor names to entries, plus string metadata.
// Immutable by convention once built; surgery operations return new
// checkpoints instead of mutating their inputs.
class Checkpoint {
 public:
  void add(std::string name, TensorEntry entry);
  void add_tensor(const std::string& name, const Tensor& t) {
    add(name, TensorEntry::from_tensor(t));
  }
  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  const TensorEntry& at(const std::string& name) const;
  TensorEntry& at(const std::string& name);
  Tensor tensor(const std::string& name) const { return at(name).to_tensor(); }

  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }

  std::map<std::string, std::string> meta;

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, TensorEntry> entries_;
};

// Native checkpoint format, format_version 1:
//   bytes 0..7    magic "SIMCKPT1"
//   bytes 8..15   JSON header length (unsigned 64-bit little-endian)
//   header        JSON: format_version, meta, payload_nbytes, payload_crc32,
//                 tensors: [{name, dtype, shape, offset, nbytes}]
//   payload       contiguous raw little-endian tensor data
// Load verifies magic, version, dtype/shape/byte-length consistency, offset
// bounds, file size, and a CRC-32 over the payload.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sim::surgery
