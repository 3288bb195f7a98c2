// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "sim/core/tensor.hpp"

namespace sim::data {

// Decodes PNG, JPEG, or binary PPM into [3,H,W] floats in [0,1]. A path of
// the form `batch.bin#17` reads record 17 of a CIFAR-10 binary batch file.
Tensor decode_image(const std::string& path);

// Label byte of a CIFAR-10 binary record.
int cifar_record_label(const std::string& bin_path, i64 index);
i64 cifar_record_count(const std::string& bin_path);

Tensor bilinear_resize(const Tensor& img, i64 out_h, i64 out_w);

void normalize_inplace(Tensor& img, const std::array<float, 3>& mean,
                       const std::array<float, 3>& stddev);

// decode + resize + optional normalization, the full manifest-entry loader.
Tensor load_image(const std::string& path, i64 target_size,
                  const std::array<float, 3>* mean = nullptr,
                  const std::array<float, 3>* stddev = nullptr);

// 8-bit RGB PNG writer (interleaved rows, length w*h*3).
void write_png_rgb8(const std::string& path, i64 w, i64 h, const unsigned char* rgb);

// Float [3,H,W] in [0,1] to interleaved 8-bit rows, clamped.
std::vector<unsigned char> to_rgb8(const Tensor& img);

}  // namespace sim::data
