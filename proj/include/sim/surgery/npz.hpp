// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "sim/surgery/checkpoint.hpp"

namespace sim::surgery {

// One array from a .npz archive, named by its zip member (".npy" stripped).
struct NpzEntry {
  std::string name;
  Dtype dtype = Dtype::kF32;
  std::vector<i64> shape;
  std::vector<unsigned char> data;  // C-order little-endian
};

// Reads a numpy .npz archive (a zip of .npy members, stored or deflated).
// Rejects zip64 archives and fortran-order or big-endian members.
std::vector<NpzEntry> read_npz(const std::string& path);

// Writes a .npz archive with stored (uncompressed) members; used to build
// synthetic source archives for tests and round-trip checks.
void write_npz(const std::string& path, const std::vector<NpzEntry>& entries);

}  // namespace sim::surgery
