// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (bad fractions, unknown keys, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Tensor shape or layout mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// Corrupt or inconsistent on-disk data (checkpoints, archives).
struct IntegrityError : Error {
  using Error::Error;
};

// Problems with dataset files (missing image, undecodable, ...).
struct DataError : Error {
  using Error::Error;
};

// Numerical failure during training (non-finite loss, degenerate norm).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace sim
