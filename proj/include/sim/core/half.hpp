// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>

namespace sim {

// IEEE binary16 conversion, round-to-nearest-even. Used to emulate
// mixed-precision training on hardware without native fp16.
inline std::uint16_t float_to_half(float f) {
  std::uint32_t x;
  std::memcpy(&x, &f, 4);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  std::uint32_t mant = x & 0x007fffffu;
  const int exp = static_cast<int>((x >> 23) & 0xffu) - 127;

  if (exp == 128) {  // inf or nan
    return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? 0x0200u : 0u));
  }
  if (exp > 15) {  // overflow -> inf
    return static_cast<std::uint16_t>(sign | 0x7c00u);
  }
  if (exp >= -14) {  // normal
    std::uint32_t half = sign | static_cast<std::uint32_t>(exp + 15) << 10 | (mant >> 13);
    const std::uint32_t rem = mant & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (half & 1u))) ++half;
    return static_cast<std::uint16_t>(half);
  }
  if (exp >= -25) {  // subnormal
    mant |= 0x00800000u;
    const int shift = -exp - 14 + 13;
    std::uint32_t half = sign | (mant >> (shift + 1));
    const std::uint32_t rem = mant & ((2u << shift) - 1u);
    const std::uint32_t mid = 1u << shift;
    if (rem > mid || (rem == mid && (half & 1u))) ++half;
    return static_cast<std::uint16_t>(half);
  }
  return static_cast<std::uint16_t>(sign);  // underflow -> signed zero
}

inline float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  const std::uint32_t exp = (h >> 10) & 0x1fu;
  std::uint32_t mant = h & 0x3ffu;
  std::uint32_t x;
  if (exp == 0) {
    if (mant == 0) {
      x = sign;
    } else {  // subnormal: normalize
      int e = -1;
      do {
        ++e;
        mant <<= 1;
      } while ((mant & 0x400u) == 0);
      x = sign | static_cast<std::uint32_t>(127 - 15 - e) << 23 | ((mant & 0x3ffu) << 13);
    }
  } else if (exp == 31) {
    x = sign | 0x7f800000u | (mant << 13);
  } else {
    x = sign | (exp - 15 + 127) << 23 | (mant << 13);
  }
  float f;
  std::memcpy(&f, &x, 4);
  return f;
}

// Round a float to the nearest value representable in binary16.
inline float half_round(float f) { return half_to_float(float_to_half(f)); }

}  // namespace sim
