// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/train/augment.hpp"

#include <algorithm>
#include <cmath>

#include "sim/core/error.hpp"
#include "sim/data/image.hpp"

namespace sim::train {

AugPolicy aug_policy_from_string(const std::string& s) {
  if (s == "natural-224") return AugPolicy::kNatural224;
  if (s == "cifar-32") return AugPolicy::kCifar32;
  if (s == "identity") return AugPolicy::kIdentity;
  throw ConfigError("unknown augmentation policy \"" + s + "\"");
}

std::string aug_policy_name(AugPolicy p) {
  switch (p) {
    case AugPolicy::kNatural224: return "natural-224";
    case AugPolicy::kCifar32: return "cifar-32";
    case AugPolicy::kIdentity: return "identity";
  }
  throw ConfigError("invalid augmentation policy enum");
}

AugmentConfig AugmentConfig::preset(AugPolicy policy) {
  AugmentConfig cfg;
  cfg.policy = policy;
  switch (policy) {
    case AugPolicy::kNatural224:
      cfg.out_size = 224;
      break;
    case AugPolicy::kCifar32:
      cfg.out_size = 32;
      cfg.blur_p = 0.0;
      break;
    case AugPolicy::kIdentity:
      cfg.out_size = 224;
      break;
  }
  return cfg;
}

void AugmentConfig::validate() const {
  if (out_size < 1) throw ConfigError("augment out_size must be positive");
  if (crop_scale_min <= 0 || crop_scale_min > crop_scale_max || crop_scale_max > 1.0)
    throw ConfigError("crop scale range must satisfy 0 < min <= max <= 1");
  for (double p : {hflip_p, jitter_p, grayscale_p, blur_p})
    if (p < 0 || p > 1) throw ConfigError("augment probabilities must be in [0,1]");
}

namespace {

struct Crop {
  i64 top, left, h, w;
};

// Random area/aspect crop, torchvision-style: 10 attempts then center crop.
Crop sample_crop(i64 H, i64 W, const AugmentConfig& cfg, Rng& rng) {
  const double area = static_cast<double>(H) * static_cast<double>(W);
  const double log_lo = std::log(3.0 / 4.0), log_hi = std::log(4.0 / 3.0);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double target = area * rng.uniform(cfg.crop_scale_min, cfg.crop_scale_max);
    const double aspect = std::exp(rng.uniform(log_lo, log_hi));
    const i64 w = static_cast<i64>(std::lround(std::sqrt(target * aspect)));
    const i64 h = static_cast<i64>(std::lround(std::sqrt(target / aspect)));
    if (w < 1 || h < 1 || w > W || h > H) continue;
    const i64 top = static_cast<i64>(rng.randint(static_cast<std::uint64_t>(H - h + 1)));
    const i64 left = static_cast<i64>(rng.randint(static_cast<std::uint64_t>(W - w + 1)));
    return {top, left, h, w};
  }
  const i64 s = std::min(H, W);
  return {(H - s) / 2, (W - s) / 2, s, s};
}

Tensor crop_resize(const Tensor& img, const Crop& c, i64 out) {
  const i64 H = img.dim(1), W = img.dim(2);
  Tensor patch({3, c.h, c.w});
  for (i64 ch = 0; ch < 3; ++ch)
    for (i64 y = 0; y < c.h; ++y)
      for (i64 x = 0; x < c.w; ++x)
        patch[(ch * c.h + y) * c.w + x] = img[(ch * H + c.top + y) * W + c.left + x];
  return data::bilinear_resize(patch, out, out);
}

void hflip_inplace(Tensor& img) {
  const i64 H = img.dim(1), W = img.dim(2);
  for (i64 c = 0; c < 3; ++c)
    for (i64 y = 0; y < H; ++y)
      for (i64 x = 0; x < W / 2; ++x)
        std::swap(img[(c * H + y) * W + x], img[(c * H + y) * W + (W - 1 - x)]);
}

float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

void brightness_inplace(Tensor& img, float f) {
  for (i64 i = 0; i < img.numel(); ++i) img[i] *= f;
}

void contrast_inplace(Tensor& img, float f) {
  const i64 hw = img.dim(1) * img.dim(2);
  double m = 0;
  for (i64 i = 0; i < hw; ++i)
    m += luma(img[i], img[hw + i], img[2 * hw + i]);
  const float mean = static_cast<float>(m / static_cast<double>(hw));
  for (i64 i = 0; i < img.numel(); ++i) img[i] = (img[i] - mean) * f + mean;
}

void saturation_inplace(Tensor& img, float f) {
  const i64 hw = img.dim(1) * img.dim(2);
  for (i64 i = 0; i < hw; ++i) {
    const float g = luma(img[i], img[hw + i], img[2 * hw + i]);
    img[i] = g + (img[i] - g) * f;
    img[hw + i] = g + (img[hw + i] - g) * f;
    img[2 * hw + i] = g + (img[2 * hw + i] - g) * f;
  }
}

void hue_inplace(Tensor& img, float shift) {
  const i64 hw = img.dim(1) * img.dim(2);
  for (i64 i = 0; i < hw; ++i) {
    float r = img[i], g = img[hw + i], b = img[2 * hw + i];
    const float mx = std::max({r, g, b}), mn = std::min({r, g, b});
    const float c = mx - mn;
    float h = 0;
    if (c > 0) {
      if (mx == r) h = std::fmod((g - b) / c, 6.0f);
      else if (mx == g) h = (b - r) / c + 2.0f;
      else h = (r - g) / c + 4.0f;
      h /= 6.0f;
      if (h < 0) h += 1.0f;
    }
    const float s = mx > 0 ? c / mx : 0.0f;
    const float v = mx;
    h += shift;
    h -= std::floor(h);
    const float hp = h * 6.0f;
    const float x = c * (1.0f - std::fabs(std::fmod(hp, 2.0f) - 1.0f));
    float rr = 0, gg = 0, bb = 0;
    if (hp < 1) { rr = c; gg = x; }
    else if (hp < 2) { rr = x; gg = c; }
    else if (hp < 3) { gg = c; bb = x; }
    else if (hp < 4) { gg = x; bb = c; }
    else if (hp < 5) { rr = x; bb = c; }
    else { rr = c; bb = x; }
    const float m = v - c;
    (void)s;
    img[i] = rr + m;
    img[hw + i] = gg + m;
    img[2 * hw + i] = bb + m;
  }
}

void grayscale_inplace(Tensor& img) {
  const i64 hw = img.dim(1) * img.dim(2);
  for (i64 i = 0; i < hw; ++i) {
    const float g = luma(img[i], img[hw + i], img[2 * hw + i]);
    img[i] = img[hw + i] = img[2 * hw + i] = g;
  }
}

void gaussian_blur_inplace(Tensor& img, float sigma) {
  const i64 H = img.dim(1), W = img.dim(2);
  const i64 radius = std::max<i64>(1, static_cast<i64>(std::ceil(2.0f * sigma)));
  std::vector<float> k(static_cast<std::size_t>(2 * radius + 1));
  float sum = 0;
  for (i64 i = -radius; i <= radius; ++i) {
    const float v = std::exp(-0.5f * static_cast<float>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;

  Tensor tmp({3, H, W});
  for (i64 c = 0; c < 3; ++c)  // horizontal pass, clamped borders
    for (i64 y = 0; y < H; ++y)
      for (i64 x = 0; x < W; ++x) {
        float acc = 0;
        for (i64 d = -radius; d <= radius; ++d) {
          const i64 xx = std::clamp<i64>(x + d, 0, W - 1);
          acc += k[static_cast<std::size_t>(d + radius)] * img[(c * H + y) * W + xx];
        }
        tmp[(c * H + y) * W + x] = acc;
      }
  for (i64 c = 0; c < 3; ++c)  // vertical pass
    for (i64 y = 0; y < H; ++y)
      for (i64 x = 0; x < W; ++x) {
        float acc = 0;
        for (i64 d = -radius; d <= radius; ++d) {
          const i64 yy = std::clamp<i64>(y + d, 0, H - 1);
          acc += k[static_cast<std::size_t>(d + radius)] * tmp[(c * H + yy) * W + x];
        }
        img[(c * H + y) * W + x] = acc;
      }
}

void clamp01_inplace(Tensor& img) {
  for (i64 i = 0; i < img.numel(); ++i) img[i] = std::max(0.0f, std::min(1.0f, img[i]));
}

}  // namespace

Tensor augment_view(const Tensor& img, const AugmentConfig& cfg, Rng& rng) {
  if (img.ndim() != 3 || img.dim(0) != 3)
    throw ShapeError("augment expects [3,H,W], got " + shape_str(img.shape()));
  if (cfg.policy == AugPolicy::kIdentity)
    return data::bilinear_resize(img, cfg.out_size, cfg.out_size);

  Tensor v = crop_resize(img, sample_crop(img.dim(1), img.dim(2), cfg, rng), cfg.out_size);
  if (rng.bernoulli(cfg.hflip_p)) hflip_inplace(v);
  if (rng.bernoulli(cfg.jitter_p)) {
    // fixed op order (brightness, contrast, saturation, hue), random factors
    brightness_inplace(v, rng.uniformf(1.0f - static_cast<float>(cfg.jitter_brightness),
                                       1.0f + static_cast<float>(cfg.jitter_brightness)));
    contrast_inplace(v, rng.uniformf(1.0f - static_cast<float>(cfg.jitter_contrast),
                                     1.0f + static_cast<float>(cfg.jitter_contrast)));
    saturation_inplace(v, rng.uniformf(1.0f - static_cast<float>(cfg.jitter_saturation),
                                       1.0f + static_cast<float>(cfg.jitter_saturation)));
    clamp01_inplace(v);  // hue conversion needs [0,1] RGB
    hue_inplace(v, rng.uniformf(-static_cast<float>(cfg.jitter_hue),
                                static_cast<float>(cfg.jitter_hue)));
  }
  if (rng.bernoulli(cfg.grayscale_p)) grayscale_inplace(v);
  if (rng.bernoulli(cfg.blur_p)) gaussian_blur_inplace(v, rng.uniformf(0.1f, 2.0f));
  clamp01_inplace(v);
  return v;
}

ViewPair augment_pair(const Tensor& img, const AugmentConfig& cfg, std::uint64_t seed,
                      i64 source_id) {
  cfg.validate();
  ViewPair pair;
  pair.source_id = source_id;
  pair.seed = seed;
  Rng r1(derive_seed(seed, 1));
  Rng r2(derive_seed(seed, 2));
  pair.view1 = augment_view(img, cfg, r1);
  pair.view2 = augment_view(img, cfg, r2);
  return pair;
}

}  // namespace sim::train
