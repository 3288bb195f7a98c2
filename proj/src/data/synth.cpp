// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "sim/core/error.hpp"
#include "sim/core/rng.hpp"
#include "sim/data/image.hpp"

namespace sim::data {

namespace {

void hsv_to_rgb(float h, float s, float v, float rgb[3]) {
  h = h - std::floor(h);
  const float c = v * s;
  const float hp = h * 6.0f;
  const float x = c * (1.0f - std::fabs(std::fmod(hp, 2.0f) - 1.0f));
  float r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const float m = v - c;
  rgb[0] = r + m;
  rgb[1] = g + m;
  rgb[2] = b + m;
}

}  // namespace

std::vector<i64> synth_class_counts(const SynthSpec& spec) {
  if (spec.classes < 1) throw ConfigError("synth dataset needs at least one class");
  if (spec.n < spec.classes)
    throw ConfigError("synth dataset needs n >= classes (" + std::to_string(spec.n) + " < " +
                      std::to_string(spec.classes) + ")");
  std::vector<double> p(static_cast<std::size_t>(spec.classes), 0.0);
  if (spec.imbalance.empty()) {
    std::fill(p.begin(), p.end(), 1.0 / spec.classes);
  } else {
    if (static_cast<int>(spec.imbalance.size()) > spec.classes)
      throw ConfigError("imbalance profile longer than class count");
    double given = 0;
    for (std::size_t i = 0; i < spec.imbalance.size(); ++i) {
      if (spec.imbalance[i] < 0) throw ConfigError("imbalance fractions must be non-negative");
      p[i] = spec.imbalance[i];
      given += spec.imbalance[i];
    }
    if (given > 1.0 + 1e-9) throw ConfigError("imbalance profile sums past 1");
    const std::size_t rest = p.size() - spec.imbalance.size();
    if (rest > 0)
      for (std::size_t i = spec.imbalance.size(); i < p.size(); ++i)
        p[i] = (1.0 - given) / static_cast<double>(rest);
    else if (std::fabs(given - 1.0) > 1e-9)
      throw ConfigError("full imbalance profile must sum to 1");
  }

  // largest-remainder apportionment
  std::vector<i64> counts(p.size());
  std::vector<std::pair<double, std::size_t>> rema(p.size());
  i64 assigned = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double exact = p[i] * static_cast<double>(spec.n);
    counts[i] = static_cast<i64>(std::floor(exact));
    assigned += counts[i];
    rema[i] = {exact - std::floor(exact), i};
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (i64 k = 0; k < spec.n - assigned; ++k) ++counts[rema[static_cast<std::size_t>(k)].second];
  return counts;
}

Tensor synth_image(int cls, i64 image_size, std::uint64_t image_seed) {
  Rng rng(image_seed);
  const i64 S = image_size;
  Tensor img({3, S, S});

  float fg[3], bg[3];
  hsv_to_rgb(0.61803399f * static_cast<float>(cls), 0.65f, 0.9f, fg);
  for (int c = 0; c < 3; ++c) bg[c] = fg[c] * 0.35f;

  const int pattern = cls % 4;
  const float period = 4.0f + 2.0f * static_cast<float>(cls / 4);
  const float phase = rng.uniformf(0.0f, period);
  const float cy = rng.uniformf(0.3f, 0.7f) * static_cast<float>(S);
  const float cx = rng.uniformf(0.3f, 0.7f) * static_cast<float>(S);
  const float gain = rng.uniformf(0.85f, 1.15f);

  for (i64 y = 0; y < S; ++y)
    for (i64 x = 0; x < S; ++x) {
      bool on = false;
      switch (pattern) {
        case 0: on = std::fmod(static_cast<float>(y) + phase, period) < period * 0.5f; break;
        case 1: on = std::fmod(static_cast<float>(x) + phase, period) < period * 0.5f; break;
        case 2:
          on = (std::fmod(static_cast<float>(x) + phase, period) < period * 0.5f) ==
               (std::fmod(static_cast<float>(y) + phase, period) < period * 0.5f);
          break;
        default: {
          const float dy = static_cast<float>(y) - cy, dx = static_cast<float>(x) - cx;
          on = std::fmod(std::sqrt(dy * dy + dx * dx) + phase, period) < period * 0.5f;
        }
      }
      for (i64 c = 0; c < 3; ++c) {
        float v = (on ? fg[c] : bg[c]) * gain + rng.uniformf(-0.06f, 0.06f);
        img[(c * S + y) * S + x] = std::max(0.0f, std::min(1.0f, v));
      }
    }
  return img;
}

Manifest synth_dataset(const SynthSpec& spec) {
  const std::vector<i64> counts = synth_class_counts(spec);
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw DataError("cannot create directory " + spec.out_dir + ": " + ec.message());

  Manifest m;
  for (int k = 0; k < spec.classes; ++k) m.class_names.push_back("class" + std::to_string(k));

  for (int k = 0; k < spec.classes; ++k) {
    for (i64 i = 0; i < counts[static_cast<std::size_t>(k)]; ++i) {
      const Tensor img = synth_image(k, spec.image_size,
                                     derive_seed(spec.seed, static_cast<std::uint64_t>(k),
                                                 static_cast<std::uint64_t>(i)));
      char name[64];
      std::snprintf(name, sizeof(name), "class%d_%04lld.png", k, static_cast<long long>(i));
      const std::string path = spec.out_dir + "/" + name;
      const auto rgb = to_rgb8(img);
      write_png_rgb8(path, spec.image_size, spec.image_size, rgb.data());
      m.entries.push_back({path, m.class_names[static_cast<std::size_t>(k)], "unassigned"});
    }
  }
  m.save(spec.out_dir + "/manifest.csv");
  return m;
}

}  // namespace sim::data
