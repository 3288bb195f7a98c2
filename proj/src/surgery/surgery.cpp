// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/surgery/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include "sim/core/error.hpp"
#include "sim/kernels/kern.hpp"

namespace sim::surgery {

namespace {

struct Item {
  std::string name;
  std::vector<i64> shape;
};

bool is_conv_weight(const std::string& name) {
  return name.ends_with(".weight");
}
bool is_norm_param(const std::string& name) {
  return name.ends_with(".gamma") || name.ends_with(".beta") ||
         name.ends_with(".running_mean") || name.ends_with(".running_var");
}

// Parameter inventory of the post-surgery architecture: same config with the
// norm kind forced to BatchNorm, no SimSiam heads.
std::vector<Item> bn_inventory(const nn::BackboneConfig& cfg) {
  nn::BackboneConfig bn_cfg = cfg;
  bn_cfg.norm = nn::NormKind::kBatchNorm;
  nn::SimSiamModel model(bn_cfg, std::nullopt);
  std::vector<Item> items;
  for (const auto& p : model.params()) items.push_back({p.name, p.value->shape()});
  return items;
}

Tensor standardized(const Checkpoint& src, const std::string& name, float ws_eps) {
  Tensor w = src.tensor(name);
  if (!w.all_finite())
    throw NumericError("conv tensor \"" + name + "\" contains non-finite values");
  Tensor w_hat(w.shape());
  const i64 cout = w.dim(0);
  kern::weight_standardize_forward(w.data(), cout, w.numel() / cout, ws_eps,
                                   w_hat.data(), nullptr);
  return w_hat;
}

}  // namespace

Checkpoint convert_gn_to_bn(const Checkpoint& src, const nn::BackboneConfig& cfg,
                            bool bake_ws) {
  if (src.meta.count("surgery"))
    throw ConfigError("checkpoint already records surgery \"" + src.meta.at("surgery") +
                      "\"; converting twice is rejected");
  if (src.meta.count("norm_kind") && src.meta.at("norm_kind") == "batchnorm")
    throw ConfigError("checkpoint is already BatchNorm-layout; nothing to convert");

  const std::vector<Item> inventory = bn_inventory(cfg);

  std::vector<std::string> missing;
  Checkpoint dst;
  for (const auto& item : inventory) {
    if (is_conv_weight(item.name)) {
      if (!src.has(item.name)) {
        missing.push_back(item.name);
        continue;
      }
      const TensorEntry& se = src.at(item.name);
      if (se.dtype != Dtype::kF32)
        throw IntegrityError("conv tensor \"" + item.name + "\" must be f32, got " +
                             dtype_name(se.dtype));
      if (se.shape != item.shape)
        throw ShapeError("conv tensor \"" + item.name + "\": source shape " +
                         shape_str(se.shape) + " vs required " + shape_str(item.shape));
      if (bake_ws)
        dst.add_tensor(item.name, standardized(src, item.name, cfg.ws_eps));
      else
        dst.add(item.name, se);
    } else if (is_norm_param(item.name)) {
      const float v =
          (item.name.ends_with(".gamma") || item.name.ends_with(".running_var")) ? 1.0f
                                                                                 : 0.0f;
      dst.add_tensor(item.name, Tensor::full(item.shape, v));
    } else {
      throw IntegrityError("unclassifiable parameter \"" + item.name + "\" in inventory");
    }
  }
  if (!missing.empty()) {
    std::string msg = "source checkpoint is missing " + std::to_string(missing.size()) +
                      " conv tensor(s) required by the architecture:";
    for (const auto& n : missing) msg += "\n  " + n;
    throw IntegrityError(msg);
  }

  // Anything in src beyond conv kernels, norm parameters, and classifier
  // heads means the name map and the architecture disagree.
  std::vector<std::string> unknown;
  for (const auto& name : src.names()) {
    if (dst.has(name) && is_conv_weight(name)) continue;
    if (is_norm_param(name)) continue;                // GN parameters, dropped
    if (name.rfind("head.", 0) == 0) continue;        // classifier head, dropped
    unknown.push_back(name);
  }
  if (!unknown.empty()) {
    std::string msg = "source checkpoint has tensor(s) with no place in the architecture:";
    for (const auto& n : unknown) msg += "\n  " + n;
    throw IntegrityError(msg);
  }

  if (src.meta.count("source")) dst.meta["source"] = src.meta.at("source");
  dst.meta["surgery"] = "gn_to_bn";
  dst.meta["bake_ws"] = bake_ws ? "true" : "false";
  dst.meta["norm_kind"] = "batchnorm";
  dst.meta["depth"] = std::to_string(cfg.depth);
  dst.meta["width_mult"] = std::to_string(cfg.width_mult);
  return dst;
}

std::string SurgeryReport::summary() const {
  std::string s = pass ? "PASS" : "FAIL";
  s += ": " + std::to_string(conv_tensors) + " conv tensor(s), " +
       std::to_string(norm_sites) + " norm site(s)";
  if (!failures.empty()) s += ", " + std::to_string(failures.size()) + " failure(s)";
  for (const auto& f : failures) s += "\n  " + f;
  return s;
}

SurgeryReport verify_surgery(const Checkpoint& src, const Checkpoint& dst,
                             const nn::BackboneConfig& cfg, bool bake_ws) {
  SurgeryReport report;
  auto fail = [&](const std::string& msg) {
    report.pass = false;
    report.failures.push_back(msg);
  };

  if (!dst.meta.count("norm_kind") || dst.meta.at("norm_kind") != "batchnorm")
    fail("meta does not record BatchNorm layout (GroupNorm leftovers possible)");
  if (!dst.meta.count("surgery"))
    fail("meta does not record the applied surgery");

  const std::vector<Item> inventory = bn_inventory(cfg);
  for (const auto& item : inventory) {
    if (is_conv_weight(item.name)) {
      ++report.conv_tensors;
      if (!src.has(item.name) || !dst.has(item.name)) {
        fail("conv tensor \"" + item.name + "\" missing from " +
             (src.has(item.name) ? "dst" : "src"));
        continue;
      }
      if (!bake_ws) {
        if (!src.at(item.name).bytes_equal(dst.at(item.name)))
          fail("conv tensor \"" + item.name + "\" differs from the source (bit-exact check)");
      } else {
        const Tensor want = standardized(src, item.name, cfg.ws_eps);
        const Tensor got = dst.tensor(item.name);
        float max_abs = 0.0f;
        for (i64 i = 0; i < want.numel(); ++i)
          max_abs = std::max(max_abs, std::fabs(want[i] - got[i]));
        if (max_abs > 1e-6f)
          fail("conv tensor \"" + item.name + "\" deviates from standardized source by " +
               std::to_string(max_abs));
      }
    } else if (is_norm_param(item.name)) {
      if (item.name.ends_with(".gamma")) ++report.norm_sites;
      if (!dst.has(item.name)) {
        fail("norm tensor \"" + item.name + "\" missing from dst (site lacks BN layout)");
        continue;
      }
      const float want =
          (item.name.ends_with(".gamma") || item.name.ends_with(".running_var")) ? 1.0f
                                                                                 : 0.0f;
      const Tensor got = dst.tensor(item.name);
      for (i64 i = 0; i < got.numel(); ++i) {
        if (got[i] != want) {
          fail("non-default BN parameter \"" + item.name + "\" (expected " +
               std::to_string(want) + ", found " + std::to_string(got[i]) + " at index " +
               std::to_string(i) + ")");
          break;
        }
      }
    }
  }

  std::unordered_set<std::string> known;
  for (const auto& item : inventory) known.insert(item.name);
  for (const auto& name : dst.names())
    if (!known.count(name)) fail("unexpected extra tensor \"" + name + "\" in dst");
  return report;
}

Checkpoint model_to_checkpoint(nn::SimSiamModel& model,
                               std::map<std::string, std::string> meta) {
  Checkpoint ckpt;
  for (const auto& p : model.params()) ckpt.add_tensor(p.name, *p.value);
  ckpt.meta = std::move(meta);
  return ckpt;
}

LoadStats load_into_model(const Checkpoint& ckpt, nn::SimSiamModel& model,
                          bool allow_unused_heads) {
  LoadStats stats;
  std::vector<std::string> missing, mismatched;
  std::vector<std::string> model_names;
  for (auto& p : model.params()) {
    model_names.push_back(p.name);
    if (!ckpt.has(p.name)) {
      if (nn::is_backbone_param(p.name))
        missing.push_back(p.name);
      else
        stats.skipped.push_back(p.name);
      continue;
    }
    const Tensor t = ckpt.tensor(p.name);
    if (!t.same_shape(*p.value)) {
      mismatched.push_back(p.name + ": checkpoint " + shape_str(t.shape()) + " vs model " +
                           shape_str(p.value->shape()));
      continue;
    }
    *p.value = t;
    ++stats.loaded;
  }
  if (!missing.empty()) {
    std::string msg = "checkpoint is missing backbone tensor(s):";
    for (const auto& n : missing) msg += "\n  " + n;
    throw IntegrityError(msg);
  }
  if (!mismatched.empty()) {
    std::string msg = "checkpoint/model shape mismatch:";
    for (const auto& n : mismatched) msg += "\n  " + n;
    throw ShapeError(msg);
  }
  for (const auto& name : ckpt.names()) {
    const bool in_model =
        std::find(model_names.begin(), model_names.end(), name) != model_names.end();
    if (in_model) continue;
    if (!nn::is_backbone_param(name) && allow_unused_heads) continue;
    throw IntegrityError("checkpoint tensor \"" + name + "\" has no model counterpart");
  }
  return stats;
}

}  // namespace sim::surgery
