// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/surgery/namemap.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sim/core/error.hpp"
#include "sim/surgery/npz.hpp"

namespace sim::surgery {

using json = nlohmann::json;

NameMap NameMap::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open name map " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json_text(ss.str(), path);
}

NameMap NameMap::from_json_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("name map " + origin + " is not valid JSON: " + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ConfigError("name map " + origin + " has unsupported format_version");
  NameMap m;
  m.source_id_ = j.value("source", "unknown");
  for (const auto& r : j.at("rules")) {
    Rule rule;
    rule.pattern = r.at("pattern").get<std::string>();
    rule.templ = r.at("template").get<std::string>();
    rule.layout = r.value("layout", "none");
    if (rule.layout != "none" && rule.layout != "hwio_to_oihw" && rule.layout != "squeeze")
      throw ConfigError("name map " + origin + ": unknown layout \"" + rule.layout + "\"");
    try {
      rule.re = std::regex(rule.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigError("name map " + origin + ": bad pattern \"" + rule.pattern +
                        "\": " + e.what());
    }
    m.rules_.push_back(std::move(rule));
  }
  if (m.rules_.empty()) throw ConfigError("name map " + origin + " has no rules");
  return m;
}

std::optional<NameMap::Match> NameMap::apply(const std::string& source_name) const {
  for (const auto& rule : rules_) {
    std::smatch sm;
    if (!std::regex_match(source_name, sm, rule.re)) continue;
    std::string out;
    const std::string& t = rule.templ;
    for (std::size_t i = 0; i < t.size();) {
      if (t[i] != '{') {
        out += t[i++];
        continue;
      }
      const std::size_t close = t.find('}', i);
      if (close == std::string::npos)
        throw ConfigError("unterminated placeholder in template \"" + t + "\"");
      std::string spec = t.substr(i + 1, close - i - 1);
      bool as_int = false;
      if (spec.rfind("int:", 0) == 0) {
        as_int = true;
        spec = spec.substr(4);
      }
      const std::size_t g = static_cast<std::size_t>(std::stoul(spec));
      if (g >= sm.size())
        throw ConfigError("template \"" + t + "\" references group " + spec +
                          " but pattern has " + std::to_string(sm.size() - 1));
      out += as_int ? std::to_string(std::stoll(sm[g].str())) : sm[g].str();
      i = close + 1;
    }
    return Match{out, rule.layout};
  }
  return std::nullopt;
}

TensorEntry transform_layout(const TensorEntry& e, const std::string& layout,
                             const std::string& name) {
  if (layout == "none") return e;
  if (layout == "squeeze") {
    TensorEntry out = e;
    out.shape.clear();
    for (i64 d : e.shape)
      if (d != 1) out.shape.push_back(d);
    if (out.shape.empty()) out.shape.push_back(1);
    return out;
  }
  if (layout == "hwio_to_oihw") {
    if (e.shape.size() != 4)
      throw ShapeError("tensor \"" + name + "\": hwio_to_oihw needs 4 dims, got " +
                       shape_str(e.shape));
    if (e.dtype != Dtype::kF32)
      throw IntegrityError("tensor \"" + name + "\": conv kernels must be f32");
    const i64 kh = e.shape[0], kw = e.shape[1], ci = e.shape[2], co = e.shape[3];
    TensorEntry out;
    out.dtype = Dtype::kF32;
    out.shape = {co, ci, kh, kw};
    out.data.resize(e.data.size());
    const float* src = reinterpret_cast<const float*>(e.data.data());
    float* dst = reinterpret_cast<float*>(out.data.data());
    for (i64 h = 0; h < kh; ++h)
      for (i64 w = 0; w < kw; ++w)
        for (i64 i = 0; i < ci; ++i)
          for (i64 o = 0; o < co; ++o)
            dst[((o * ci + i) * kh + h) * kw + w] = src[((h * kw + w) * ci + i) * co + o];
    return out;
  }
  throw ConfigError("unknown layout \"" + layout + "\"");
}

namespace {

bool has_native_magic(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("cannot open archive " + path);
  char magic[8] = {};
  f.read(magic, 8);
  return f && std::memcmp(magic, "SIMCKPT1", 8) == 0;
}

}  // namespace

Checkpoint load_archive(const std::string& path, const NameMap& map) {
  if (has_native_magic(path)) return load_checkpoint(path);

  const std::vector<NpzEntry> entries = read_npz(path);
  std::vector<std::string> unmatched;
  std::map<std::string, std::string> canonical_to_source;
  Checkpoint ckpt;
  for (const auto& e : entries) {
    const auto m = map.apply(e.name);
    if (!m) {
      unmatched.push_back(e.name);
      continue;
    }
    const auto clash = canonical_to_source.find(m->canonical);
    if (clash != canonical_to_source.end())
      throw IntegrityError("name map is not injective: \"" + e.name + "\" and \"" +
                           clash->second + "\" both map to \"" + m->canonical + "\"");
    canonical_to_source.emplace(m->canonical, e.name);
    TensorEntry te;
    te.dtype = e.dtype;
    te.shape = e.shape;
    te.data = e.data;
    ckpt.add(m->canonical, transform_layout(te, m->layout, m->canonical));
  }
  if (!unmatched.empty()) {
    std::string msg = "archive " + path + " has " + std::to_string(unmatched.size()) +
                      " tensor(s) unmatched by the name map:";
    for (const auto& n : unmatched) msg += "\n  " + n;
    throw IntegrityError(msg);
  }
  ckpt.meta["source"] = path;
  ckpt.meta["name_map"] = map.source_id();
  return ckpt;
}

}  // namespace sim::surgery
