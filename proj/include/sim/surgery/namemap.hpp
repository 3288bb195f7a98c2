// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "sim/surgery/checkpoint.hpp"

namespace sim::surgery {

// Ordered source-name rewrite rules, shipped as versioned JSON data so new
// archive layouts need no code change. Each rule:
//   pattern   anchored ECMAScript regex over the source name
//   template  canonical name; {1}..{9} splice capture groups verbatim,
//             {int:1}..{int:9} splice them as integers (strips zero padding)
//   layout    "none" | "hwio_to_oihw" (transpose conv kernels from the
//             TF layout) | "squeeze" (drop broadcast 1-dims)
class NameMap {
 public:
  struct Rule {
    std::string pattern;
    std::string templ;
    std::string layout;
    std::regex re;
  };
  struct Match {
    std::string canonical;
    std::string layout;
  };

  static NameMap load(const std::string& path);
  static NameMap from_json_text(const std::string& text, const std::string& origin);

  // First matching rule wins; nullopt when nothing matches.
  std::optional<Match> apply(const std::string& source_name) const;

  const std::string& source_id() const { return source_id_; }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::string source_id_;
  std::vector<Rule> rules_;
};

// Layout transforms applied while ingesting foreign archives.
TensorEntry transform_layout(const TensorEntry& e, const std::string& layout,
                             const std::string& name);

// Loads a source archive into canonically named tensors. Native checkpoints
// (SIMCKPT1 magic) pass through unmapped; .npz archives are renamed through
// `map`, and any unmatched or colliding source names abort with a message
// listing every offender.
Checkpoint load_archive(const std::string& path, const NameMap& map);

}  // namespace sim::surgery
