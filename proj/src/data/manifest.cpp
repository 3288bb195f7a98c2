// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sim/core/error.hpp"
#include "sim/core/rng.hpp"
#include "sim/data/image.hpp"

namespace sim::data {

namespace {

bool known_tag(const std::string& s) {
  return std::find(kSplitTags.begin(), kSplitTags.end(), s) != kSplitTags.end();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string fmt_float(float v) {
  std::ostringstream ss;
  ss.precision(9);
  ss << v;
  return ss.str();
}

}  // namespace

int Manifest::label_index(const std::string& label) const {
  const auto it = std::find(class_names.begin(), class_names.end(), label);
  if (it == class_names.end()) throw DataError("label \"" + label + "\" not in class list");
  return static_cast<int>(it - class_names.begin());
}

std::map<std::string, i64> Manifest::split_counts() const {
  std::map<std::string, i64> out;
  for (const auto& e : entries) ++out[e.split];
  return out;
}

std::map<std::string, i64> Manifest::class_counts(const std::string& split) const {
  std::map<std::string, i64> out;
  for (const auto& name : class_names) out[name] = 0;
  for (const auto& e : entries)
    if (split.empty() || e.split == split) ++out[e.label];
  return out;
}

std::vector<i64> Manifest::indices_of(const std::string& split) const {
  std::vector<i64> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].split == split) out.push_back(static_cast<i64>(i));
  return out;
}

void Manifest::validate(bool require_split_tags) const {
  std::set<std::string> classes(class_names.begin(), class_names.end());
  if (classes.size() != class_names.size()) throw DataError("duplicate class names");
  for (const auto& e : entries) {
    if (!classes.count(e.label))
      throw DataError("entry \"" + e.path + "\" has unknown label \"" + e.label + "\"");
    if (!known_tag(e.split) && !(e.split == "unassigned" && !require_split_tags))
      throw DataError("entry \"" + e.path + "\" has invalid split tag \"" + e.split + "\"");
  }
}

void Manifest::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write manifest " + path);
  f << "# simsurgeon-manifest v1\n";
  f << "# classes: " << join(class_names, ",") << "\n";
  if (has_stats) {
    f << "# mean: " << fmt_float(mean[0]) << "," << fmt_float(mean[1]) << ","
      << fmt_float(mean[2]) << "\n";
    f << "# std: " << fmt_float(stddev[0]) << "," << fmt_float(stddev[1]) << ","
      << fmt_float(stddev[2]) << "\n";
  }
  f << "path,label,split\n";
  for (const auto& e : entries) f << e.path << "," << e.label << "," << e.split << "\n";
  if (!f) throw DataError("write failed for manifest " + path);
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open manifest " + path);
  Manifest m;
  std::string line;
  bool saw_header = false;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto parse_triplet = [&](const std::string& body, std::array<float, 3>& out) {
        const auto vals = split_csv_line(body);
        if (vals.size() != 3)
          throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 values");
        for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(c)] = std::stof(vals[static_cast<std::size_t>(c)]);
      };
      if (line.rfind("# classes: ", 0) == 0) {
        m.class_names = split_csv_line(line.substr(11));
      } else if (line.rfind("# mean: ", 0) == 0) {
        parse_triplet(line.substr(8), m.mean);
        m.has_stats = true;
      } else if (line.rfind("# std: ", 0) == 0) {
        parse_triplet(line.substr(7), m.stddev);
        m.has_stats = true;
      }
      continue;
    }
    if (!saw_header) {
      if (line != "path,label,split")
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": expected header \"path,label,split\", got \"" + line + "\"");
      saw_header = true;
      continue;
    }
    const auto cols = split_csv_line(line);
    if (cols.size() != 3)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 columns, got " +
                      std::to_string(cols.size()));
    m.entries.push_back({cols[0], cols[1], cols[2]});
  }
  if (!saw_header) throw DataError(path + " has no manifest header row");
  if (m.class_names.empty()) throw DataError(path + " has no \"# classes:\" line");
  m.validate(false);
  return m;
}

void SplitSpec::validate() const {
  const auto fr = fractions();
  double sum = 0;
  for (double v : fr) {
    if (v < 0) throw ConfigError("split fractions must be non-negative");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ConfigError("split fractions sum to " + std::to_string(sum) + ", expected 1");
}

std::array<i64, 4> split_sizes(i64 n, const SplitSpec& spec) {
  spec.validate();
  const auto fr = spec.fractions();
  std::array<i64, 4> sizes{};
  i64 assigned = 0;
  for (int i = 0; i < 4; ++i) {
    sizes[static_cast<std::size_t>(i)] =
        static_cast<i64>(std::floor(fr[static_cast<std::size_t>(i)] * static_cast<double>(n)));
    assigned += sizes[static_cast<std::size_t>(i)];
  }
  sizes[0] += n - assigned;  // remainder goes to pretrain
  return sizes;
}

namespace {

void assign_shuffled(Manifest& m, const std::vector<i64>& indices,
                     const std::array<i64, 4>& sizes) {
  std::size_t at = 0;
  for (std::size_t s = 0; s < 4; ++s)
    for (i64 k = 0; k < sizes[s]; ++k)
      m.entries[static_cast<std::size_t>(indices[at++])].split = kSplitTags[s];
}

}  // namespace

Manifest build_splits(const Manifest& src, const SplitSpec& spec) {
  spec.validate();
  const i64 n = static_cast<i64>(src.entries.size());
  i64 nonzero_splits = 0;
  for (double v : spec.fractions())
    if (v > 0) ++nonzero_splits;
  if (n < nonzero_splits)
    throw DataError("dataset of " + std::to_string(n) + " entries cannot fill " +
                    std::to_string(nonzero_splits) + " splits");

  Manifest out = src;
  Rng rng(derive_seed(spec.seed, 0x5917));

  if (!spec.stratified) {
    std::vector<i64> indices(static_cast<std::size_t>(n));
    for (i64 i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
    rng.shuffle(indices);
    assign_shuffled(out, indices, split_sizes(n, spec));
  } else {
    for (const auto& cls : src.class_names) {
      std::vector<i64> indices;
      for (std::size_t i = 0; i < src.entries.size(); ++i)
        if (src.entries[i].label == cls) indices.push_back(static_cast<i64>(i));
      if (static_cast<i64>(indices.size()) < nonzero_splits)
        throw DataError("class \"" + cls + "\" has " + std::to_string(indices.size()) +
                        " samples, fewer than the " + std::to_string(nonzero_splits) +
                        " splits (stratified)");
      rng.shuffle(indices);
      assign_shuffled(out, indices, split_sizes(static_cast<i64>(indices.size()), spec));
    }
  }
  out.validate(true);
  return out;
}

void compute_stats(Manifest& m) {
  double sum[3] = {0, 0, 0}, sumsq[3] = {0, 0, 0};
  i64 count = 0;
  for (const auto& e : m.entries) {
    if (e.split != "pretrain") continue;
    const Tensor img = decode_image(e.path);
    const i64 hw = img.dim(1) * img.dim(2);
    for (int c = 0; c < 3; ++c) {
      const float* p = img.data() + c * hw;
      for (i64 i = 0; i < hw; ++i) {
        sum[c] += p[i];
        sumsq[c] += static_cast<double>(p[i]) * p[i];
      }
    }
    count += hw;
  }
  if (count == 0) throw DataError("no pretrain images to compute statistics from");
  for (int c = 0; c < 3; ++c) {
    const double mu = sum[c] / static_cast<double>(count);
    const double var = sumsq[c] / static_cast<double>(count) - mu * mu;
    m.mean[static_cast<std::size_t>(c)] = static_cast<float>(mu);
    m.stddev[static_cast<std::size_t>(c)] = static_cast<float>(std::sqrt(std::max(var, 1e-12)));
  }
  m.has_stats = true;
}

Manifest ingest_ham(const std::string& metadata_csv, const std::string& images_dir) {
  std::ifstream f(metadata_csv);
  if (!f) throw DataError("cannot open metadata " + metadata_csv);
  std::string line;
  if (!std::getline(f, line)) throw DataError(metadata_csv + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  i64 id_col = -1, dx_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "image_id") id_col = static_cast<i64>(i);
    if (header[i] == "dx") dx_col = static_cast<i64>(i);
  }
  if (id_col < 0 || dx_col < 0)
    throw DataError(metadata_csv + " lacks required columns image_id and dx");

  Manifest m;
  // the seven HAM10000 diagnosis codes, fixed order
  m.class_names = {"akiec", "bcc", "bkl", "df", "mel", "nv", "vasc"};
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (static_cast<i64>(cols.size()) <= std::max(id_col, dx_col))
      throw DataError(metadata_csv + ":" + std::to_string(lineno) + ": too few columns");
    const std::string& dx = cols[static_cast<std::size_t>(dx_col)];
    if (std::find(m.class_names.begin(), m.class_names.end(), dx) == m.class_names.end())
      throw DataError(metadata_csv + ":" + std::to_string(lineno) + ": unknown dx \"" + dx +
                      "\"");
    m.entries.push_back(
        {images_dir + "/" + cols[static_cast<std::size_t>(id_col)] + ".jpg", dx, "unassigned"});
  }
  if (m.entries.empty()) throw DataError(metadata_csv + " has no data rows");
  return m;
}

Manifest ingest_cifar(const std::vector<std::string>& bin_paths) {
  Manifest m;
  m.class_names = {"airplane", "automobile", "bird",  "cat",  "deer",
                   "dog",      "frog",       "horse", "ship", "truck"};
  for (const auto& path : bin_paths) {
    const i64 count = cifar_record_count(path);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open CIFAR batch " + path);
    for (i64 i = 0; i < count; ++i) {
      f.seekg(i * 3073);
      const int label = f.get();
      if (!f || label < 0 || label > 9)
        throw DataError(path + " record " + std::to_string(i) + " has label " +
                        std::to_string(label));
      m.entries.push_back({path + "#" + std::to_string(i),
                           m.class_names[static_cast<std::size_t>(label)], "unassigned"});
    }
  }
  if (m.entries.empty()) throw DataError("no CIFAR records found");
  return m;
}

}  // namespace sim::data
