// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/surgery/checkpoint.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <memory>

#include "json.hpp"
#include "sim/core/error.hpp"

namespace sim::surgery {

using json = nlohmann::json;

std::size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::kF32: return 4;
    case Dtype::kF64: return 8;
    case Dtype::kI64: return 8;
    case Dtype::kI32: return 4;
    case Dtype::kU8: return 1;
  }
  throw IntegrityError("invalid dtype enum");
}

std::string dtype_name(Dtype d) {
  switch (d) {
    case Dtype::kF32: return "f32";
    case Dtype::kF64: return "f64";
    case Dtype::kI64: return "i64";
    case Dtype::kI32: return "i32";
    case Dtype::kU8: return "u8";
  }
  throw IntegrityError("invalid dtype enum");
}

Dtype dtype_from_name(const std::string& s) {
  if (s == "f32") return Dtype::kF32;
  if (s == "f64") return Dtype::kF64;
  if (s == "i64") return Dtype::kI64;
  if (s == "i32") return Dtype::kI32;
  if (s == "u8") return Dtype::kU8;
  throw IntegrityError("unknown dtype \"" + s + "\"");
}

TensorEntry TensorEntry::from_tensor(const Tensor& t) {
  TensorEntry e;
  e.dtype = Dtype::kF32;
  e.shape = t.shape();
  e.data.resize(static_cast<std::size_t>(t.numel()) * 4);
  std::memcpy(e.data.data(), t.data(), e.data.size());
  return e;
}

Tensor TensorEntry::to_tensor() const {
  if (dtype != Dtype::kF32)
    throw IntegrityError("tensor bridge expects f32, got " + dtype_name(dtype));
  Tensor t(shape);
  std::memcpy(t.data(), data.data(), data.size());
  return t;
}

void Checkpoint::add(std::string name, TensorEntry entry) {
  const std::size_t need = static_cast<std::size_t>(entry.numel()) * dtype_size(entry.dtype);
  if (entry.data.size() != need)
    throw IntegrityError("tensor \"" + name + "\": " + std::to_string(entry.data.size()) +
                         " bytes for shape " + shape_str(entry.shape));
  if (!entries_.emplace(name, std::move(entry)).second)
    throw IntegrityError("duplicate tensor name \"" + name + "\"");
  order_.push_back(std::move(name));
}

const TensorEntry& Checkpoint::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw IntegrityError("no tensor named \"" + name + "\"");
  return it->second;
}

TensorEntry& Checkpoint::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw IntegrityError("no tensor named \"" + name + "\"");
  return it->second;
}

namespace {

constexpr char kMagic[8] = {'S', 'I', 'M', 'C', 'K', 'P', 'T', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_all(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
  if (n != 0 && std::fwrite(p, 1, n, f) != n)
    throw IntegrityError("short write to " + path);
}

void read_all(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (n != 0 && std::fread(p, 1, n, f) != n)
    throw IntegrityError("truncated checkpoint " + path);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json header;
  header["format_version"] = 1;
  header["meta"] = ckpt.meta;
  json tensors = json::array();
  std::uint64_t offset = 0;
  std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
  for (const auto& name : ckpt.names()) {
    const TensorEntry& e = ckpt.at(name);
    tensors.push_back({{"name", name},
                       {"dtype", dtype_name(e.dtype)},
                       {"shape", e.shape},
                       {"offset", offset},
                       {"nbytes", e.data.size()}});
    offset += e.data.size();
    crc = static_cast<std::uint32_t>(
        crc32(crc, e.data.data(), static_cast<uInt>(e.data.size())));
  }
  header["tensors"] = std::move(tensors);
  header["payload_nbytes"] = offset;
  header["payload_crc32"] = crc;
  const std::string hs = header.dump();

  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IntegrityError("cannot open " + path + " for writing");
  write_all(f.get(), kMagic, sizeof(kMagic), path);
  const std::uint64_t hlen = hs.size();
  unsigned char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<unsigned char>(hlen >> (8 * i));
  write_all(f.get(), lenbuf, 8, path);
  write_all(f.get(), hs.data(), hs.size(), path);
  for (const auto& name : ckpt.names()) {
    const TensorEntry& e = ckpt.at(name);
    write_all(f.get(), e.data.data(), e.data.size(), path);
  }
  if (std::fflush(f.get()) != 0) throw IntegrityError("flush failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IntegrityError("cannot open checkpoint " + path);
  if (std::fseek(f.get(), 0, SEEK_END) != 0) throw IntegrityError("seek failed on " + path);
  const long fsize_l = std::ftell(f.get());
  if (fsize_l < 16) throw IntegrityError("file too small to be a checkpoint: " + path);
  const std::uint64_t fsize = static_cast<std::uint64_t>(fsize_l);
  std::rewind(f.get());

  char magic[8];
  read_all(f.get(), magic, 8, path);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw IntegrityError(path + " is not a native checkpoint (bad magic)");
  unsigned char lenbuf[8];
  read_all(f.get(), lenbuf, 8, path);
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i) hlen |= static_cast<std::uint64_t>(lenbuf[i]) << (8 * i);
  if (hlen > fsize - 16) throw IntegrityError("header length overruns file: " + path);

  std::string hs(hlen, '\0');
  read_all(f.get(), hs.data(), hlen, path);
  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    throw IntegrityError("corrupt checkpoint header in " + path + ": " + e.what());
  }
  if (!header.contains("format_version") || header["format_version"].get<int>() != 1)
    throw IntegrityError("unsupported checkpoint format_version in " + path);

  const std::uint64_t payload_nbytes = header.at("payload_nbytes").get<std::uint64_t>();
  if (16 + hlen + payload_nbytes != fsize)
    throw IntegrityError("payload size mismatch in " + path + " (truncated or padded)");

  std::vector<unsigned char> payload(payload_nbytes);
  read_all(f.get(), payload.data(), payload.size(), path);
  std::uint32_t crc = static_cast<std::uint32_t>(crc32(0L, Z_NULL, 0));
  crc = static_cast<std::uint32_t>(
      crc32(crc, payload.data(), static_cast<uInt>(payload.size())));
  if (crc != header.at("payload_crc32").get<std::uint32_t>())
    throw IntegrityError("payload checksum mismatch in " + path);

  Checkpoint ckpt;
  if (header.contains("meta"))
    ckpt.meta = header["meta"].get<std::map<std::string, std::string>>();
  for (const auto& t : header.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    TensorEntry e;
    e.dtype = dtype_from_name(t.at("dtype").get<std::string>());
    e.shape = t.at("shape").get<std::vector<i64>>();
    const std::uint64_t off = t.at("offset").get<std::uint64_t>();
    const std::uint64_t nbytes = t.at("nbytes").get<std::uint64_t>();
    if (off > payload_nbytes || nbytes > payload_nbytes - off)
      throw IntegrityError("tensor \"" + name + "\" offset overruns payload in " + path);
    const std::uint64_t need =
        static_cast<std::uint64_t>(shape_numel(e.shape)) * dtype_size(e.dtype);
    if (need != nbytes)
      throw IntegrityError("tensor \"" + name + "\" declares " + std::to_string(nbytes) +
                           " bytes but shape " + shape_str(e.shape) + " needs " +
                           std::to_string(need));
    e.data.assign(payload.begin() + static_cast<std::ptrdiff_t>(off),
                  payload.begin() + static_cast<std::ptrdiff_t>(off + nbytes));
    ckpt.add(name, std::move(e));
  }
  return ckpt;
}

}  // namespace sim::surgery
