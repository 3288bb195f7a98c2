// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/surgery/npz.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "sim/core/error.hpp"

namespace sim::surgery {

namespace {

std::uint16_t rd16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t rd32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("cannot open archive " + path);
  f.seekg(0, std::ios::end);
  const std::streamoff n = f.tellg();
  f.seekg(0);
  std::vector<unsigned char> buf(static_cast<std::size_t>(n));
  if (n > 0) f.read(reinterpret_cast<char*>(buf.data()), n);
  if (!f) throw IntegrityError("read failed on " + path);
  return buf;
}

std::vector<unsigned char> inflate_raw(const unsigned char* src, std::size_t srcn,
                                       std::size_t dstn, const std::string& what) {
  std::vector<unsigned char> out(dstn);
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw IntegrityError("zlib init failed");
  zs.next_in = const_cast<Bytef*>(src);
  zs.avail_in = static_cast<uInt>(srcn);
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(dstn);
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != dstn)
    throw IntegrityError("deflate stream corrupt in " + what);
  return out;
}

// Parses an .npy member (magic, version, dict header, raw data).
NpzEntry parse_npy(const std::string& name, const unsigned char* p, std::size_t n) {
  static const unsigned char magic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
  if (n < 10 || std::memcmp(p, magic, 6) != 0)
    throw IntegrityError("member \"" + name + "\" is not an .npy array");
  const int major = p[6];
  std::size_t hlen, hoff;
  if (major == 1) {
    hlen = rd16(p + 8);
    hoff = 10;
  } else if (major == 2 || major == 3) {
    if (n < 12) throw IntegrityError("truncated .npy header in \"" + name + "\"");
    hlen = rd32(p + 8);
    hoff = 12;
  } else {
    throw IntegrityError("unsupported .npy version in \"" + name + "\"");
  }
  if (hoff + hlen > n) throw IntegrityError("truncated .npy header in \"" + name + "\"");
  const std::string header(reinterpret_cast<const char*>(p + hoff), hlen);

  auto field = [&](const std::string& key) -> std::string {
    const auto kpos = header.find("'" + key + "'");
    if (kpos == std::string::npos)
      throw IntegrityError(".npy header of \"" + name + "\" lacks '" + key + "'");
    auto c = header.find(':', kpos);
    if (c == std::string::npos) throw IntegrityError("malformed .npy header in \"" + name + "\"");
    ++c;
    while (c < header.size() && header[c] == ' ') ++c;
    return header.substr(c);
  };

  NpzEntry e;
  e.name = name;

  std::string descr = field("descr");
  if (descr.empty() || descr[0] != '\'')
    throw IntegrityError("malformed descr in \"" + name + "\"");
  descr = descr.substr(1, descr.find('\'', 1) - 1);
  if (descr == "<f4") e.dtype = Dtype::kF32;
  else if (descr == "<f8") e.dtype = Dtype::kF64;
  else if (descr == "<i8") e.dtype = Dtype::kI64;
  else if (descr == "<i4") e.dtype = Dtype::kI32;
  else if (descr == "|u1" || descr == "<u1") e.dtype = Dtype::kU8;
  else throw IntegrityError("unsupported .npy dtype \"" + descr + "\" in \"" + name + "\"");

  const std::string fortran = field("fortran_order");
  if (fortran.rfind("False", 0) != 0)
    throw IntegrityError("fortran-order array \"" + name + "\" unsupported");

  std::string sh = field("shape");
  if (sh.empty() || sh[0] != '(')
    throw IntegrityError("malformed shape in \"" + name + "\"");
  sh = sh.substr(1, sh.find(')', 1) - 1);
  for (std::size_t i = 0; i < sh.size();) {
    while (i < sh.size() && (sh[i] == ' ' || sh[i] == ',')) ++i;
    if (i >= sh.size()) break;
    std::size_t j = i;
    while (j < sh.size() && sh[j] >= '0' && sh[j] <= '9') ++j;
    if (j == i) throw IntegrityError("malformed shape in \"" + name + "\"");
    e.shape.push_back(std::stoll(sh.substr(i, j - i)));
    i = j;
  }

  const std::size_t need = static_cast<std::size_t>(shape_numel(e.shape)) * dtype_size(e.dtype);
  if (hoff + hlen + need != n)
    throw IntegrityError("member \"" + name + "\": payload is " +
                         std::to_string(n - hoff - hlen) + " bytes, shape " +
                         shape_str(e.shape) + " needs " + std::to_string(need));
  e.data.assign(p + hoff + hlen, p + n);
  return e;
}

std::string strip_npy(const std::string& member) {
  if (member.size() > 4 && member.compare(member.size() - 4, 4, ".npy") == 0)
    return member.substr(0, member.size() - 4);
  return member;
}

}  // namespace

std::vector<NpzEntry> read_npz(const std::string& path) {
  const std::vector<unsigned char> buf = read_file(path);
  if (buf.size() < 22) throw IntegrityError(path + " is too small to be a zip archive");

  // end-of-central-directory record: scan back past any trailing comment
  std::size_t eocd = std::string::npos;
  const std::size_t lo = buf.size() >= 22 + 65535 ? buf.size() - 22 - 65535 : 0;
  for (std::size_t i = buf.size() - 22 + 1; i-- > lo;) {
    if (buf[i] == 'P' && buf[i + 1] == 'K' && buf[i + 2] == 5 && buf[i + 3] == 6) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos)
    throw IntegrityError("no zip end-of-central-directory in " + path);
  const std::uint16_t n_entries = rd16(&buf[eocd + 10]);
  const std::uint32_t cd_size = rd32(&buf[eocd + 12]);
  const std::uint32_t cd_off = rd32(&buf[eocd + 16]);
  if (n_entries == 0xFFFF || cd_off == 0xFFFFFFFFu)
    throw IntegrityError("zip64 archive unsupported: " + path);
  if (static_cast<std::size_t>(cd_off) + cd_size > buf.size())
    throw IntegrityError("central directory overruns " + path);

  std::vector<NpzEntry> out;
  std::size_t p = cd_off;
  for (int k = 0; k < n_entries; ++k) {
    if (p + 46 > buf.size() || rd32(&buf[p]) != 0x02014b50u)
      throw IntegrityError("corrupt central directory in " + path);
    const std::uint16_t method = rd16(&buf[p + 10]);
    const std::uint32_t csize = rd32(&buf[p + 20]);
    const std::uint32_t usize = rd32(&buf[p + 24]);
    const std::uint16_t namelen = rd16(&buf[p + 28]);
    const std::uint16_t extralen = rd16(&buf[p + 30]);
    const std::uint16_t commentlen = rd16(&buf[p + 32]);
    const std::uint32_t lho = rd32(&buf[p + 42]);
    if (csize == 0xFFFFFFFFu || usize == 0xFFFFFFFFu || lho == 0xFFFFFFFFu)
      throw IntegrityError("zip64 member unsupported in " + path);
    const std::string member(reinterpret_cast<const char*>(&buf[p + 46]), namelen);
    p += 46 + namelen + extralen + commentlen;

    if (lho + 30 > buf.size() || rd32(&buf[lho]) != 0x04034b50u)
      throw IntegrityError("corrupt local header for \"" + member + "\" in " + path);
    const std::uint16_t lnamelen = rd16(&buf[lho + 26]);
    const std::uint16_t lextralen = rd16(&buf[lho + 28]);
    const std::size_t data_off = lho + 30 + lnamelen + lextralen;
    if (data_off + csize > buf.size())
      throw IntegrityError("member \"" + member + "\" truncated in " + path);

    std::vector<unsigned char> raw;
    if (method == 0) {
      if (csize != usize)
        throw IntegrityError("stored member \"" + member + "\" size mismatch in " + path);
      raw.assign(buf.begin() + static_cast<std::ptrdiff_t>(data_off),
                 buf.begin() + static_cast<std::ptrdiff_t>(data_off + csize));
    } else if (method == 8) {
      raw = inflate_raw(&buf[data_off], csize, usize, member);
    } else {
      throw IntegrityError("unsupported compression method " + std::to_string(method) +
                           " for \"" + member + "\"");
    }
    out.push_back(parse_npy(strip_npy(member), raw.data(), raw.size()));
  }
  return out;
}

namespace {

void wr16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>(v >> 8));
}
void wr32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::string npy_descr(Dtype d) {
  switch (d) {
    case Dtype::kF32: return "<f4";
    case Dtype::kF64: return "<f8";
    case Dtype::kI64: return "<i8";
    case Dtype::kI32: return "<i4";
    case Dtype::kU8: return "|u1";
  }
  throw IntegrityError("invalid dtype enum");
}

std::vector<unsigned char> make_npy(const NpzEntry& e) {
  std::string dict = "{'descr': '" + npy_descr(e.dtype) + "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < e.shape.size(); ++i)
    dict += std::to_string(e.shape[i]) + (e.shape.size() == 1 ? "," : (i + 1 < e.shape.size() ? ", " : ""));
  dict += "), }";
  // pad to a 64-byte boundary, newline-terminated, per the npy convention
  std::size_t total = 10 + dict.size() + 1;
  dict.append((64 - total % 64) % 64, ' ');
  dict += '\n';

  std::vector<unsigned char> out = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
  wr16(out, static_cast<std::uint16_t>(dict.size()));
  out.insert(out.end(), dict.begin(), dict.end());
  out.insert(out.end(), e.data.begin(), e.data.end());
  return out;
}

}  // namespace

void write_npz(const std::string& path, const std::vector<NpzEntry>& entries) {
  std::vector<unsigned char> file, cdir;
  for (const auto& e : entries) {
    const std::vector<unsigned char> npy = make_npy(e);
    const std::string member = e.name + ".npy";
    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), npy.data(), static_cast<uInt>(npy.size())));
    const std::uint32_t off = static_cast<std::uint32_t>(file.size());

    wr32(file, 0x04034b50u);
    wr16(file, 20);  // version needed
    wr16(file, 0);   // flags
    wr16(file, 0);   // method: stored
    wr16(file, 0);   // time
    wr16(file, 0);   // date
    wr32(file, crc);
    wr32(file, static_cast<std::uint32_t>(npy.size()));
    wr32(file, static_cast<std::uint32_t>(npy.size()));
    wr16(file, static_cast<std::uint16_t>(member.size()));
    wr16(file, 0);  // extra
    file.insert(file.end(), member.begin(), member.end());
    file.insert(file.end(), npy.begin(), npy.end());

    wr32(cdir, 0x02014b50u);
    wr16(cdir, 20);  // version made by
    wr16(cdir, 20);  // version needed
    wr16(cdir, 0);
    wr16(cdir, 0);
    wr16(cdir, 0);
    wr16(cdir, 0);
    wr32(cdir, crc);
    wr32(cdir, static_cast<std::uint32_t>(npy.size()));
    wr32(cdir, static_cast<std::uint32_t>(npy.size()));
    wr16(cdir, static_cast<std::uint16_t>(member.size()));
    wr16(cdir, 0);  // extra
    wr16(cdir, 0);  // comment
    wr16(cdir, 0);  // disk
    wr16(cdir, 0);  // internal attrs
    wr32(cdir, 0);  // external attrs
    wr32(cdir, off);
    cdir.insert(cdir.end(), member.begin(), member.end());
  }
  const std::uint32_t cd_off = static_cast<std::uint32_t>(file.size());
  file.insert(file.end(), cdir.begin(), cdir.end());
  wr32(file, 0x06054b50u);
  wr16(file, 0);
  wr16(file, 0);
  wr16(file, static_cast<std::uint16_t>(entries.size()));
  wr16(file, static_cast<std::uint16_t>(entries.size()));
  wr32(file, static_cast<std::uint32_t>(cdir.size()));
  wr32(file, cd_off);
  wr16(file, 0);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IntegrityError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
  if (!f) throw IntegrityError("write failed on " + path);
}

}  // namespace sim::surgery
