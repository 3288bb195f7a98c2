// Copyright (c) 2026 simsurgeon authors
// SPDX-License-Identifier: Apache-2.0
#include "sim/data/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "sim/core/error.hpp"

namespace sim::data {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Tensor rows_to_chw(const std::vector<unsigned char>& rgb, i64 h, i64 w) {
  Tensor img({3, h, w});
  for (i64 y = 0; y < h; ++y)
    for (i64 x = 0; x < w; ++x)
      for (i64 c = 0; c < 3; ++c)
        img[(c * h + y) * w + x] =
            static_cast<float>(rgb[static_cast<std::size_t>((y * w + x) * 3 + c)]) / 255.0f;
  return img;
}

// ---- PNG ---------------------------------------------------------------------

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

Tensor decode_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open image " + path);

  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw DataError("libpng init failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw DataError("libpng init failed");

  std::vector<unsigned char> rgb;
  std::vector<png_bytep> rowptrs;
  if (setjmp(png_jmpbuf(g.png))) throw DataError("undecodable PNG " + path);

  png_init_io(g.png, f.get());
  png_read_info(g.png, g.info);
  png_set_palette_to_rgb(g.png);
  png_set_expand_gray_1_2_4_to_8(g.png);
  if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
  png_set_strip_16(g.png);
  png_set_gray_to_rgb(g.png);
  png_set_strip_alpha(g.png);
  png_read_update_info(g.png, g.info);

  const i64 w = png_get_image_width(g.png, g.info);
  const i64 h = png_get_image_height(g.png, g.info);
  if (png_get_channels(g.png, g.info) != 3)
    throw DataError("PNG " + path + " did not expand to RGB");

  rgb.resize(static_cast<std::size_t>(w * h * 3));
  rowptrs.resize(static_cast<std::size_t>(h));
  for (i64 y = 0; y < h; ++y) rowptrs[static_cast<std::size_t>(y)] = &rgb[static_cast<std::size_t>(y * w * 3)];
  png_read_image(g.png, rowptrs.data());
  png_read_end(g.png, nullptr);
  return rows_to_chw(rgb, h, w);
}

// ---- JPEG --------------------------------------------------------------------

struct JpegErr {
  jpeg_error_mgr mgr;
  std::jmp_buf setjmp_buffer;
};

void jpeg_err_exit(j_common_ptr cinfo) {
  JpegErr* err = reinterpret_cast<JpegErr*>(cinfo->err);
  std::longjmp(err->setjmp_buffer, 1);
}

Tensor decode_jpeg(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open image " + path);

  jpeg_decompress_struct cinfo;
  JpegErr jerr;
  cinfo.err = jpeg_std_error(&jerr.mgr);
  jerr.mgr.error_exit = jpeg_err_exit;

  std::vector<unsigned char> rgb;
  if (setjmp(jerr.setjmp_buffer)) {
    jpeg_destroy_decompress(&cinfo);
    throw DataError("undecodable JPEG " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const i64 w = cinfo.output_width;
  const i64 h = cinfo.output_height;
  rgb.resize(static_cast<std::size_t>(w * h * 3));
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = &rgb[static_cast<std::size_t>(cinfo.output_scanline) *
                              static_cast<std::size_t>(w * 3)];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return rows_to_chw(rgb, h, w);
}

// ---- PPM (P6) ------------------------------------------------------------------

Tensor decode_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open image " + path);
  std::string magic;
  f >> magic;
  if (magic != "P6") throw DataError(path + " is not a binary PPM");
  auto next_int = [&]() -> i64 {
    // skips whitespace and '#' comment lines
    while (true) {
      const int c = f.peek();
      if (c == EOF) break;
      if (c == '#') {
        std::string line;
        std::getline(f, line);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        f.get();
      } else {
        break;
      }
    }
    i64 v;
    f >> v;
    return v;
  };
  const i64 w = next_int(), h = next_int(), maxval = next_int();
  if (!f || w <= 0 || h <= 0 || maxval != 255)
    throw DataError("unsupported PPM header in " + path);
  f.get();  // single whitespace after maxval
  std::vector<unsigned char> rgb(static_cast<std::size_t>(w * h * 3));
  f.read(reinterpret_cast<char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!f) throw DataError("truncated PPM " + path);
  return rows_to_chw(rgb, h, w);
}

// ---- CIFAR-10 binary records ------------------------------------------------

constexpr i64 kCifarRecord = 3073;  // label byte + 3*1024 pixels

std::vector<unsigned char> read_cifar_record(const std::string& bin_path, i64 index) {
  std::ifstream f(bin_path, std::ios::binary);
  if (!f) throw DataError("cannot open CIFAR batch " + bin_path);
  f.seekg(0, std::ios::end);
  const i64 fsize = static_cast<i64>(f.tellg());
  if (fsize % kCifarRecord != 0)
    throw DataError(bin_path + " is not a CIFAR-10 binary batch (size " +
                    std::to_string(fsize) + ")");
  const i64 count = fsize / kCifarRecord;
  if (index < 0 || index >= count)
    throw DataError("CIFAR record " + std::to_string(index) + " out of range in " +
                    bin_path + " (" + std::to_string(count) + " records)");
  f.seekg(index * kCifarRecord);
  std::vector<unsigned char> rec(kCifarRecord);
  f.read(reinterpret_cast<char*>(rec.data()), kCifarRecord);
  if (!f) throw DataError("truncated CIFAR batch " + bin_path);
  return rec;
}

bool split_cifar_path(const std::string& path, std::string& bin, i64& index) {
  const auto hash = path.rfind('#');
  if (hash == std::string::npos) return false;
  bin = path.substr(0, hash);
  try {
    index = std::stoll(path.substr(hash + 1));
  } catch (...) {
    throw DataError("bad CIFAR record index in \"" + path + "\"");
  }
  return true;
}

Tensor decode_cifar(const std::string& bin_path, i64 index) {
  const std::vector<unsigned char> rec = read_cifar_record(bin_path, index);
  Tensor img({3, 32, 32});  // records store channel-planar R, G, B
  for (i64 i = 0; i < 3 * 1024; ++i)
    img[i] = static_cast<float>(rec[static_cast<std::size_t>(1 + i)]) / 255.0f;
  return img;
}

}  // namespace

i64 cifar_record_count(const std::string& bin_path) {
  std::ifstream f(bin_path, std::ios::binary);
  if (!f) throw DataError("cannot open CIFAR batch " + bin_path);
  f.seekg(0, std::ios::end);
  const i64 fsize = static_cast<i64>(f.tellg());
  if (fsize % kCifarRecord != 0)
    throw DataError(bin_path + " is not a CIFAR-10 binary batch");
  return fsize / kCifarRecord;
}

int cifar_record_label(const std::string& bin_path, i64 index) {
  return read_cifar_record(bin_path, index)[0];
}

Tensor decode_image(const std::string& path) {
  std::string bin;
  i64 index;
  if (split_cifar_path(path, bin, index)) return decode_cifar(bin, index);

  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open image " + path);
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  probe.close();
  if (sig[0] == 0x89 && sig[1] == 'P' && sig[2] == 'N' && sig[3] == 'G')
    return decode_png(path);
  if (sig[0] == 0xFF && sig[1] == 0xD8) return decode_jpeg(path);
  if (sig[0] == 'P' && sig[1] == '6') return decode_ppm(path);
  throw DataError("unrecognized image format: " + path);
}

Tensor bilinear_resize(const Tensor& img, i64 out_h, i64 out_w) {
  if (img.ndim() != 3) throw ShapeError("resize expects [C,H,W], got " + shape_str(img.shape()));
  const i64 C = img.dim(0), H = img.dim(1), W = img.dim(2);
  if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be positive");
  if (out_h == H && out_w == W) return img;
  Tensor out({C, out_h, out_w});
  // half-pixel centers (align_corners=false convention)
  const float sy = static_cast<float>(H) / static_cast<float>(out_h);
  const float sx = static_cast<float>(W) / static_cast<float>(out_w);
  for (i64 y = 0; y < out_h; ++y) {
    float fy = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
    fy = std::max(0.0f, std::min(fy, static_cast<float>(H - 1)));
    const i64 y0 = static_cast<i64>(fy);
    const i64 y1 = std::min(y0 + 1, H - 1);
    const float wy = fy - static_cast<float>(y0);
    for (i64 x = 0; x < out_w; ++x) {
      float fx = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
      fx = std::max(0.0f, std::min(fx, static_cast<float>(W - 1)));
      const i64 x0 = static_cast<i64>(fx);
      const i64 x1 = std::min(x0 + 1, W - 1);
      const float wx = fx - static_cast<float>(x0);
      for (i64 c = 0; c < C; ++c) {
        const float* p = img.data() + c * H * W;
        const float top = p[y0 * W + x0] * (1 - wx) + p[y0 * W + x1] * wx;
        const float bot = p[y1 * W + x0] * (1 - wx) + p[y1 * W + x1] * wx;
        out[(c * out_h + y) * out_w + x] = top * (1 - wy) + bot * wy;
      }
    }
  }
  return out;
}

void normalize_inplace(Tensor& img, const std::array<float, 3>& mean,
                       const std::array<float, 3>& stddev) {
  if (img.ndim() != 3 || img.dim(0) != 3)
    throw ShapeError("normalize expects [3,H,W], got " + shape_str(img.shape()));
  for (int c = 0; c < 3; ++c) {
    if (stddev[static_cast<std::size_t>(c)] <= 0)
      throw ConfigError("normalization std must be positive");
    const float m = mean[static_cast<std::size_t>(c)];
    const float inv = 1.0f / stddev[static_cast<std::size_t>(c)];
    float* p = img.data() + c * img.dim(1) * img.dim(2);
    for (i64 i = 0; i < img.dim(1) * img.dim(2); ++i) p[i] = (p[i] - m) * inv;
  }
}

Tensor load_image(const std::string& path, i64 target_size,
                  const std::array<float, 3>* mean, const std::array<float, 3>* stddev) {
  Tensor img = decode_image(path);
  img = bilinear_resize(img, target_size, target_size);
  if (mean && stddev) normalize_inplace(img, *mean, *stddev);
  return img;
}

std::vector<unsigned char> to_rgb8(const Tensor& img) {
  if (img.ndim() != 3 || img.dim(0) != 3)
    throw ShapeError("to_rgb8 expects [3,H,W], got " + shape_str(img.shape()));
  const i64 h = img.dim(1), w = img.dim(2);
  std::vector<unsigned char> rgb(static_cast<std::size_t>(h * w * 3));
  for (i64 y = 0; y < h; ++y)
    for (i64 x = 0; x < w; ++x)
      for (i64 c = 0; c < 3; ++c) {
        const float v = std::max(0.0f, std::min(1.0f, img[(c * h + y) * w + x]));
        rgb[static_cast<std::size_t>((y * w + x) * 3 + c)] =
            static_cast<unsigned char>(std::lround(v * 255.0f));
      }
  return rgb;
}

void write_png_rgb8(const std::string& path, i64 w, i64 h, const unsigned char* rgb) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("libpng init failed");
  }
  std::vector<png_bytep> rowptrs(static_cast<std::size_t>(h));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("PNG write failed for " + path);
  }
  png_init_io(png, f.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (i64 y = 0; y < h; ++y)
    rowptrs[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(rgb + static_cast<std::size_t>(y * w * 3));
  png_write_image(png, rowptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace sim::data
