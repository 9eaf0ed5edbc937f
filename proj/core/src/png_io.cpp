// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "dcr/errors.hpp"

namespace dcr {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw DataError("cannot open " + path.string());
  return f;
}

void on_error(png_structp png, png_const_charp) { std::longjmp(png_jmpbuf(png), 1); }
void on_warning(png_structp, png_const_charp) {}

struct Decoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> rows;  // tightly packed
  std::size_t row_bytes = 0;
};

Decoded decode(const fs::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
  if (png == nullptr) throw DataError("libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("libpng: out of memory");
  }
  Decoded d;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path.string() + ": corrupt PNG");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  d.width = png_get_image_width(png, info);
  d.height = png_get_image_height(png, info);
  d.bit_depth = png_get_bit_depth(png, info);
  d.color_type = png_get_color_type(png, info);
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
  png_read_update_info(png, info);
  d.row_bytes = png_get_rowbytes(png, info);
  d.rows.resize(d.row_bytes * d.height);
  row_ptrs.resize(d.height);
  for (png_uint_32 y = 0; y < d.height; ++y) row_ptrs[y] = d.rows.data() + y * d.row_bytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

void encode(const fs::path& path, png_uint_32 width, png_uint_32 height, int bit_depth,
            int color_type, const std::vector<std::uint8_t>& rows, std::size_t row_bytes) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_error, on_warning);
  if (png == nullptr) throw DataError("libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("libpng: out of memory");
  }
  std::vector<png_bytep> row_ptrs(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    row_ptrs[y] = const_cast<png_bytep>(rows.data() + y * row_bytes);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("cannot write PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw DataError("cannot write PNG " + path.string());
}

}  // namespace

GrayPng read_gray_png(const fs::path& path) {
  const Decoded d = decode(path);
  if (d.color_type != PNG_COLOR_TYPE_GRAY || (d.bit_depth != 8 && d.bit_depth != 16)) {
    throw DataError(path.string() + ": expected an 8- or 16-bit grayscale PNG (color type " +
                    std::to_string(d.color_type) + ", depth " + std::to_string(d.bit_depth) + ")");
  }
  GrayPng g;
  g.height = d.height;
  g.width = d.width;
  g.bit_depth = d.bit_depth;
  g.pixels.resize(static_cast<std::size_t>(d.width) * d.height);
  for (png_uint_32 y = 0; y < d.height; ++y) {
    const std::uint8_t* row = d.rows.data() + y * d.row_bytes;
    for (png_uint_32 x = 0; x < d.width; ++x) {
      g.pixels[static_cast<std::size_t>(y) * d.width + x] =
          d.bit_depth == 8 ? row[x]
                           : static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
    }
  }
  return g;
}

void write_gray_png(const fs::path& path, const GrayPng& image) {
  if (image.bit_depth != 8 && image.bit_depth != 16) {
    throw std::invalid_argument("write_gray_png: bit depth must be 8 or 16");
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.height * image.width)) {
    throw std::invalid_argument("write_gray_png: pixel count does not match extents");
  }
  const std::size_t bpp = image.bit_depth / 8;
  const std::size_t row_bytes = bpp * static_cast<std::size_t>(image.width);
  std::vector<std::uint8_t> rows(row_bytes * static_cast<std::size_t>(image.height));
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    if (bpp == 1) {
      rows[i] = static_cast<std::uint8_t>(std::min<std::uint16_t>(image.pixels[i], 255));
    } else {
      rows[2 * i] = static_cast<std::uint8_t>(image.pixels[i] >> 8);
      rows[2 * i + 1] = static_cast<std::uint8_t>(image.pixels[i] & 0xFF);
    }
  }
  encode(path, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
         image.bit_depth, PNG_COLOR_TYPE_GRAY, rows, row_bytes);
}

Tensor read_mosaic_png(const fs::path& path) {
  const GrayPng g = read_gray_png(path);
  const double max = g.bit_depth == 8 ? 255.0 : 65535.0;
  Tensor t(Shape{1, 1, g.height, g.width}, 0.0);
  auto out = t.mutable_data();
  for (std::size_t i = 0; i < g.pixels.size(); ++i) out[i] = g.pixels[i] / max;
  return t;
}

RgbImage render_rgb(const Tensor& packed) {
  check_raw_shape(packed);
  const Shape s = packed.shape();
  RgbImage img;
  img.height = s.h;
  img.width = s.w;
  img.pixels.resize(static_cast<std::size_t>(3 * s.h * s.w));
  const auto data = packed.data();
  const std::int64_t P = s.plane();
  // Each packed value outside [0, 1] counts as one clamp warning.
  const auto clamp_counted = [&](double v) {
    if (!std::isfinite(v)) throw DataError("to_png: non-finite value");
    if (v < 0.0 || v > 1.0) ++img.clamped;
    return std::clamp(v, 0.0, 1.0);
  };
  const auto to_byte = [](double v) { return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5)); };
  for (std::int64_t i = 0; i < P; ++i) {
    const double r = clamp_counted(data[static_cast<std::size_t>(i)]);
    const double g1 = clamp_counted(data[static_cast<std::size_t>(P + i)]);
    const double g2 = clamp_counted(data[static_cast<std::size_t>(2 * P + i)]);
    const double b = clamp_counted(data[static_cast<std::size_t>(3 * P + i)]);
    img.pixels[static_cast<std::size_t>(3 * i)] = to_byte(r);
    img.pixels[static_cast<std::size_t>(3 * i + 1)] = to_byte(0.5 * (g1 + g2));
    img.pixels[static_cast<std::size_t>(3 * i + 2)] = to_byte(b);
  }
  return img;
}

std::size_t to_png(const RawImage& image, const fs::path& path) {
  const RgbImage img = render_rgb(image.tensor);
  encode(path, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
         PNG_COLOR_TYPE_RGB, img.pixels, static_cast<std::size_t>(3 * img.width));
  return img.clamped;
}

RgbPng read_rgb_png(const fs::path& path) {
  const Decoded d = decode(path);
  if (d.color_type != PNG_COLOR_TYPE_RGB || d.bit_depth != 8) {
    throw DataError(path.string() + ": expected an 8-bit RGB PNG");
  }
  RgbPng img;
  img.height = d.height;
  img.width = d.width;
  img.pixels.resize(static_cast<std::size_t>(3) * d.width * d.height);
  for (png_uint_32 y = 0; y < d.height; ++y) {
    std::copy_n(d.rows.data() + y * d.row_bytes, 3 * d.width,
                img.pixels.data() + static_cast<std::size_t>(y) * 3 * d.width);
  }
  return img;
}

}  // namespace dcr
