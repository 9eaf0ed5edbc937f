// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dcr/raw_image.hpp"
#include "dcr/tensor.hpp"

namespace dcr {

struct GrayPng {
  std::int64_t height = 0;
  std::int64_t width = 0;
  int bit_depth = 8;               // 8 or 16
  std::vector<std::uint16_t> pixels;  // row-major
};

/// Reads an 8- or 16-bit single-channel PNG. Throws DataError for anything
/// else (palette, colour, alpha, sub-byte depths) or an unreadable file.
GrayPng read_gray_png(const std::filesystem::path& path);
void write_gray_png(const std::filesystem::path& path, const GrayPng& image);

/// 1 x 1 x H x W mosaic normalised by the bit depth maximum (255 or 65535).
Tensor read_mosaic_png(const std::filesystem::path& path);

/// 8-bit RGB rendering of a packed image: R, (G1 + G2) / 2, B per site,
/// clamped to [0, 1] and scaled with round-half-up.
struct RgbImage {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::uint8_t> pixels;  // RGBRGB...
  std::size_t clamped = 0;           // values that fell outside [0, 1]
};

/// Expects a 1 x 4 x H x W image. Throws DataError on non-finite values.
RgbImage render_rgb(const Tensor& packed);

/// Writes render_rgb(image) and returns the clamp warning count.
std::size_t to_png(const RawImage& image, const std::filesystem::path& path);

struct RgbPng {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::uint8_t> pixels;
};
RgbPng read_rgb_png(const std::filesystem::path& path);

}  // namespace dcr
