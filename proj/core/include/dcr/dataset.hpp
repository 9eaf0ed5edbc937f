// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dcr/raw_image.hpp"

namespace dcr {

struct IngestOptions {
  /// Packed patch extent (must be a multiple of 4). 0 keeps each whole image,
  /// centre-cropped to packed extents that are multiples of 4.
  int patch = 64;
  double test_fraction = 0.2;
  /// Carved out of the non-test files.
  double val_fraction = 0.0;
  std::uint64_t seed = 0;
  /// Recorded in the manifest only.
  std::string noise;
};

struct DatasetManifest {
  std::vector<std::string> train;  // patch files, relative to the output directory
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::vector<std::string> train_sources;
  std::vector<std::string> val_sources;
  std::vector<std::string> test_sources;
  std::vector<std::string> skipped;  // "file: reason"
  std::size_t clamped = 0;
  std::uint64_t seed = 0;
  int patch = 0;
  std::string noise;
  std::string created;  // UTC, ISO 8601

  void write(const std::filesystem::path& path) const;
  static DatasetManifest read(const std::filesystem::path& path);
};

/// Reads every *.png (8/16-bit grayscale mosaic) and *.ten (1x1x2Hx2W mosaic
/// or 1x4xHxW packed) file in `image_dir`, splits the files by a seeded
/// shuffle, and writes packed patches to out_dir/{train,val,test}/ plus
/// out_dir/manifest.txt. Unreadable or too-small files are skipped and
/// listed. Throws DataError when no input files exist or none survive.
DatasetManifest ingest_dataset(const std::filesystem::path& image_dir,
                               const std::filesystem::path& out_dir, const IngestOptions& options);

/// Centre crop of a 1 x 1 x H x W mosaic to extents that are multiples of
/// `multiple` (even).
Tensor center_crop(const Tensor& mosaic, std::int64_t multiple);

/// Non-overlapping patch x patch tiles of a packed image, row-major order.
std::vector<Tensor> tile_patches(const Tensor& packed, std::int64_t patch);

/// Every *.ten file in `dir` (sorted by name) as raw images.
std::vector<RawImage> load_raw_dir(const std::filesystem::path& dir);

/// Writes `count` synthetic 16-bit grayscale mosaics (mosaic extents
/// height x width) named scene_000.png, ... for use as an ingest source.
void write_synthetic_pngs(const std::filesystem::path& dir, std::size_t count,
                          std::int64_t height, std::int64_t width, std::uint64_t seed);

}  // namespace dcr
