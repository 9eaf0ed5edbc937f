// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

#include "dcr/errors.hpp"
#include "dcr/key_value.hpp"
#include "dcr/png_io.hpp"
#include "dcr/seed.hpp"
#include "dcr/synthetic.hpp"
#include "dcr/ten_io.hpp"

namespace dcr {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_list(KeyValue& kv, const std::string& key, const std::vector<std::string>& items) {
  kv.set(key + ".count", std::to_string(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) kv.set(key + "." + std::to_string(i), items[i]);
}

std::vector<std::string> read_list(const KeyValue& kv, const std::string& key) {
  std::vector<std::string> out;
  const std::int64_t n = kv.get_int(key + ".count", 0);
  for (std::int64_t i = 0; i < n; ++i) out.push_back(kv.require(key + "." + std::to_string(i)));
  return out;
}

// Packed 1 x 4 x H x W image from a source file, or an empty tensor and a
// reason when the file cannot be used.
Tensor load_source(const fs::path& path, std::int64_t multiple, std::string* reason) {
  Tensor mosaic;
  try {
    if (path.extension() == ".png") {
      mosaic = read_mosaic_png(path);
    } else {
      Tensor t = read_ten(path);
      if (t.shape().n == 1 && t.shape().c == kRawChannels) {
        // Already packed: crop on the mosaic grid.
        mosaic = unpack_bayer(t);
      } else if (t.shape().n == 1 && t.shape().c == 1) {
        mosaic = t;
      } else {
        *reason = "unsupported tensor shape " + t.shape().str();
        return {};
      }
    }
  } catch (const DataError& e) {
    *reason = e.what();
    return {};
  } catch (const ShapeError& e) {
    *reason = e.what();
    return {};
  }
  for (double v : mosaic.data()) {
    if (!std::isfinite(v)) {
      *reason = "non-finite value";
      return {};
    }
  }
  const Shape s = mosaic.shape();
  if (s.h < 2 * multiple || s.w < 2 * multiple) {
    *reason = "image " + std::to_string(s.h) + "x" + std::to_string(s.w) +
              " smaller than one " + std::to_string(2 * multiple) + " mosaic tile";
    return {};
  }
  return pack_bayer(center_crop(mosaic, 2 * multiple));
}

}  // namespace

Tensor center_crop(const Tensor& mosaic, std::int64_t multiple) {
  if (multiple < 2 || multiple % 2 != 0) {
    throw std::invalid_argument("center_crop: multiple must be even and >= 2");
  }
  const Shape s = mosaic.shape();
  if (s.n != 1 || s.c != 1) throw ShapeError("center_crop: expected 1 x 1 x H x W, got " + s.str());
  const std::int64_t h = s.h / multiple * multiple;
  const std::int64_t w = s.w / multiple * multiple;
  if (h == 0 || w == 0) throw ShapeError("center_crop: " + s.str() + " smaller than the multiple");
  // Even offsets keep the RGGB phase.
  const std::int64_t y0 = (s.h - h) / 4 * 2;
  const std::int64_t x0 = (s.w - w) / 4 * 2;
  Tensor out(Shape{1, 1, h, w}, 0.0);
  auto dst = out.mutable_data();
  const auto src = mosaic.data();
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      dst[static_cast<std::size_t>(y * w + x)] = src[static_cast<std::size_t>((y + y0) * s.w + x + x0)];
    }
  }
  return out;
}

std::vector<Tensor> tile_patches(const Tensor& packed, std::int64_t patch) {
  const Shape s = packed.shape();
  if (patch < 1) throw std::invalid_argument("tile_patches: patch must be >= 1");
  if (s.n != 1) throw ShapeError("tile_patches: expected a single image, got " + s.str());
  std::vector<Tensor> out;
  const auto src = packed.data();
  for (std::int64_t ty = 0; ty + patch <= s.h; ty += patch) {
    for (std::int64_t tx = 0; tx + patch <= s.w; tx += patch) {
      Tensor t(Shape{1, s.c, patch, patch}, 0.0);
      auto dst = t.mutable_data();
      for (std::int64_t c = 0; c < s.c; ++c) {
        for (std::int64_t y = 0; y < patch; ++y) {
          for (std::int64_t x = 0; x < patch; ++x) {
            dst[static_cast<std::size_t>((c * patch + y) * patch + x)] =
                src[static_cast<std::size_t>((c * s.h + ty + y) * s.w + tx + x)];
          }
        }
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

void DatasetManifest::write(const fs::path& path) const {
  KeyValue kv;
  kv.set("format_version", "1");
  kv.set("seed", std::to_string(seed));
  kv.set("patch", std::to_string(patch));
  kv.set("created", created);
  kv.set("noise", noise);
  kv.set("clamped", std::to_string(clamped));
  write_list(kv, "train", train);
  write_list(kv, "val", val);
  write_list(kv, "test", test);
  write_list(kv, "train_source", train_sources);
  write_list(kv, "val_source", val_sources);
  write_list(kv, "test_source", test_sources);
  write_list(kv, "skipped", skipped);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << kv.str();
}

DatasetManifest DatasetManifest::read(const fs::path& path) {
  const KeyValue kv = KeyValue::load(path);
  if (kv.get_int("format_version", -1) != 1) {
    throw DataError(path.string() + ": unsupported dataset manifest version");
  }
  DatasetManifest m;
  m.seed = kv.get_uint("seed", 0);
  m.patch = static_cast<int>(kv.get_int("patch", 0));
  m.created = kv.get_string("created", "");
  m.noise = kv.get_string("noise", "");
  m.clamped = static_cast<std::size_t>(kv.get_uint("clamped", 0));
  m.train = read_list(kv, "train");
  m.val = read_list(kv, "val");
  m.test = read_list(kv, "test");
  m.train_sources = read_list(kv, "train_source");
  m.val_sources = read_list(kv, "val_source");
  m.test_sources = read_list(kv, "test_source");
  m.skipped = read_list(kv, "skipped");
  return m;
}

DatasetManifest ingest_dataset(const fs::path& image_dir, const fs::path& out_dir,
                               const IngestOptions& options) {
  if (options.patch < 0 || options.patch % 4 != 0) {
    throw std::invalid_argument("ingest: patch must be a non-negative multiple of 4");
  }
  if (!(options.test_fraction >= 0.0 && options.val_fraction >= 0.0 &&
        options.test_fraction + options.val_fraction < 1.0)) {
    throw std::invalid_argument("ingest: split fractions must be >= 0 and sum below 1");
  }
  std::error_code ec;
  if (!fs::is_directory(image_dir, ec)) throw DataError("ingest: no such directory " + image_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(image_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".png" || ext == ".ten") files.push_back(entry.path());
  }
  if (files.empty()) throw DataError("ingest: no .png or .ten files in " + image_dir.string());
  std::sort(files.begin(), files.end());
  std::mt19937_64 rng(derive_seed(options.seed, {0x1A6E57ull}));
  std::shuffle(files.begin(), files.end(), rng);

  const auto n = static_cast<double>(files.size());
  const auto n_test = static_cast<std::size_t>(std::llround(n * options.test_fraction));
  const auto n_val = static_cast<std::size_t>(std::llround(n * options.val_fraction));

  DatasetManifest m;
  m.seed = options.seed;
  m.patch = options.patch;
  m.noise = options.noise;
  m.created = utc_now();
  for (const char* split : {"train", "val", "test"}) fs::create_directories(out_dir / split);

  const std::int64_t multiple = options.patch > 0 ? options.patch : 4;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const fs::path& f = files[i];
    const bool is_test = i < n_test;
    const bool is_val = !is_test && i < n_test + n_val;
    const std::string split = is_test ? "test" : (is_val ? "val" : "train");
    std::string reason;
    Tensor packed = load_source(f, multiple, &reason);
    if (!packed.defined()) {
      m.skipped.push_back(f.filename().string() + ": " + reason);
      continue;
    }
    m.clamped += clamp_unit(packed);
    std::vector<Tensor> patches;
    if (options.patch > 0) {
      patches = tile_patches(packed, options.patch);
    } else {
      patches.push_back(packed);
    }
    auto& list = is_test ? m.test : (is_val ? m.val : m.train);
    auto& sources = is_test ? m.test_sources : (is_val ? m.val_sources : m.train_sources);
    sources.push_back(f.filename().string());
    for (std::size_t k = 0; k < patches.size(); ++k) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_p%03zu.ten", k);
      const std::string rel = split + "/" + f.stem().string() + suffix;
      write_ten(out_dir / rel, patches[k]);
      list.push_back(rel);
    }
  }
  if (m.train.empty() && m.val.empty() && m.test.empty()) {
    throw DataError("ingest: every input file in " + image_dir.string() + " was skipped");
  }
  m.write(out_dir / "manifest.txt");
  return m;
}

std::vector<RawImage> load_raw_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DataError("no such directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ten") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawImage> out;
  for (const auto& f : files) {
    Tensor t = read_ten(f);
    try {
      check_raw_shape(t);
    } catch (const ShapeError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
    out.push_back({std::move(t), f.filename().string()});
  }
  return out;
}

void write_synthetic_pngs(const fs::path& dir, std::size_t count, std::int64_t height,
                          std::int64_t width, std::uint64_t seed) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < count; ++i) {
    const Tensor m = synthetic_mosaic(derive_seed(seed, {i}), height, width);
    GrayPng g;
    g.height = height;
    g.width = width;
    g.bit_depth = 16;
    g.pixels.resize(static_cast<std::size_t>(height * width));
    const auto v = m.data();
    for (std::size_t k = 0; k < v.size(); ++k) {
      g.pixels[k] = static_cast<std::uint16_t>(std::lround(v[k] * 65535.0));
    }
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03zu.png", i);
    write_gray_png(dir / name, g);
  }
}

}  // namespace dcr
