// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "dcr/seed.hpp"

namespace dcr {

namespace {

using Rgb = std::array<double, 3>;

struct Shape2d {
  enum Kind { kRect, kDisc } kind;
  double cx, cy, rx, ry;
  Rgb color;
};

}  // namespace

Tensor synthetic_mosaic(std::uint64_t seed, std::int64_t height, std::int64_t width) {
  if (height < 2 || width < 2 || height % 2 != 0 || width % 2 != 0) {
    throw std::invalid_argument("synthetic_mosaic: extents must be even and >= 2");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto color = [&] { return Rgb{u(rng), u(rng), u(rng)}; };

  const Rgb base = color();
  const Rgb gx = {u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
  const Rgb gy = {u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};

  const int count = 3 + static_cast<int>(u(rng) * 4.0);
  std::vector<Shape2d> shapes;
  for (int i = 0; i < count; ++i) {
    Shape2d s{};
    s.kind = u(rng) < 0.5 ? Shape2d::kRect : Shape2d::kDisc;
    s.cx = u(rng);
    s.cy = u(rng);
    s.rx = 0.05 + 0.25 * u(rng);
    s.ry = 0.05 + 0.25 * u(rng);
    s.color = color();
    shapes.push_back(s);
  }
  const double tex_cx = u(rng);
  const double tex_cy = u(rng);
  const double tex_r = 0.15 + 0.2 * u(rng);
  const double tex_freq = 4.0 + 12.0 * u(rng);
  const double tex_angle = std::numbers::pi * u(rng);
  const double tex_amp = 0.1 + 0.2 * u(rng);

  Tensor out(Shape{1, 1, height, width}, 0.0);
  auto data = out.mutable_data();
  for (std::int64_t y = 0; y < height; ++y) {
    for (std::int64_t x = 0; x < width; ++x) {
      const double fx = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double fy = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      Rgb c;
      for (int k = 0; k < 3; ++k) c[k] = base[k] + gx[k] * (fx - 0.5) + gy[k] * (fy - 0.5);
      for (const auto& s : shapes) {
        const double dx = (fx - s.cx) / s.rx;
        const double dy = (fy - s.cy) / s.ry;
        const bool inside = s.kind == Shape2d::kRect ? (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0)
                                                     : (dx * dx + dy * dy <= 1.0);
        if (inside) c = s.color;
      }
      const double tx = fx - tex_cx;
      const double ty = fy - tex_cy;
      if (tx * tx + ty * ty <= tex_r * tex_r) {
        const double phase =
            2.0 * std::numbers::pi * tex_freq * (tx * std::cos(tex_angle) + ty * std::sin(tex_angle));
        const double t = tex_amp * std::sin(phase);
        for (int k = 0; k < 3; ++k) c[k] += t;
      }
      // RGGB: even row -> R G, odd row -> G B.
      const int channel = (y % 2 == 0) ? (x % 2 == 0 ? 0 : 1) : (x % 2 == 0 ? 1 : 2);
      data[static_cast<std::size_t>(y * width + x)] = std::clamp(c[channel], 0.02, 0.98);
    }
  }
  return out;
}

RawImage synthetic_scene(std::uint64_t seed, std::int64_t h, std::int64_t w) {
  return RawImage{pack_bayer(synthetic_mosaic(seed, 2 * h, 2 * w)),
                  "synthetic_" + std::to_string(seed)};
}

std::vector<RawImage> synthetic_set(std::size_t count, std::int64_t h, std::int64_t w,
                                    std::uint64_t seed) {
  std::vector<RawImage> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(synthetic_scene(derive_seed(seed, {i}), h, w));
  return out;
}

}  // namespace dcr
