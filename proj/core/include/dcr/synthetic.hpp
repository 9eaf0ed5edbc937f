// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dcr/raw_image.hpp"
#include "dcr/tensor.hpp"

namespace dcr {

/// Procedural RGB scene (colour gradient, a few rectangles and discs, one
/// sinusoidal texture patch) sampled through an RGGB colour filter array.
/// Returns a 1 x 1 x height x width mosaic with values in [0.02, 0.98].
/// `height` and `width` must be even.
Tensor synthetic_mosaic(std::uint64_t seed, std::int64_t height, std::int64_t width);

/// pack_bayer(synthetic_mosaic(seed, 2h, 2w)) with source_id "synthetic_<seed>".
RawImage synthetic_scene(std::uint64_t seed, std::int64_t h, std::int64_t w);

/// `count` scenes with seeds derived from `seed`.
std::vector<RawImage> synthetic_set(std::size_t count, std::int64_t h, std::int64_t w,
                                    std::uint64_t seed);

}  // namespace dcr
