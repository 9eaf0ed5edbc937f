// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "dcr/tensor.hpp"

namespace dcr {

/// Packed-Bayer RAW frame: a 1 x 4 x H x W tensor in [0, 1] with channel order
/// R, G1, G2, B taken from an RGGB mosaic.
struct RawImage {
  Tensor tensor;
  std::string source_id;

  [[nodiscard]] const Shape& shape() const { return tensor.shape(); }
};

inline constexpr std::int64_t kRawChannels = 4;

/// Throws ShapeError unless `t` is 1 x 4 x H x W with even H and W.
void check_raw_shape(const Tensor& t);

/// Throws DataError naming the first value outside [0, 1].
void check_unit_range(const Tensor& t, const std::string& what);

/// Clamps to [0, 1] in place and returns how many values were changed.
std::size_t clamp_unit(Tensor& t);

/// 1 x 1 x 2H x 2W RGGB mosaic -> 1 x 4 x H x W packed image. Within each
/// 2x2 site the top-left pixel is R, top-right G1, bottom-left G2,
/// bottom-right B.
Tensor pack_bayer(const Tensor& mosaic);
Tensor unpack_bayer(const Tensor& packed);

}  // namespace dcr
