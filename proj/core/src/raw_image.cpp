// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/raw_image.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcr/errors.hpp"

namespace dcr {

void check_raw_shape(const Tensor& t) {
  if (!t.defined()) throw ShapeError("raw image: undefined tensor");
  const Shape s = t.shape();
  if (s.n != 1 || s.c != kRawChannels) {
    throw ShapeError("raw image must be 1 x 4 x H x W, got " + s.str());
  }
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    throw ShapeError("raw image extents must be even, got " + s.str());
  }
}

void check_unit_range(const Tensor& t, const std::string& what) {
  auto v = t.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
      std::ostringstream os;
      os << what << ": value " << v[i] << " at index " << i << " outside [0, 1]";
      throw DataError(os.str());
    }
  }
}

std::size_t clamp_unit(Tensor& t) {
  std::size_t changed = 0;
  for (double& v : t.mutable_data()) {
    const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    if (c != v || std::isnan(v)) ++changed;
    v = c;
  }
  return changed;
}

Tensor pack_bayer(const Tensor& mosaic) {
  if (!mosaic.defined()) throw ShapeError("pack_bayer: undefined mosaic");
  const Shape s = mosaic.shape();
  if (s.c != 1) throw ShapeError("pack_bayer: mosaic must have 1 channel, got " + s.str());
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    throw ShapeError("pack_bayer: mosaic extents must be even, got " + s.str());
  }
  const Shape so{s.n, 4, s.h / 2, s.w / 2};
  Tensor out(so);
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t i = 0; i < so.h; ++i) {
      for (std::int64_t j = 0; j < so.w; ++j) {
        out.at(n, 0, i, j) = mosaic.at(n, 0, 2 * i, 2 * j);
        out.at(n, 1, i, j) = mosaic.at(n, 0, 2 * i, 2 * j + 1);
        out.at(n, 2, i, j) = mosaic.at(n, 0, 2 * i + 1, 2 * j);
        out.at(n, 3, i, j) = mosaic.at(n, 0, 2 * i + 1, 2 * j + 1);
      }
    }
  }
  return out;
}

Tensor unpack_bayer(const Tensor& packed) {
  if (!packed.defined()) throw ShapeError("unpack_bayer: undefined image");
  const Shape s = packed.shape();
  if (s.c != 4) throw ShapeError("unpack_bayer: expected 4 channels, got " + s.str());
  Tensor out(Shape{s.n, 1, 2 * s.h, 2 * s.w});
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t i = 0; i < s.h; ++i) {
      for (std::int64_t j = 0; j < s.w; ++j) {
        out.at(n, 0, 2 * i, 2 * j) = packed.at(n, 0, i, j);
        out.at(n, 0, 2 * i, 2 * j + 1) = packed.at(n, 1, i, j);
        out.at(n, 0, 2 * i + 1, 2 * j) = packed.at(n, 2, i, j);
        out.at(n, 0, 2 * i + 1, 2 * j + 1) = packed.at(n, 3, i, j);
      }
    }
  }
  return out;
}

}  // namespace dcr
