// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "dcr/tensor.hpp"

namespace dcr {

/// One level of the orthonormal 2-D Haar transform. Each band has half the
/// spatial extent of the source and the same channel count.
///
/// For every 2x2 block [a b; c d] of every channel:
///   LL = (a + b + c + d) / 2
///   HL = (a - b + c - d) / 2   horizontal detail (differences across columns)
///   LH = (a + b - c - d) / 2   vertical detail (differences across rows)
///   HH = (a - b - c + d) / 2
struct WaveletBands {
  Tensor ll;
  Tensor hl;
  Tensor lh;
  Tensor hh;
};

/// Throws ShapeError for odd H or W.
WaveletBands haar_dwt2d(const Tensor& image);

/// Exact inverse of haar_dwt2d. Throws ShapeError if the bands disagree.
Tensor haar_idwt2d(const WaveletBands& bands);

/// N x C x H x W -> N x 3C x H/2 x W/2 holding HL, LH, HH (in that order)
/// along channels. LL is dropped.
Tensor highfreq_stack(const Tensor& image);

}  // namespace dcr
