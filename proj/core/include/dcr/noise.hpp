// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcr/raw_image.hpp"

namespace dcr {

/// Parametric low-light sensor noise in the normalised [0, 1] RAW domain.
struct NoiseParams {
  double shot_gain = 0.0;   // variance of the signal-dependent term per unit signal
  double read_sigma = 0.0;  // std of signal-independent Gaussian noise
  double row_sigma = 0.0;   // std of a per-row offset shared by all channels
  double bias = 0.0;        // black-level error added before clipping
  int quant_bits = 0;       // 0 disables quantisation, otherwise 1..16
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on negative sigmas or bad quant_bits.
  void validate() const;

  /// "shot=..,read=..,row=..,bias=..,bits=..,seed=.." (any subset, any order).
  static NoiseParams parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

/// y = clip(quantize(x + n_shot + n_read + n_row + bias), 0, 1).
///
/// n_shot ~ N(0, shot_gain * x) per pixel is the Gaussian approximation of
/// Poisson shot noise; n_row is drawn once per image row and shared by every
/// pixel and channel of that row. Quantisation rounds to the nearest multiple
/// of 1 / (2^bits - 1). Identical (clean, params) give bit-identical output.
RawImage synthesize_noise(const RawImage& clean, const NoiseParams& params);

/// `count` independent noisy draws of one static clean frame; frame k uses
/// seed params.seed + k.
std::vector<RawImage> make_burst(const RawImage& clean, const NoiseParams& params, int count = 5);

}  // namespace dcr
