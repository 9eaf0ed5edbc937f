// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcr/nn.hpp"
#include "dcr/tensor.hpp"

namespace dcr {

/// Small U-shaped burst denoiser: `in_frames` packed RAW frames in, one out.
struct DenoiserConfig {
  int in_frames = 5;
  int frame_channels = 4;
  int base_width = 32;
  int depth = 2;  // number of stride-2 encoder levels
  double leaky_slope = 0.1;
  bool residual = true;  // predict a residual over the centre frame
  bool input_skip = true;  // also feed (frame - centre frame) differences to the output layer

  void validate() const;
  [[nodiscard]] int center_index() const { return in_frames / 2; }
  [[nodiscard]] int width(int level) const { return base_width << level; }
};

enum class OutputInit {
  kHe,    // He-normal with gain 0.1
  kZero,  // zero weights: residual identity at initialisation
};

/// Layer layout for depth D:
///   encoder[0]      frames -> w             stride 1
///   encoder[l]      w_{l-1} -> w_l          stride 2, l = 1..D
///   decoder[j]      w_{l+1} + w_l -> w_l    after 2x upsampling and concat, l = D-1-j
///   output          w_0 (+ (in_frames - 1) * frame_channels frame
///                   differences when input_skip) -> frame_channels
struct DenoiserParams {
  std::vector<ConvLayer> encoder;
  std::vector<ConvLayer> decoder;
  ConvLayer output;

  [[nodiscard]] std::vector<NamedTensor> named() const;
  static DenoiserParams from_named(const std::vector<NamedTensor>& named,
                                   const DenoiserConfig& config);
  [[nodiscard]] DenoiserParams clone() const;
  void check(const DenoiserConfig& config) const;
};

DenoiserParams init_denoiser(const DenoiserConfig& config, std::uint64_t seed,
                             OutputInit output_init = OutputInit::kZero);

/// Frames may carry a batch dimension (N x C x H x W each, all equal shapes).
/// Training-mode output: no clamp, so gradients flow everywhere.
Tensor denoise_burst(std::span<const Tensor> frames, const DenoiserParams& params,
                     const DenoiserConfig& config);

/// Inference: denoise_burst without graph recording, clamped to [0, 1].
Tensor denoise_burst_inference(std::span<const Tensor> frames, const DenoiserParams& params,
                               const DenoiserConfig& config);

/// One output per input position using a sliding window of in_frames frames
/// centred on that position, replicating the first/last frame at the edges.
std::vector<Tensor> denoise_frame_stream(std::span<const Tensor> frames,
                                         const DenoiserParams& params,
                                         const DenoiserConfig& config);

/// Window used by denoise_frame_stream for `position`.
std::vector<Tensor> stream_window(std::span<const Tensor> frames, std::size_t position,
                                  int in_frames);

}  // namespace dcr
