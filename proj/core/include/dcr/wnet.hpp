// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dcr/nn.hpp"
#include "dcr/noise.hpp"
#include "dcr/raw_image.hpp"
#include "dcr/tensor.hpp"

namespace dcr {

inline constexpr std::size_t kWnetStages = 5;

/// Feature embedding network: Haar high-frequency front end followed by five
/// conv + leaky-ReLU stages (stride 2 on stages 2 and 4), a global average
/// pool and a two-way linear head.
struct WnetConfig {
  int input_channels = 4;
  std::array<int, kWnetStages> stage_widths{16, 32, 64, 64, 64};
  int kernel_size = 3;
  double leaky_slope = 0.1;

  static constexpr std::array<int, kWnetStages> kStrides{1, 2, 1, 2, 1};

  void validate() const;
};

/// Activations tapped after each stage's activation; features[i] is G_{i+1}.
struct FeaturePyramid {
  std::array<Tensor, kWnetStages> features;

  [[nodiscard]] std::size_t size() const { return features.size(); }
  const Tensor& operator[](std::size_t i) const { return features[i]; }
};

struct WnetParams {
  std::array<ConvLayer, kWnetStages> stages;
  Tensor head_weight;  // 2 x width5 x 1 x 1
  Tensor head_bias;    // 1 x 2 x 1 x 1

  /// Handles sharing storage with this object, named stage<i>.weight,
  /// stage<i>.bias, head.weight, head.bias.
  [[nodiscard]] std::vector<NamedTensor> named() const;
  static WnetParams from_named(const std::vector<NamedTensor>& named, const WnetConfig& config);
  [[nodiscard]] WnetParams clone() const;
  /// Throws ShapeError if any tensor disagrees with `config`.
  void check(const WnetConfig& config) const;
};

struct WnetOutput {
  FeaturePyramid taps;
  Tensor logits;  // N x 2 x 1 x 1
};

WnetParams init_wnet(const WnetConfig& config, std::uint64_t seed);

/// Throws ShapeError when H or W is odd or below 8 (too small for the two
/// stride-2 stages after the wavelet halving).
WnetOutput wnet_forward(const Tensor& image, const WnetParams& params, const WnetConfig& config);

/// Pretrained Wnet used as a fixed feature extractor: parameters never
/// require gradients, so backward through its taps reaches only the images.
class FrozenWnet {
 public:
  FrozenWnet(const WnetParams& params, const WnetConfig& config);

  [[nodiscard]] FeaturePyramid features(const Tensor& image) const;
  [[nodiscard]] WnetOutput forward(const Tensor& image) const;

  [[nodiscard]] const WnetConfig& config() const { return config_; }
  [[nodiscard]] const WnetParams& params() const { return params_; }

 private:
  WnetParams params_;
  WnetConfig config_;
};

inline FrozenWnet freeze(const WnetParams& params, const WnetConfig& config) {
  return FrozenWnet(params, config);
}

// ---------------------------------------------------------------------------
// Binary clean (0) vs noisy (1) pretraining.

struct PretrainEpoch {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct PretrainOptions {
  int epochs = 20;
  int batch_size = 8;
  double lr = 1e-4;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  /// Draw new noisy counterparts every epoch; otherwise keep epoch 0's.
  bool fresh_noise_each_epoch = true;
  /// Stop once validation accuracy reaches this value.
  std::optional<double> stop_at_accuracy;
  std::function<void(const PretrainEpoch&)> on_epoch;
};

struct PretrainResult {
  WnetParams params;  // from the best validation epoch
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::vector<PretrainEpoch> curve;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
};

/// Trains a fresh Wnet (initialised from options.seed) to tell each clean
/// sample from a synthesised noisy counterpart with softmax cross-entropy.
/// Throws std::invalid_argument for an empty dataset or a split that leaves
/// either side empty, NumericalError (with epoch and step) on a non-finite
/// loss.
PretrainResult wnet_pretrain(std::span<const RawImage> clean_set, const NoiseParams& noise,
                             const WnetConfig& config, const PretrainOptions& options);

/// Fraction of samples whose argmax logit equals the label (ties -> class 0).
double classification_accuracy(const Tensor& logits, std::span<const int> labels);

}  // namespace dcr
