// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>

#include "dcr/tensor.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

enum class SimilarityVariant {
  kDistance,  // (1 - cos) + 2 * L1: zero for identical features
  kLiteral,   // cos + 2 * L1, as the formula is printed
};

enum class FeatureLossMode {
  kCloss,       // contrastive ratio over the five Wnet taps
  kL1Features,  // weighted L1 between anchor and positive taps only
};

struct LossConfig {
  double alpha = 0.1;
  std::array<double, kWnetStages> layer_weights{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0};
  SimilarityVariant variant = SimilarityVariant::kDistance;
  double eps_cos = 1e-12;
  double eps_ratio = 1e-7;
  FeatureLossMode feature_loss_mode = FeatureLossMode::kCloss;

  void validate() const;
};

std::string to_string(SimilarityVariant v);
std::string to_string(FeatureLossMode m);
SimilarityVariant parse_similarity_variant(const std::string& s);
FeatureLossMode parse_feature_loss_mode(const std::string& s);

/// Per-pixel cosine similarity over channels: N x C x H x W pair ->
/// N x 1 x H x W. Pixels where either vector's norm is below eps_cos get 0
/// (and zero gradient).
Tensor pixel_cosine(const Tensor& fx, const Tensor& fy, double eps_cos);

/// Similarity between two feature maps, one value per batch sample
/// (N x 1 x 1 x 1):
///   s = 1/(2HW) * sum_hw [ c_hw + 2 * mean_c |fx_hwc - fy_hwc| ]
/// with c_hw = cos(fx_hw, fy_hw) for the literal variant and 1 - cos for the
/// distance variant.
Tensor pixel_similarity(const Tensor& fx, const Tensor& fy, SimilarityVariant variant,
                        double eps_cos);

/// Contrastive loss over the five taps, averaged over the batch:
///   sum_i w_i * S(p_i, f_i) / (S(n_i, f_i) + eps_ratio)
/// with f the anchor (denoised), p the positive (clean) and n the negative
/// (noisy) pyramid.
Tensor closs(const FeaturePyramid& anchor, const FeaturePyramid& positive,
             const FeaturePyramid& negative, const LossConfig& config);

/// sum_i w_i * mean |f_i - p_i|.
Tensor l1_feature_loss(const FeaturePyramid& anchor, const FeaturePyramid& positive,
                       const LossConfig& config);

/// Mean squared difference of the deepest tap. Stand-in for a learned
/// perceptual metric, computed from pyramids that are already available.
Tensor perceptual_from_taps(const FeaturePyramid& denoised, const FeaturePyramid& clean);
Tensor perceptual_distance(const Tensor& denoised, const Tensor& clean, const FrozenWnet& wnet);

Tensor l1_loss(const Tensor& a, const Tensor& b);

struct LossBreakdown {
  Tensor total;
  double l1 = 0.0;
  double perceptual = 0.0;
  double feature = 0.0;  // Closs or feature-L1, before alpha
  double total_value = 0.0;
};

/// L1(denoised, clean) + perceptual(denoised, clean) + alpha * feature term.
/// `wnet` may be null only when alpha == 0; the perceptual and feature terms
/// are then 0.
LossBreakdown final_loss(const Tensor& denoised, const Tensor& clean, const Tensor& noisy_center,
                         const FrozenWnet* wnet, const LossConfig& config);

}  // namespace dcr
