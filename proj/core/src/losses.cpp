// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"

namespace dcr {

void LossConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("loss config: alpha must be finite and >= 0");
  }
  for (double w : layer_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("loss config: layer weights must be finite and > 0");
    }
  }
  if (!(eps_cos > 0.0)) throw std::invalid_argument("loss config: eps_cos must be > 0");
  if (!(eps_ratio > 0.0)) throw std::invalid_argument("loss config: eps_ratio must be > 0");
}

std::string to_string(SimilarityVariant v) {
  return v == SimilarityVariant::kDistance ? "distance" : "literal";
}

std::string to_string(FeatureLossMode m) {
  return m == FeatureLossMode::kCloss ? "closs" : "l1_features";
}

SimilarityVariant parse_similarity_variant(const std::string& s) {
  if (s == "distance") return SimilarityVariant::kDistance;
  if (s == "literal") return SimilarityVariant::kLiteral;
  throw std::invalid_argument("unknown similarity variant '" + s + "'");
}

FeatureLossMode parse_feature_loss_mode(const std::string& s) {
  if (s == "closs") return FeatureLossMode::kCloss;
  if (s == "l1_features") return FeatureLossMode::kL1Features;
  throw std::invalid_argument("unknown feature loss mode '" + s + "'");
}

Tensor pixel_cosine(const Tensor& fx, const Tensor& fy, double eps_cos) {
  if (!fx.defined() || !fy.defined()) throw ShapeError("pixel_cosine: undefined operand");
  if (fx.shape() != fy.shape()) {
    throw ShapeError("pixel_cosine: shapes differ (" + fx.shape().str() + " vs " +
                     fy.shape().str() + ")");
  }
  const Shape s = fx.shape();
  const std::int64_t P = s.plane();
  const Shape so{s.n, 1, s.h, s.w};
  Tensor y(so);
  // Per-pixel squared norms and dot product, kept for backward.
  std::vector<double> xx(static_cast<std::size_t>(so.numel()));
  std::vector<double> yy(xx.size());
  std::vector<double> xy(xx.size());
  {
    const double* X = fx.data().data();
    const double* Y = fy.data().data();
    for (std::int64_t n = 0; n < s.n; ++n) {
      for (std::int64_t c = 0; c < s.c; ++c) {
        const double* px = X + (n * s.c + c) * P;
        const double* py = Y + (n * s.c + c) * P;
        for (std::int64_t i = 0; i < P; ++i) {
          const auto k = static_cast<std::size_t>(n * P + i);
          xx[k] += px[i] * px[i];
          yy[k] += py[i] * py[i];
          xy[k] += px[i] * py[i];
        }
      }
    }
    auto out = y.mutable_data();
    for (std::size_t k = 0; k < out.size(); ++k) {
      const bool degenerate = std::sqrt(xx[k]) < eps_cos || std::sqrt(yy[k]) < eps_cos;
      out[k] = degenerate ? 0.0 : xy[k] / std::sqrt(xx[k] * yy[k]);
    }
  }
  const std::array<Tensor, 2> inputs{fx, fy};
  Graph::active().record(
      "pixel_cosine", inputs, y,
      [xi = fx.impl(), yi = fy.impl(), out = y.impl().get(), xx = std::move(xx),
       yy = std::move(yy), s, P, eps_cos](std::span<const double> g) {
        const double* X = xi->data.data();
        const double* Y = yi->data.data();
        double* GX = xi->requires_grad ? xi->grad_buffer().data() : nullptr;
        double* GY = yi->requires_grad ? yi->grad_buffer().data() : nullptr;
        for (std::int64_t n = 0; n < s.n; ++n) {
          for (std::int64_t i = 0; i < P; ++i) {
            const auto k = static_cast<std::size_t>(n * P + i);
            if (std::sqrt(xx[k]) < eps_cos || std::sqrt(yy[k]) < eps_cos) continue;
            const double inv = 1.0 / std::sqrt(xx[k] * yy[k]);
            const double cosv = out->data[k];
            const double gk = g[k];
            for (std::int64_t c = 0; c < s.c; ++c) {
              const auto e = static_cast<std::size_t>((n * s.c + c) * P + i);
              if (GX) GX[e] += gk * (Y[e] * inv - cosv * X[e] / xx[k]);
              if (GY) GY[e] += gk * (X[e] * inv - cosv * Y[e] / yy[k]);
            }
          }
        }
      });
  return y;
}

Tensor pixel_similarity(const Tensor& fx, const Tensor& fy, SimilarityVariant variant,
                        double eps_cos) {
  if (fx.shape() != fy.shape()) {
    throw ShapeError("pixel_similarity: shapes differ (" + fx.shape().str() + " vs " +
                     fy.shape().str() + ")");
  }
  Tensor cos_term = pixel_cosine(fx, fy, eps_cos);
  if (variant == SimilarityVariant::kDistance) cos_term = add_scalar(scale(cos_term, -1.0), 1.0);
  const Tensor l1 = mean(abs(sub(fx, fy)), kAxisC);
  return scale(mean(add(cos_term, scale(l1, 2.0)), kAxisHW), 0.5);
}

namespace {

void check_pyramids(const FeaturePyramid& a, const FeaturePyramid& b, const char* what) {
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    if (!a[i].defined() || !b[i].defined()) {
      throw ShapeError(std::string(what) + ": pyramid layer " + std::to_string(i + 1) +
                       " is undefined");
    }
    if (a[i].shape() != b[i].shape()) {
      throw ShapeError(std::string(what) + ": layer " + std::to_string(i + 1) + " shapes differ (" +
                       a[i].shape().str() + " vs " + b[i].shape().str() + ")");
    }
  }
}

}  // namespace

Tensor closs(const FeaturePyramid& anchor, const FeaturePyramid& positive,
             const FeaturePyramid& negative, const LossConfig& config) {
  config.validate();
  check_pyramids(anchor, positive, "closs");
  check_pyramids(anchor, negative, "closs");
  Tensor total;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    const Tensor sp = pixel_similarity(positive[i], anchor[i], config.variant, config.eps_cos);
    const Tensor sn = pixel_similarity(negative[i], anchor[i], config.variant, config.eps_cos);
    const Tensor term = scale(div(sp, add_scalar(sn, config.eps_ratio)), config.layer_weights[i]);
    total = total.defined() ? add(total, term) : term;
  }
  return mean(total);
}

Tensor l1_feature_loss(const FeaturePyramid& anchor, const FeaturePyramid& positive,
                       const LossConfig& config) {
  config.validate();
  check_pyramids(anchor, positive, "l1_feature_loss");
  Tensor total;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    const Tensor term = scale(l1_loss(anchor[i], positive[i]), config.layer_weights[i]);
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

Tensor perceptual_from_taps(const FeaturePyramid& denoised, const FeaturePyramid& clean) {
  const Tensor& a = denoised[kWnetStages - 1];
  const Tensor& b = clean[kWnetStages - 1];
  if (a.shape() != b.shape()) {
    throw ShapeError("perceptual_distance: tap shapes differ (" + a.shape().str() + " vs " +
                     b.shape().str() + ")");
  }
  return mean(square(sub(a, b)));
}

Tensor perceptual_distance(const Tensor& denoised, const Tensor& clean, const FrozenWnet& wnet) {
  if (denoised.shape() != clean.shape()) {
    throw ShapeError("perceptual_distance: image shapes differ (" + denoised.shape().str() +
                     " vs " + clean.shape().str() + ")");
  }
  return perceptual_from_taps(wnet.features(denoised), wnet.features(clean));
}

Tensor l1_loss(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("l1_loss: shapes differ (" + a.shape().str() + " vs " + b.shape().str() +
                     ")");
  }
  return mean(abs(sub(a, b)));
}

LossBreakdown final_loss(const Tensor& denoised, const Tensor& clean, const Tensor& noisy_center,
                         const FrozenWnet* wnet, const LossConfig& config) {
  config.validate();
  if (denoised.shape() != clean.shape() || denoised.shape() != noisy_center.shape()) {
    throw ShapeError("final_loss: shapes differ (denoised " + denoised.shape().str() +
                     ", clean " + clean.shape().str() + ", noisy " + noisy_center.shape().str() +
                     ")");
  }
  if (wnet == nullptr && config.alpha != 0.0) {
    throw std::invalid_argument("final_loss: a frozen Wnet is required when alpha > 0");
  }
  LossBreakdown out;
  const Tensor l1 = l1_loss(denoised, clean);
  Tensor total = l1;
  Tensor feature;
  if (wnet != nullptr) {
    const FeaturePyramid f = wnet->features(denoised);
    const FeaturePyramid p = wnet->features(clean);
    const Tensor perceptual = perceptual_from_taps(f, p);
    if (config.feature_loss_mode == FeatureLossMode::kCloss) {
      feature = closs(f, p, wnet->features(noisy_center), config);
    } else {
      feature = l1_feature_loss(f, p, config);
    }
    total = add(add(l1, perceptual), scale(feature, config.alpha));
    out.perceptual = perceptual.item();
    out.feature = feature.item();
  }
  out.l1 = l1.item();
  out.total = total;
  out.total_value = total.item();
  return out;
}

}  // namespace dcr
