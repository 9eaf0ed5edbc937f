// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/wnet.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dcr/errors.hpp"
#include "dcr/ops.hpp"
#include "dcr/wavelet.hpp"

namespace dcr {

void WnetConfig::validate() const {
  if (input_channels < 1) throw std::invalid_argument("wnet: input_channels must be >= 1");
  for (int w : stage_widths) {
    if (w < 1) throw std::invalid_argument("wnet: stage widths must be >= 1");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("wnet: kernel_size must be odd and positive");
  }
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw std::invalid_argument("wnet: leaky_slope must lie in [0, 1)");
  }
}

std::vector<NamedTensor> WnetParams::named() const {
  std::vector<NamedTensor> out;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    const std::string prefix = "stage" + std::to_string(i + 1);
    out.push_back({prefix + ".weight", stages[i].weight});
    out.push_back({prefix + ".bias", stages[i].bias});
  }
  out.push_back({"head.weight", head_weight});
  out.push_back({"head.bias", head_bias});
  return out;
}

WnetParams WnetParams::from_named(const std::vector<NamedTensor>& named,
                                  const WnetConfig& config) {
  auto find = [&](const std::string& name) {
    for (const auto& p : named) {
      if (p.name == name) return p.tensor;
    }
    throw DataError("wnet params: missing tensor '" + name + "'");
  };
  WnetParams params;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    const std::string prefix = "stage" + std::to_string(i + 1);
    params.stages[i] = ConvLayer{find(prefix + ".weight"), find(prefix + ".bias")};
  }
  params.head_weight = find("head.weight");
  params.head_bias = find("head.bias");
  params.check(config);
  return params;
}

WnetParams WnetParams::clone() const {
  WnetParams out;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    out.stages[i] = ConvLayer{stages[i].weight.detach(), stages[i].bias.detach()};
  }
  out.head_weight = head_weight.detach();
  out.head_bias = head_bias.detach();
  return out;
}

void WnetParams::check(const WnetConfig& config) const {
  std::int64_t cin = 3LL * config.input_channels;
  const std::int64_t k = config.kernel_size;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    const std::int64_t cout = config.stage_widths[i];
    const std::string name = "stage" + std::to_string(i + 1);
    if (stages[i].weight.shape() != Shape{cout, cin, k, k}) {
      throw ShapeError("wnet " + name + ".weight: expected " + Shape{cout, cin, k, k}.str() +
                       ", got " + stages[i].weight.shape().str());
    }
    if (stages[i].bias.shape() != Shape{1, cout, 1, 1}) {
      throw ShapeError("wnet " + name + ".bias: expected " + Shape{1, cout, 1, 1}.str() +
                       ", got " + stages[i].bias.shape().str());
    }
    cin = cout;
  }
  if (head_weight.shape() != Shape{2, cin, 1, 1}) {
    throw ShapeError("wnet head.weight: expected " + Shape{2, cin, 1, 1}.str() + ", got " +
                     head_weight.shape().str());
  }
  if (head_bias.shape() != Shape{1, 2, 1, 1}) {
    throw ShapeError("wnet head.bias: expected 1x2x1x1, got " + head_bias.shape().str());
  }
}

WnetParams init_wnet(const WnetConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  WnetParams params;
  std::int64_t cin = 3LL * config.input_channels;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    params.stages[i] = make_conv(cin, config.stage_widths[i], config.kernel_size, rng);
    cin = config.stage_widths[i];
  }
  params.head_weight = Tensor::zeros(Shape{2, cin, 1, 1});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double std = std::sqrt(1.0 / static_cast<double>(cin));
  for (double& v : params.head_weight.mutable_data()) v = std * normal(rng);
  params.head_bias = Tensor::zeros(Shape{1, 2, 1, 1});
  return params;
}

WnetOutput wnet_forward(const Tensor& image, const WnetParams& params,
                        const WnetConfig& config) {
  if (!image.defined()) throw ShapeError("wnet_forward: undefined image");
  const Shape s = image.shape();
  if (s.c != config.input_channels) {
    throw ShapeError("wnet_forward: expected " + std::to_string(config.input_channels) +
                     " input channels, got " + std::to_string(s.c));
  }
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    throw ShapeError("wnet_forward: spatial extents must be even, got " + s.str());
  }
  if (s.h < 8 || s.w < 8) {
    throw ShapeError("wnet_forward: " + s.str() +
                     " is too small for two stride-2 stages after wavelet halving (need >= 8)");
  }
  WnetOutput out;
  Tensor x = highfreq_stack(image);
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    x = leaky_relu(apply(params.stages[i], x, WnetConfig::kStrides[i]), config.leaky_slope);
    out.taps.features[i] = x;
  }
  const Tensor pooled = mean(x, kAxisHW);
  out.logits = linear(pooled, params.head_weight, params.head_bias);
  return out;
}

FrozenWnet::FrozenWnet(const WnetParams& params, const WnetConfig& config)
    : params_(params.clone()), config_(config) {
  config_.validate();
  params_.check(config_);
  check_finite(params_.named());
}

FeaturePyramid FrozenWnet::features(const Tensor& image) const {
  return wnet_forward(image, params_, config_).taps;
}

WnetOutput FrozenWnet::forward(const Tensor& image) const {
  return wnet_forward(image, params_, config_);
}

double classification_accuracy(const Tensor& logits, std::span<const int> labels) {
  const auto z = logits.data();
  const std::size_t n = labels.size();
  if (n == 0 || z.size() != 2 * n) {
    throw ShapeError("classification_accuracy: logits/labels size mismatch");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int predicted = z[2 * i + 1] > z[2 * i] ? 1 : 0;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace dcr
