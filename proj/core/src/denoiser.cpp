// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/denoiser.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <stdexcept>
#include <string>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"

namespace dcr {

namespace {

constexpr int kKernel = 3;
// Output layer gain for OutputInit::kHe.
constexpr double kOutputGain = 0.1;

void expect_shape(const Tensor& t, const Shape& s, const std::string& name) {
  if (!t.defined() || t.shape() != s) {
    throw ShapeError("denoiser " + name + ": expected " + s.str() + ", got " +
                     (t.defined() ? t.shape().str() : std::string("<undefined>")));
  }
}

void expect_conv(const ConvLayer& l, std::int64_t cin, std::int64_t cout, const std::string& name) {
  expect_shape(l.weight, Shape{cout, cin, kKernel, kKernel}, name + ".weight");
  expect_shape(l.bias, Shape{1, cout, 1, 1}, name + ".bias");
}

std::int64_t output_inputs(const DenoiserConfig& c) {
  return c.width(0) + (c.input_skip ? (c.in_frames - 1) * c.frame_channels : 0);
}

}  // namespace

void DenoiserConfig::validate() const {
  if (in_frames < 1) throw std::invalid_argument("denoiser: in_frames must be >= 1");
  if (frame_channels < 1) throw std::invalid_argument("denoiser: frame_channels must be >= 1");
  if (base_width < 1) throw std::invalid_argument("denoiser: base_width must be >= 1");
  if (depth < 1) throw std::invalid_argument("denoiser: depth must be >= 1");
  if (depth > 8) throw std::invalid_argument("denoiser: depth must be <= 8");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw std::invalid_argument("denoiser: leaky_slope must lie in [0, 1)");
  }
}

std::vector<NamedTensor> DenoiserParams::named() const {
  std::vector<NamedTensor> out;
  for (std::size_t i = 0; i < encoder.size(); ++i) {
    out.push_back({"enc" + std::to_string(i) + ".weight", encoder[i].weight});
    out.push_back({"enc" + std::to_string(i) + ".bias", encoder[i].bias});
  }
  for (std::size_t i = 0; i < decoder.size(); ++i) {
    out.push_back({"dec" + std::to_string(i) + ".weight", decoder[i].weight});
    out.push_back({"dec" + std::to_string(i) + ".bias", decoder[i].bias});
  }
  out.push_back({"out.weight", output.weight});
  out.push_back({"out.bias", output.bias});
  return out;
}

DenoiserParams DenoiserParams::from_named(const std::vector<NamedTensor>& named,
                                          const DenoiserConfig& config) {
  auto find = [&](const std::string& name) {
    for (const auto& p : named) {
      if (p.name == name) return p.tensor;
    }
    throw DataError("denoiser params: missing tensor '" + name + "'");
  };
  DenoiserParams params;
  for (int i = 0; i <= config.depth; ++i) {
    params.encoder.push_back(
        {find("enc" + std::to_string(i) + ".weight"), find("enc" + std::to_string(i) + ".bias")});
  }
  for (int i = 0; i < config.depth; ++i) {
    params.decoder.push_back(
        {find("dec" + std::to_string(i) + ".weight"), find("dec" + std::to_string(i) + ".bias")});
  }
  params.output = {find("out.weight"), find("out.bias")};
  params.check(config);
  return params;
}

DenoiserParams DenoiserParams::clone() const {
  DenoiserParams out;
  for (const auto& l : encoder) out.encoder.push_back({l.weight.detach(), l.bias.detach()});
  for (const auto& l : decoder) out.decoder.push_back({l.weight.detach(), l.bias.detach()});
  out.output = {output.weight.detach(), output.bias.detach()};
  return out;
}

void DenoiserParams::check(const DenoiserConfig& config) const {
  config.validate();
  const auto depth = static_cast<std::size_t>(config.depth);
  if (encoder.size() != depth + 1 || decoder.size() != depth) {
    throw ShapeError("denoiser: layer count does not match depth " + std::to_string(depth));
  }
  expect_conv(encoder[0], config.in_frames * config.frame_channels, config.width(0), "enc0");
  for (int l = 1; l <= config.depth; ++l) {
    expect_conv(encoder[l], config.width(l - 1), config.width(l), "enc" + std::to_string(l));
  }
  for (int j = 0; j < config.depth; ++j) {
    const int l = config.depth - 1 - j;
    expect_conv(decoder[j], config.width(l + 1) + config.width(l), config.width(l),
                "dec" + std::to_string(j));
  }
  expect_conv(output, output_inputs(config), config.frame_channels, "out");
}

DenoiserParams init_denoiser(const DenoiserConfig& config, std::uint64_t seed,
                             OutputInit output_init) {
  config.validate();
  std::mt19937_64 rng(seed);
  DenoiserParams params;
  params.encoder.push_back(
      make_conv(config.in_frames * config.frame_channels, config.width(0), kKernel, rng));
  for (int l = 1; l <= config.depth; ++l) {
    params.encoder.push_back(make_conv(config.width(l - 1), config.width(l), kKernel, rng));
  }
  for (int j = 0; j < config.depth; ++j) {
    const int l = config.depth - 1 - j;
    params.decoder.push_back(
        make_conv(config.width(l + 1) + config.width(l), config.width(l), kKernel, rng));
  }
  params.output = make_conv(output_inputs(config), config.frame_channels, kKernel, rng, kOutputGain);
  if (output_init == OutputInit::kZero) {
    for (double& v : params.output.weight.mutable_data()) v = 0.0;
  }
  return params;
}

Tensor denoise_burst(std::span<const Tensor> frames, const DenoiserParams& params,
                     const DenoiserConfig& config) {
  config.validate();
  if (static_cast<int>(frames.size()) != config.in_frames) {
    throw ShapeError("denoise_burst: expected " + std::to_string(config.in_frames) +
                     " frames, got " + std::to_string(frames.size()));
  }
  const Shape s = frames[0].shape();
  for (const auto& f : frames) {
    if (!f.defined() || f.shape() != s) {
      throw ShapeError("denoise_burst: frame shapes differ (" + s.str() + " vs " +
                       (f.defined() ? f.shape().str() : std::string("<undefined>")) + ")");
    }
  }
  if (s.c != config.frame_channels) {
    throw ShapeError("denoise_burst: frames must have " + std::to_string(config.frame_channels) +
                     " channels, got " + s.str());
  }
  const std::int64_t step = std::int64_t{1} << config.depth;
  if (s.h % step != 0 || s.w % step != 0) {
    throw ShapeError("denoise_burst: spatial extents " + s.str() + " not divisible by " +
                     std::to_string(step));
  }

  const double slope = config.leaky_slope;
  std::vector<Tensor> skips;
  Tensor x = leaky_relu(apply(params.encoder[0], concat_channels(frames)), slope);
  skips.push_back(x);
  for (int l = 1; l <= config.depth; ++l) {
    x = leaky_relu(apply(params.encoder[l], x, 2), slope);
    skips.push_back(x);
  }
  for (int j = 0; j < config.depth; ++j) {
    const int l = config.depth - 1 - j;
    const std::array<Tensor, 2> parts{upsample_nearest2x(x), skips[static_cast<std::size_t>(l)]};
    x = leaky_relu(apply(params.decoder[j], concat_channels(parts)), slope);
  }
  const Tensor& center = frames[static_cast<std::size_t>(config.center_index())];
  if (config.input_skip && config.in_frames > 1) {
    std::vector<Tensor> parts{x};
    for (int k = 0; k < config.in_frames; ++k) {
      if (k != config.center_index()) parts.push_back(sub(frames[static_cast<std::size_t>(k)], center));
    }
    x = concat_channels(parts);
  }
  Tensor out = apply(params.output, x);
  if (config.residual) out = add(out, center);
  return out;
}

Tensor denoise_burst_inference(std::span<const Tensor> frames, const DenoiserParams& params,
                               const DenoiserConfig& config) {
  NoGradGuard no_grad;
  return clamp(denoise_burst(frames, params, config), 0.0, 1.0);
}

std::vector<Tensor> stream_window(std::span<const Tensor> frames, std::size_t position,
                                  int in_frames) {
  if (frames.empty()) throw std::invalid_argument("stream_window: no frames");
  const auto last = static_cast<std::int64_t>(frames.size()) - 1;
  const int half = in_frames / 2;
  std::vector<Tensor> window;
  for (int k = 0; k < in_frames; ++k) {
    std::int64_t idx = static_cast<std::int64_t>(position) - half + k;
    idx = std::clamp<std::int64_t>(idx, 0, last);
    window.push_back(frames[static_cast<std::size_t>(idx)]);
  }
  return window;
}

std::vector<Tensor> denoise_frame_stream(std::span<const Tensor> frames,
                                         const DenoiserParams& params,
                                         const DenoiserConfig& config) {
  if (frames.empty()) throw std::invalid_argument("denoise_frame_stream: no frames");
  std::vector<Tensor> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.push_back(denoise_burst_inference(stream_window(frames, i, config.in_frames), params,
                                          config));
  }
  return out;
}

}  // namespace dcr
