// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dcr/key_value.hpp"

namespace dcr {

void NoiseParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("noise params: ") + name +
                                  " must be finite and >= 0");
    }
  };
  check(shot_gain, "shot_gain");
  check(read_sigma, "read_sigma");
  check(row_sigma, "row_sigma");
  if (!std::isfinite(bias)) throw std::invalid_argument("noise params: bias must be finite");
  if (quant_bits < 0 || quant_bits > 16) {
    throw std::invalid_argument("noise params: quant_bits must be 0 or in [1, 16]");
  }
}

NoiseParams NoiseParams::parse(const std::string& text) {
  NoiseParams p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("noise params: expected key=value, got '" + item + "'");
    }
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    auto number = [&]() {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) {
        throw std::invalid_argument("noise params: bad value for '" + key + "': " + value);
      }
      return v;
    };
    if (key == "shot" || key == "shot_gain") {
      p.shot_gain = number();
    } else if (key == "read" || key == "read_sigma") {
      p.read_sigma = number();
    } else if (key == "row" || key == "row_sigma") {
      p.row_sigma = number();
    } else if (key == "bias") {
      p.bias = number();
    } else if (key == "bits" || key == "quant_bits") {
      p.quant_bits = static_cast<int>(number());
    } else if (key == "seed") {
      try {
        p.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("noise params: bad value for 'seed': " + value);
      }
    } else {
      throw std::invalid_argument("noise params: unknown key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

std::string NoiseParams::str() const {
  return "shot=" + format_double(shot_gain) + ",read=" + format_double(read_sigma) +
         ",row=" + format_double(row_sigma) + ",bias=" + format_double(bias) +
         ",bits=" + std::to_string(quant_bits) + ",seed=" + std::to_string(seed);
}

RawImage synthesize_noise(const RawImage& clean, const NoiseParams& params) {
  params.validate();
  check_unit_range(clean.tensor, "synthesize_noise(" + clean.source_id + ")");
  const Shape s = clean.tensor.shape();

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> row_offset(static_cast<std::size_t>(s.n * s.h), 0.0);
  if (params.row_sigma > 0.0) {
    for (double& r : row_offset) r = params.row_sigma * normal(rng);
  }

  const double levels = params.quant_bits > 0 ? std::ldexp(1.0, params.quant_bits) - 1.0 : 0.0;
  Tensor out(s);
  auto x = clean.tensor.data();
  auto y = out.mutable_data();
  std::size_t i = 0;
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (std::int64_t c = 0; c < s.c; ++c) {
      for (std::int64_t h = 0; h < s.h; ++h) {
        const double row = row_offset[static_cast<std::size_t>(n * s.h + h)];
        for (std::int64_t w = 0; w < s.w; ++w, ++i) {
          double v = x[i];
          if (params.shot_gain > 0.0) v += std::sqrt(params.shot_gain * x[i]) * normal(rng);
          if (params.read_sigma > 0.0) v += params.read_sigma * normal(rng);
          v += row + params.bias;
          if (levels > 0.0) v = std::round(v * levels) / levels;
          y[i] = std::clamp(v, 0.0, 1.0);
        }
      }
    }
  }
  return RawImage{out, clean.source_id};
}

std::vector<RawImage> make_burst(const RawImage& clean, const NoiseParams& params, int count) {
  if (count < 1) throw std::invalid_argument("make_burst: count must be >= 1");
  std::vector<RawImage> frames;
  frames.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    NoiseParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(k);
    frames.push_back(synthesize_noise(clean, p));
  }
  return frames;
}

}  // namespace dcr
