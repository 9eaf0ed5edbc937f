// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dcr/tensor.hpp"

namespace dcr {

/// Parameter handle with a stable name, used by optimisers and checkpoints.
struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct ConvLayer {
  Tensor weight;  // Cout x Cin x k x k
  Tensor bias;    // 1 x Cout x 1 x 1

  [[nodiscard]] std::int64_t in_channels() const { return weight.shape().c; }
  [[nodiscard]] std::int64_t out_channels() const { return weight.shape().n; }
  [[nodiscard]] std::int64_t kernel() const { return weight.shape().h; }
};

/// He-normal weights (std = gain * sqrt(2 / fan_in)) and zero bias.
ConvLayer make_conv(std::int64_t cin, std::int64_t cout, std::int64_t k, std::mt19937_64& rng,
                    double gain = 1.0);

/// Same-padding convolution of `x` with `layer`.
Tensor apply(const ConvLayer& layer, const Tensor& x, int stride = 1);

void set_requires_grad(std::vector<NamedTensor>& params, bool on);
/// Throws NumericalError naming the first parameter with a non-finite value.
void check_finite(const std::vector<NamedTensor>& params);
/// Deep copy of a set of parameters.
std::vector<NamedTensor> clone(const std::vector<NamedTensor>& params);
/// True when names, shapes and values all match bit for bit.
bool identical(const std::vector<NamedTensor>& a, const std::vector<NamedTensor>& b);

}  // namespace dcr
