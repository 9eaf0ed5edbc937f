// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/nn.hpp"

#include <cmath>

#include "dcr/errors.hpp"
#include "dcr/ops.hpp"

namespace dcr {

ConvLayer make_conv(std::int64_t cin, std::int64_t cout, std::int64_t k, std::mt19937_64& rng,
                    double gain) {
  ConvLayer layer{Tensor::zeros(Shape{cout, cin, k, k}), Tensor::zeros(Shape{1, cout, 1, 1})};
  const double std = gain * std::sqrt(2.0 / static_cast<double>(cin * k * k));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : layer.weight.mutable_data()) v = std * normal(rng);
  return layer;
}

Tensor apply(const ConvLayer& layer, const Tensor& x, int stride) {
  return conv2d(x, layer.weight, layer.bias, stride, static_cast<int>(layer.kernel() / 2));
}

void set_requires_grad(std::vector<NamedTensor>& params, bool on) {
  for (auto& p : params) p.tensor.set_requires_grad(on);
}

void check_finite(const std::vector<NamedTensor>& params) {
  for (const auto& p : params) {
    auto v = p.tensor.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) {
        throw NumericalError("parameter " + p.name + " has a non-finite value at index " +
                             std::to_string(i));
      }
    }
  }
}

std::vector<NamedTensor> clone(const std::vector<NamedTensor>& params) {
  std::vector<NamedTensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back({p.name, p.tensor.detach()});
  return out;
}

bool identical(const std::vector<NamedTensor>& a, const std::vector<NamedTensor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !identical(a[i].tensor, b[i].tensor)) return false;
  }
  return true;
}

}  // namespace dcr
