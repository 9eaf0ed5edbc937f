// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dcr/nn.hpp"

namespace dcr {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed list of parameters.
class Adam {
 public:
  Adam(std::vector<NamedTensor> params, AdamOptions options);

  /// m <- b1 m + (1 - b1) g;  v <- b2 v + (1 - b2) g^2;
  /// p <- p - lr * m_hat / (sqrt(v_hat) + eps).
  /// Throws GraphError for a parameter without a gradient and NumericalError
  /// for a non-finite gradient; parameters are untouched in both cases.
  void step();

  /// Drops every parameter's gradient.
  void zero_grad();

  [[nodiscard]] std::int64_t t() const { return t_; }
  [[nodiscard]] const AdamOptions& options() const { return options_; }
  [[nodiscard]] const std::vector<NamedTensor>& params() const { return params_; }
  [[nodiscard]] const std::vector<Tensor>& first_moments() const { return m_; }
  [[nodiscard]] const std::vector<Tensor>& second_moments() const { return v_; }

  /// Restores optimiser state; shapes must match the parameters.
  void restore(std::int64_t t, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  std::vector<NamedTensor> params_;
  AdamOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

/// Rescales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_grad_norm(const std::vector<NamedTensor>& params, double max_norm);

}  // namespace dcr
