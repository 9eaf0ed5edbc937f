// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "dcr/tensor.hpp"

namespace dcr {

// Elementwise binary operations. Operands must match exactly in H and W; an
// extent of 1 in N or C broadcasts against the other operand.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }

// Elementwise unary operations.
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);
/// Backward uses sign(x) with sign(0) = 0.
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sqrt(const Tensor& x);
/// Gradient passes where lo <= x <= hi.
Tensor clamp(const Tensor& x, double lo, double hi);
/// x for x >= 0, slope * x otherwise; the derivative at 0 is 1.
Tensor leaky_relu(const Tensor& x, double slope);

/// Bitmask of axes for reductions. Reduced axes keep extent 1.
enum Axis : unsigned {
  kAxisN = 1u,
  kAxisC = 2u,
  kAxisH = 4u,
  kAxisW = 8u,
  kAxisHW = kAxisH | kAxisW,
  kAxisCHW = kAxisC | kAxisH | kAxisW,
  kAxisAll = kAxisN | kAxisC | kAxisH | kAxisW,
};

Tensor sum(const Tensor& x, unsigned axes = kAxisAll);
Tensor mean(const Tensor& x, unsigned axes = kAxisAll);

/// 2-D cross-correlation. weight is Cout x Cin x k x k with k odd, bias is
/// 1 x Cout x 1 x 1 (or undefined for no bias). Output extent per spatial
/// axis is floor((H + 2 * padding - k) / stride) + 1.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding);

/// y = W x + b per batch row, where x is the flattened C*H*W features of each
/// sample. weight is Dout x D x 1 x 1, bias is 1 x Dout x 1 x 1. The result is
/// N x Dout x 1 x 1.
Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias);

/// Mean over the batch of -log softmax(logits)[label]. logits is N x 2 x 1 x 1
/// and every label is 0 or 1.
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

Tensor concat_channels(std::span<const Tensor> parts);
Tensor concat_batch(std::span<const Tensor> parts);
Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count);
Tensor slice_batch(const Tensor& x, std::int64_t begin, std::int64_t count);
/// Nearest-neighbour 2x upsampling of H and W.
Tensor upsample_nearest2x(const Tensor& x);

}  // namespace dcr
