// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dcr {

/// Extents of a 4-D tensor in N, C, H, W order.
struct Shape {
  std::int64_t n = 1;
  std::int64_t c = 1;
  std::int64_t h = 1;
  std::int64_t w = 1;

  [[nodiscard]] std::int64_t numel() const { return n * c * h * w; }
  [[nodiscard]] std::int64_t plane() const { return h * w; }
  [[nodiscard]] bool is_scalar() const { return numel() == 1; }
  [[nodiscard]] std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Position of a node in a specific generation of the active graph.
struct NodeId {
  std::uint64_t generation = 0;
  std::size_t index = 0;
};

namespace detail {

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a gradient is accumulated
  bool requires_grad = false;
  std::optional<NodeId> node;

  std::span<double> grad_buffer();
};

}  // namespace detail

/// Dense N x C x H x W grid of doubles that can take part in reverse-mode
/// differentiation.
///
/// A Tensor is a handle: copies share the same storage and gradient. Use
/// clone() or detach() to obtain an independent value. Tensors produced by an
/// operation whose inputs require gradients are attached to the active Graph
/// until that graph is reset.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape) { return Tensor(shape, 0.0); }
  static Tensor ones(Shape shape) { return Tensor(shape, 1.0); }
  static Tensor full(Shape shape, double v) { return Tensor(shape, v); }
  static Tensor scalar(double v) { return Tensor(Shape{}, v); }
  /// 1 x 1 x 1 x values.size() row, handy for small literal tests.
  static Tensor row(std::vector<double> values);

  [[nodiscard]] bool defined() const { return impl_ != nullptr; }
  [[nodiscard]] const Shape& shape() const { return impl_->shape; }
  [[nodiscard]] std::int64_t numel() const { return impl_->shape.numel(); }

  [[nodiscard]] std::span<const double> data() const { return impl_->data; }
  /// Writable view of the values. Mutating a tensor that is already an input
  /// of a recorded node invalidates that node's backward pass.
  [[nodiscard]] std::span<double> mutable_data() { return impl_->data; }

  [[nodiscard]] double item() const;
  [[nodiscard]] double at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const;
  double& at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w);
  [[nodiscard]] std::int64_t offset(std::int64_t n, std::int64_t c, std::int64_t h,
                                    std::int64_t w) const;

  [[nodiscard]] bool requires_grad() const { return impl_->requires_grad; }
  /// Only valid on leaves (tensors not produced by a recorded operation).
  Tensor& set_requires_grad(bool on);

  [[nodiscard]] bool has_grad() const { return !impl_->grad.empty(); }
  /// Accumulated gradient; empty span when none has been accumulated.
  [[nodiscard]] std::span<const double> grad() const { return impl_->grad; }
  /// Gradient as a fresh tensor (zeros when none has been accumulated).
  [[nodiscard]] Tensor grad_tensor() const;
  void zero_grad();
  /// Drops the gradient buffer entirely.
  void clear_grad();

  [[nodiscard]] std::optional<NodeId> node_id() const { return impl_->node; }
  /// True unless the tensor was produced by an op in the live graph.
  [[nodiscard]] bool is_leaf() const;

  /// Independent copy of the values without gradient or graph attachment.
  [[nodiscard]] Tensor detach() const;
  [[nodiscard]] Tensor clone() const { return detach(); }

  /// True when both handles share storage.
  [[nodiscard]] bool same(const Tensor& other) const { return impl_ == other.impl_; }

  [[nodiscard]] const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Bitwise equality of shape and values.
bool identical(const Tensor& a, const Tensor& b);
/// Largest absolute elementwise difference; throws ShapeError on mismatch.
double max_abs_diff(const Tensor& a, const Tensor& b);
/// Sum of squares of all values.
double squared_norm(const Tensor& t);

}  // namespace dcr
