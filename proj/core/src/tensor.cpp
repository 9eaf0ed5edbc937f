// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"

namespace dcr {

std::string Shape::str() const {
  std::ostringstream os;
  os << n << "x" << c << "x" << h << "x" << w;
  return os.str();
}

namespace detail {

std::span<double> TensorImpl::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

}  // namespace detail

namespace {

void check_shape(const Shape& s) {
  if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
    throw ShapeError("tensor extents must be positive, got " + s.str());
  }
}

}  // namespace

Tensor::Tensor() = default;

Tensor::Tensor(Shape shape, double fill) : impl_(std::make_shared<detail::TensorImpl>()) {
  check_shape(shape);
  impl_->shape = shape;
  impl_->data.assign(static_cast<std::size_t>(shape.numel()), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : impl_(std::make_shared<detail::TensorImpl>()) {
  check_shape(shape);
  if (static_cast<std::int64_t>(values.size()) != shape.numel()) {
    throw ShapeError("tensor of shape " + shape.str() + " needs " +
                     std::to_string(shape.numel()) + " values, got " +
                     std::to_string(values.size()));
  }
  impl_->shape = shape;
  impl_->data = std::move(values);
}

Tensor Tensor::row(std::vector<double> values) {
  const auto n = static_cast<std::int64_t>(values.size());
  return Tensor(Shape{1, 1, 1, n}, std::move(values));
}

double Tensor::item() const {
  if (!impl_->shape.is_scalar()) {
    throw ShapeError("item() requires a single-element tensor, got " + impl_->shape.str());
  }
  return impl_->data[0];
}

std::int64_t Tensor::offset(std::int64_t n, std::int64_t c, std::int64_t h,
                            std::int64_t w) const {
  const Shape& s = impl_->shape;
  return ((n * s.c + c) * s.h + h) * s.w + w;
}

double Tensor::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) const {
  return impl_->data[static_cast<std::size_t>(offset(n, c, h, w))];
}

double& Tensor::at(std::int64_t n, std::int64_t c, std::int64_t h, std::int64_t w) {
  return impl_->data[static_cast<std::size_t>(offset(n, c, h, w))];
}

bool Tensor::is_leaf() const {
  return !impl_->node || impl_->node->generation != Graph::active().generation();
}

Tensor& Tensor::set_requires_grad(bool on) {
  if (!is_leaf()) throw GraphError("requires_grad can only be changed on leaf tensors");
  impl_->requires_grad = on;
  if (!on) impl_->grad.clear();
  return *this;
}

Tensor Tensor::grad_tensor() const {
  if (impl_->grad.empty()) return Tensor::zeros(impl_->shape);
  return Tensor(impl_->shape, impl_->grad);
}

void Tensor::zero_grad() {
  std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

void Tensor::clear_grad() {
  impl_->grad.clear();
  impl_->grad.shrink_to_fit();
}

Tensor Tensor::detach() const {
  return Tensor(impl_->shape, impl_->data);
}

bool identical(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  return std::memcmp(a.data().data(), b.data().data(),
                     a.data().size() * sizeof(double)) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("max_abs_diff: shapes " + a.shape().str() + " and " + b.shape().str());
  }
  double m = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

double squared_norm(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v * v;
  return s;
}

}  // namespace dcr
