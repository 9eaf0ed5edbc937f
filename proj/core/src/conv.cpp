// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

// conv2d via im2col + GEMM. The column buffer is rebuilt in backward rather
// than saved, trading one cheap gather for a K x P buffer per layer.

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"

namespace dcr {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

struct ConvGeometry {
  std::int64_t cin, h, w;
  std::int64_t cout, k;
  std::int64_t stride, pad;
  std::int64_t ho, wo;

  [[nodiscard]] std::int64_t rows() const { return cin * k * k; }
  [[nodiscard]] std::int64_t cols() const { return ho * wo; }
};

void im2col(const double* x, const ConvGeometry& g, double* col) {
  const std::int64_t P = g.cols();
  for (std::int64_t ci = 0; ci < g.cin; ++ci) {
    const double* plane = x + ci * g.h * g.w;
    for (std::int64_t kh = 0; kh < g.k; ++kh) {
      for (std::int64_t kw = 0; kw < g.k; ++kw) {
        double* dst = col + ((ci * g.k + kh) * g.k + kw) * P;
        for (std::int64_t oh = 0; oh < g.ho; ++oh) {
          const std::int64_t ih = oh * g.stride - g.pad + kh;
          double* row = dst + oh * g.wo;
          if (ih < 0 || ih >= g.h) {
            std::fill(row, row + g.wo, 0.0);
            continue;
          }
          const double* src = plane + ih * g.w;
          for (std::int64_t ow = 0; ow < g.wo; ++ow) {
            const std::int64_t iw = ow * g.stride - g.pad + kw;
            row[ow] = (iw >= 0 && iw < g.w) ? src[iw] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvGeometry& g, double* gx) {
  const std::int64_t P = g.cols();
  for (std::int64_t ci = 0; ci < g.cin; ++ci) {
    double* plane = gx + ci * g.h * g.w;
    for (std::int64_t kh = 0; kh < g.k; ++kh) {
      for (std::int64_t kw = 0; kw < g.k; ++kw) {
        const double* src = col + ((ci * g.k + kh) * g.k + kw) * P;
        for (std::int64_t oh = 0; oh < g.ho; ++oh) {
          const std::int64_t ih = oh * g.stride - g.pad + kh;
          if (ih < 0 || ih >= g.h) continue;
          double* dst = plane + ih * g.w;
          const double* row = src + oh * g.wo;
          for (std::int64_t ow = 0; ow < g.wo; ++ow) {
            const std::int64_t iw = ow * g.stride - g.pad + kw;
            if (iw >= 0 && iw < g.w) dst[iw] += row[ow];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding) {
  if (!input.defined() || !weight.defined()) throw ShapeError("conv2d: undefined operand");
  const Shape si = input.shape();
  const Shape sw = weight.shape();
  if (sw.h != sw.w) {
    throw ShapeError("conv2d: kernel must be square, got " + std::to_string(sw.h) + "x" +
                     std::to_string(sw.w));
  }
  if (sw.h % 2 == 0) throw ShapeError("conv2d: kernel size must be odd, got " + std::to_string(sw.h));
  if (sw.c != si.c) {
    throw ShapeError("conv2d: input channels " + std::to_string(si.c) +
                     " do not match weight input channels " + std::to_string(sw.c));
  }
  if (stride < 1) throw ShapeError("conv2d: stride must be >= 1");
  if (padding < 0) throw ShapeError("conv2d: padding must be >= 0");
  if (bias.defined() && bias.shape() != Shape{1, sw.n, 1, 1}) {
    throw ShapeError("conv2d: bias must be 1 x " + std::to_string(sw.n) + " x 1 x 1, got " +
                     bias.shape().str());
  }
  ConvGeometry g{si.c, si.h, si.w, sw.n, sw.h, stride, padding, 0, 0};
  const std::int64_t span_h = si.h + 2 * padding - g.k;
  const std::int64_t span_w = si.w + 2 * padding - g.k;
  if (span_h < 0) throw ShapeError("conv2d: input height smaller than kernel");
  if (span_w < 0) throw ShapeError("conv2d: input width smaller than kernel");
  g.ho = span_h / stride + 1;
  g.wo = span_w / stride + 1;

  const Shape so{si.n, g.cout, g.ho, g.wo};
  Tensor y(so);
  const std::int64_t K = g.rows();
  const std::int64_t P = g.cols();
  {
    std::vector<double> col(static_cast<std::size_t>(K * P));
    ConstMap W(weight.data().data(), g.cout, K);
    for (std::int64_t n = 0; n < si.n; ++n) {
      im2col(input.data().data() + n * si.c * si.h * si.w, g, col.data());
      Map Y(y.mutable_data().data() + n * g.cout * P, g.cout, P);
      Y.noalias() = W * ConstMap(col.data(), K, P);
      if (bias.defined()) {
        for (std::int64_t o = 0; o < g.cout; ++o) Y.row(o).array() += bias.data()[o];
      }
    }
  }

  const std::array<Tensor, 3> inputs{input, weight, bias};
  Graph::active().record(
      "conv2d", inputs, y,
      [xi = input.impl(), wi = weight.impl(), bi = bias.defined() ? bias.impl() : nullptr, g,
       batch = si.n](std::span<const double> grad) {
        const std::int64_t K = g.rows();
        const std::int64_t P = g.cols();
        const std::int64_t in_size = g.cin * g.h * g.w;
        std::vector<double> col(static_cast<std::size_t>(K * P));
        ConstMap W(wi->data.data(), g.cout, K);
        for (std::int64_t n = 0; n < batch; ++n) {
          ConstMap G(grad.data() + n * g.cout * P, g.cout, P);
          if (wi->requires_grad) {
            im2col(xi->data.data() + n * in_size, g, col.data());
            Map GW(wi->grad_buffer().data(), g.cout, K);
            GW.noalias() += G * ConstMap(col.data(), K, P).transpose();
          }
          if (bi && bi->requires_grad) {
            auto gb = bi->grad_buffer();
            for (std::int64_t o = 0; o < g.cout; ++o) gb[o] += G.row(o).sum();
          }
          if (xi->requires_grad) {
            Map C(col.data(), K, P);
            C.noalias() = W.transpose() * G;
            col2im_add(col.data(), g, xi->grad_buffer().data() + n * in_size);
          }
        }
      });
  return y;
}

}  // namespace dcr
