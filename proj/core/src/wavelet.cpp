// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/wavelet.hpp"

#include <array>
#include <string>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"

namespace dcr {

namespace {

// Signs applied to (a, b, c, d) of each 2x2 block, per band.
using Pattern = std::array<double, 4>;
constexpr Pattern kLL{+1, +1, +1, +1};
constexpr Pattern kHL{+1, -1, +1, -1};
constexpr Pattern kLH{+1, +1, -1, -1};
constexpr Pattern kHH{+1, -1, -1, +1};

void check_even(const Shape& s) {
  if (s.h % 2 != 0) throw ShapeError("haar_dwt2d: odd height " + std::to_string(s.h));
  if (s.w % 2 != 0) throw ShapeError("haar_dwt2d: odd width " + std::to_string(s.w));
}

Tensor band(const char* tag, const Tensor& x, const Pattern& p) {
  const Shape si = x.shape();
  const Shape so{si.n, si.c, si.h / 2, si.w / 2};
  Tensor y(so);
  {
    const double* X = x.data().data();
    double* Y = y.mutable_data().data();
    for (std::int64_t plane = 0; plane < si.n * si.c; ++plane) {
      const double* src = X + plane * si.h * si.w;
      double* dst = Y + plane * so.h * so.w;
      for (std::int64_t i = 0; i < so.h; ++i) {
        const double* top = src + 2 * i * si.w;
        const double* bot = top + si.w;
        for (std::int64_t j = 0; j < so.w; ++j) {
          const double a = top[2 * j], b = top[2 * j + 1];
          const double c = bot[2 * j], d = bot[2 * j + 1];
          dst[i * so.w + j] = 0.5 * (p[0] * a + p[1] * b + p[2] * c + p[3] * d);
        }
      }
    }
  }
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record(tag, inputs, y, [xi = x.impl(), si, so, p](std::span<const double> g) {
    if (!xi->requires_grad) return;
    double* GX = xi->grad_buffer().data();
    for (std::int64_t plane = 0; plane < si.n * si.c; ++plane) {
      double* dst = GX + plane * si.h * si.w;
      const double* src = g.data() + plane * so.h * so.w;
      for (std::int64_t i = 0; i < so.h; ++i) {
        double* top = dst + 2 * i * si.w;
        double* bot = top + si.w;
        for (std::int64_t j = 0; j < so.w; ++j) {
          const double v = 0.5 * src[i * so.w + j];
          top[2 * j] += p[0] * v;
          top[2 * j + 1] += p[1] * v;
          bot[2 * j] += p[2] * v;
          bot[2 * j + 1] += p[3] * v;
        }
      }
    }
  });
  return y;
}

}  // namespace

WaveletBands haar_dwt2d(const Tensor& image) {
  if (!image.defined()) throw ShapeError("haar_dwt2d: undefined image");
  check_even(image.shape());
  return WaveletBands{band("haar_ll", image, kLL), band("haar_hl", image, kHL),
                      band("haar_lh", image, kLH), band("haar_hh", image, kHH)};
}

Tensor haar_idwt2d(const WaveletBands& b) {
  for (const Tensor* t : {&b.ll, &b.hl, &b.lh, &b.hh}) {
    if (!t->defined()) throw ShapeError("haar_idwt2d: undefined band");
  }
  const Shape sb = b.ll.shape();
  if (b.hl.shape() != sb || b.lh.shape() != sb || b.hh.shape() != sb) {
    throw ShapeError("haar_idwt2d: band shapes differ (" + sb.str() + ", " + b.hl.shape().str() +
                     ", " + b.lh.shape().str() + ", " + b.hh.shape().str() + ")");
  }
  const Shape so{sb.n, sb.c, sb.h * 2, sb.w * 2};
  Tensor y(so);
  // Synthesis is the transpose of analysis: (*bands[k])[q] weights band k
  // for pixel q of the block (a, b, c, d).
  const std::array<const Pattern*, 4> bands{&kLL, &kHL, &kLH, &kHH};
  {
    const std::array<const double*, 4> src{b.ll.data().data(), b.hl.data().data(),
                                           b.lh.data().data(), b.hh.data().data()};
    double* Y = y.mutable_data().data();
    for (std::int64_t plane = 0; plane < sb.n * sb.c; ++plane) {
      for (std::int64_t i = 0; i < sb.h; ++i) {
        for (std::int64_t j = 0; j < sb.w; ++j) {
          const std::int64_t k = (plane * sb.h + i) * sb.w + j;
          double* top = Y + (plane * so.h + 2 * i) * so.w + 2 * j;
          double* bot = top + so.w;
          double* px[4] = {top, top + 1, bot, bot + 1};
          for (int q = 0; q < 4; ++q) {
            double acc = 0.0;
            for (int band_id = 0; band_id < 4; ++band_id) {
              acc += (*bands[band_id])[q] * src[band_id][k];
            }
            *px[q] = 0.5 * acc;
          }
        }
      }
    }
  }
  const std::array<Tensor, 4> inputs{b.ll, b.hl, b.lh, b.hh};
  Graph::active().record(
      "haar_idwt", inputs, y,
      [impls = std::array{b.ll.impl(), b.hl.impl(), b.lh.impl(), b.hh.impl()}, sb, so,
       bands](std::span<const double> g) {
        for (int band_id = 0; band_id < 4; ++band_id) {
          const auto& bi = impls[band_id];
          if (!bi->requires_grad) continue;
          double* GB = bi->grad_buffer().data();
          const Pattern& p = *bands[band_id];
          for (std::int64_t plane = 0; plane < sb.n * sb.c; ++plane) {
            for (std::int64_t i = 0; i < sb.h; ++i) {
              for (std::int64_t j = 0; j < sb.w; ++j) {
                const double* top = g.data() + (plane * so.h + 2 * i) * so.w + 2 * j;
                const double* bot = top + so.w;
                GB[(plane * sb.h + i) * sb.w + j] +=
                    0.5 * (p[0] * top[0] + p[1] * top[1] + p[2] * bot[0] + p[3] * bot[1]);
              }
            }
          }
        }
      });
  return y;
}

Tensor highfreq_stack(const Tensor& image) {
  if (!image.defined()) throw ShapeError("highfreq_stack: undefined image");
  check_even(image.shape());
  const std::array<Tensor, 3> detail{band("haar_hl", image, kHL), band("haar_lh", image, kLH),
                                     band("haar_hh", image, kHH)};
  return concat_channels(detail);
}

}  // namespace dcr
