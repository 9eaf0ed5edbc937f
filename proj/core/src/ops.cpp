// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"

namespace dcr {

namespace {

using Impl = std::shared_ptr<detail::TensorImpl>;

void require_defined(const Tensor& t, const char* op) {
  if (!t.defined()) throw ShapeError(std::string(op) + ": undefined tensor operand");
}

Shape broadcast_shape(const Shape& a, const Shape& b, const char* op) {
  auto fail = [&](const char* dim) {
    throw ShapeError(std::string(op) + ": incompatible " + dim + " extent (" + a.str() +
                     " vs " + b.str() + ")");
  };
  if (a.h != b.h) fail("height");
  if (a.w != b.w) fail("width");
  if (a.n != b.n && a.n != 1 && b.n != 1) fail("batch");
  if (a.c != b.c && a.c != 1 && b.c != 1) fail("channel");
  return Shape{std::max(a.n, b.n), std::max(a.c, b.c), a.h, a.w};
}

// Offset of the (n, c) plane of `s` when indexed from a broadcast shape.
inline std::int64_t plane_offset(const Shape& s, std::int64_t n, std::int64_t c) {
  return ((s.n == 1 ? 0 : n) * s.c + (s.c == 1 ? 0 : c)) * s.plane();
}

template <class Fwd, class DA, class DB>
Tensor binary(const char* tag, const Tensor& a, const Tensor& b, Fwd f, DA dfa, DB dfb) {
  require_defined(a, tag);
  require_defined(b, tag);
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  const Shape so = broadcast_shape(sa, sb, tag);
  Tensor y(so);
  {
    const double* A = a.data().data();
    const double* B = b.data().data();
    double* Y = y.mutable_data().data();
    const std::int64_t P = so.plane();
    for (std::int64_t n = 0; n < so.n; ++n) {
      for (std::int64_t c = 0; c < so.c; ++c) {
        const double* pa = A + plane_offset(sa, n, c);
        const double* pb = B + plane_offset(sb, n, c);
        double* py = Y + (n * so.c + c) * P;
        for (std::int64_t i = 0; i < P; ++i) py[i] = f(pa[i], pb[i]);
      }
    }
  }
  const std::array<Tensor, 2> inputs{a, b};
  Graph::active().record(tag, inputs, y,
                         [ai = a.impl(), bi = b.impl(), sa, sb, so, dfa, dfb](
                             std::span<const double> g) {
                           const double* A = ai->data.data();
                           const double* B = bi->data.data();
                           double* GA = ai->requires_grad ? ai->grad_buffer().data() : nullptr;
                           double* GB = bi->requires_grad ? bi->grad_buffer().data() : nullptr;
                           const std::int64_t P = so.plane();
                           for (std::int64_t n = 0; n < so.n; ++n) {
                             for (std::int64_t c = 0; c < so.c; ++c) {
                               const std::int64_t oa = plane_offset(sa, n, c);
                               const std::int64_t ob = plane_offset(sb, n, c);
                               const double* pg = g.data() + (n * so.c + c) * P;
                               for (std::int64_t i = 0; i < P; ++i) {
                                 const double x = A[oa + i];
                                 const double z = B[ob + i];
                                 if (GA) GA[oa + i] += pg[i] * dfa(x, z);
                                 if (GB) GB[ob + i] += pg[i] * dfb(x, z);
                               }
                             }
                           }
                         });
  return y;
}

// df receives (x, y) where y = f(x).
template <class Fwd, class DF>
Tensor unary(const char* tag, const Tensor& x, Fwd f, DF df) {
  require_defined(x, tag);
  Tensor y(x.shape());
  {
    auto in = x.data();
    auto out = y.mutable_data();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  }
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record(tag, inputs, y,
                         [xi = x.impl(), yi = y.impl().get(), df](std::span<const double> g) {
                           if (!xi->requires_grad) return;
                           auto gx = xi->grad_buffer();
                           const auto& xv = xi->data;
                           const auto& yv = yi->data;
                           for (std::size_t i = 0; i < gx.size(); ++i) {
                             gx[i] += g[i] * df(xv[i], yv[i]);
                           }
                         });
  return y;
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double z) { return x + z; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double z) { return x - z; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double z) { return x * z; }, [](double, double z) { return z; },
      [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double z) { return x / z; },
      [](double, double z) { return 1.0 / z; }, [](double x, double z) { return -x / (z * z); });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      "scale", x, [factor](double v) { return factor * v; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary(
      "add_scalar", x, [offset](double v) { return v + offset; },
      [](double, double) { return 1.0; });
}

Tensor abs(const Tensor& x) {
  return unary(
      "abs", x, [](double v) { return std::abs(v); }, [](double v, double) { return sign(v); });
}

Tensor square(const Tensor& x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sqrt(const Tensor& x) {
  return unary(
      "sqrt", x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return 0.5 / y; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  return unary(
      "clamp", x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  if (!(slope >= 0.0 && slope < 1.0)) {
    throw std::invalid_argument("leaky_relu: slope must lie in [0, 1)");
  }
  return unary(
      "leaky_relu", x, [slope](double v) { return v >= 0.0 ? v : slope * v; },
      [slope](double v, double) { return v >= 0.0 ? 1.0 : slope; });
}

namespace {

Tensor reduce(const char* tag, const Tensor& x, unsigned axes, bool average) {
  require_defined(x, tag);
  if (axes == 0u || (axes & ~static_cast<unsigned>(kAxisAll)) != 0u) {
    throw std::invalid_argument(std::string(tag) + ": invalid axis mask");
  }
  const Shape si = x.shape();
  const bool rn = axes & kAxisN;
  const bool rc = axes & kAxisC;
  const bool rh = axes & kAxisH;
  const bool rw = axes & kAxisW;
  const Shape so{rn ? 1 : si.n, rc ? 1 : si.c, rh ? 1 : si.h, rw ? 1 : si.w};
  const double count = static_cast<double>(si.numel() / so.numel());
  const double factor = average ? 1.0 / count : 1.0;

  auto out_index = [si, so, rn, rc, rh, rw](std::int64_t n, std::int64_t c, std::int64_t h,
                                            std::int64_t w) {
    return (((rn ? 0 : n) * so.c + (rc ? 0 : c)) * so.h + (rh ? 0 : h)) * so.w + (rw ? 0 : w);
  };

  Tensor y(so);
  {
    auto in = x.data();
    auto out = y.mutable_data();
    std::int64_t i = 0;
    for (std::int64_t n = 0; n < si.n; ++n)
      for (std::int64_t c = 0; c < si.c; ++c)
        for (std::int64_t h = 0; h < si.h; ++h)
          for (std::int64_t w = 0; w < si.w; ++w) out[out_index(n, c, h, w)] += in[i++];
    if (average) {
      for (double& v : out) v /= count;
    }
  }
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record(tag, inputs, y,
                         [xi = x.impl(), si, factor, out_index](std::span<const double> g) {
                           if (!xi->requires_grad) return;
                           auto gx = xi->grad_buffer();
                           std::int64_t i = 0;
                           for (std::int64_t n = 0; n < si.n; ++n)
                             for (std::int64_t c = 0; c < si.c; ++c)
                               for (std::int64_t h = 0; h < si.h; ++h)
                                 for (std::int64_t w = 0; w < si.w; ++w) {
                                   gx[i++] += g[out_index(n, c, h, w)] * factor;
                                 }
                         });
  return y;
}

}  // namespace

Tensor sum(const Tensor& x, unsigned axes) { return reduce("sum", x, axes, false); }
Tensor mean(const Tensor& x, unsigned axes) { return reduce("mean", x, axes, true); }

Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  require_defined(input, "linear");
  require_defined(weight, "linear");
  const Shape si = input.shape();
  const Shape sw = weight.shape();
  const std::int64_t d = si.c * si.h * si.w;
  const std::int64_t dout = sw.n;
  if (sw.h != 1 || sw.w != 1) throw ShapeError("linear: weight must be Dout x D x 1 x 1");
  if (sw.c != d) {
    throw ShapeError("linear: input feature length " + std::to_string(d) +
                     " does not match weight input dimension " + std::to_string(sw.c));
  }
  if (bias.defined() && bias.shape() != Shape{1, dout, 1, 1}) {
    throw ShapeError("linear: bias must be 1 x " + std::to_string(dout) + " x 1 x 1, got " +
                     bias.shape().str());
  }
  Tensor y(Shape{si.n, dout, 1, 1});
  {
    const double* X = input.data().data();
    const double* W = weight.data().data();
    double* Y = y.mutable_data().data();
    for (std::int64_t n = 0; n < si.n; ++n) {
      for (std::int64_t o = 0; o < dout; ++o) {
        double acc = bias.defined() ? bias.data()[static_cast<std::size_t>(o)] : 0.0;
        for (std::int64_t k = 0; k < d; ++k) acc += W[o * d + k] * X[n * d + k];
        Y[n * dout + o] = acc;
      }
    }
  }
  const std::array<Tensor, 3> inputs{input, weight, bias};
  Graph::active().record(
      "linear", inputs, y,
      [xi = input.impl(), wi = weight.impl(), bi = bias.defined() ? bias.impl() : nullptr, d,
       dout, batch = si.n](std::span<const double> g) {
        const double* X = xi->data.data();
        const double* W = wi->data.data();
        if (xi->requires_grad) {
          auto gx = xi->grad_buffer();
          for (std::int64_t n = 0; n < batch; ++n)
            for (std::int64_t o = 0; o < dout; ++o)
              for (std::int64_t k = 0; k < d; ++k) gx[n * d + k] += g[n * dout + o] * W[o * d + k];
        }
        if (wi->requires_grad) {
          auto gw = wi->grad_buffer();
          for (std::int64_t n = 0; n < batch; ++n)
            for (std::int64_t o = 0; o < dout; ++o)
              for (std::int64_t k = 0; k < d; ++k) gw[o * d + k] += g[n * dout + o] * X[n * d + k];
        }
        if (bi && bi->requires_grad) {
          auto gb = bi->grad_buffer();
          for (std::int64_t n = 0; n < batch; ++n)
            for (std::int64_t o = 0; o < dout; ++o) gb[o] += g[n * dout + o];
        }
      });
  return y;
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  require_defined(logits, "softmax_cross_entropy");
  const Shape s = logits.shape();
  if (s.c != 2 || s.h != 1 || s.w != 1) {
    throw ShapeError("softmax_cross_entropy: logits must be N x 2 x 1 x 1, got " + s.str());
  }
  if (static_cast<std::int64_t>(labels.size()) != s.n) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for batch of " + std::to_string(s.n));
  }
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) +
                              " outside {0, 1}");
    }
  }
  const std::int64_t batch = s.n;
  std::vector<double> probs(static_cast<std::size_t>(2 * batch));
  double loss = 0.0;
  auto z = logits.data();
  for (std::int64_t n = 0; n < batch; ++n) {
    const double z0 = z[2 * n];
    const double z1 = z[2 * n + 1];
    const double m = std::max(z0, z1);
    const double e0 = std::exp(z0 - m);
    const double e1 = std::exp(z1 - m);
    const double lse = m + std::log(e0 + e1);
    loss += lse - (labels[n] == 0 ? z0 : z1);
    probs[2 * n] = e0 / (e0 + e1);
    probs[2 * n + 1] = e1 / (e0 + e1);
  }
  Tensor y = Tensor::scalar(loss / static_cast<double>(batch));
  const std::array<Tensor, 1> inputs{logits};
  Graph::active().record(
      "softmax_cross_entropy", inputs, y,
      [li = logits.impl(), probs = std::move(probs),
       lbl = std::vector<int>(labels.begin(), labels.end()), batch](std::span<const double> g) {
        if (!li->requires_grad) return;
        auto gl = li->grad_buffer();
        const double f = g[0] / static_cast<double>(batch);
        for (std::int64_t n = 0; n < batch; ++n) {
          gl[2 * n] += f * (probs[2 * n] - (lbl[n] == 0 ? 1.0 : 0.0));
          gl[2 * n + 1] += f * (probs[2 * n + 1] - (lbl[n] == 1 ? 1.0 : 0.0));
        }
      });
  return y;
}

Tensor concat_channels(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  const Shape s0 = parts[0].shape();
  std::int64_t channels = 0;
  for (const auto& p : parts) {
    require_defined(p, "concat_channels");
    const Shape s = p.shape();
    if (s.n != s0.n || s.h != s0.h || s.w != s0.w) {
      throw ShapeError("concat_channels: part " + s.str() + " does not match " + s0.str() +
                       " outside the channel axis");
    }
    channels += s.c;
  }
  const Shape so{s0.n, channels, s0.h, s0.w};
  Tensor y(so);
  const std::int64_t P = so.plane();
  {
    double* Y = y.mutable_data().data();
    std::int64_t c0 = 0;
    for (const auto& p : parts) {
      const std::int64_t pc = p.shape().c;
      const double* X = p.data().data();
      for (std::int64_t n = 0; n < so.n; ++n) {
        std::copy_n(X + n * pc * P, pc * P, Y + (n * channels + c0) * P);
      }
      c0 += pc;
    }
  }
  std::vector<Impl> impls;
  for (const auto& p : parts) impls.push_back(p.impl());
  Graph::active().record("concat_channels", parts, y,
                         [impls = std::move(impls), so, P](std::span<const double> g) {
                           std::int64_t c0 = 0;
                           for (const auto& pi : impls) {
                             const std::int64_t pc = pi->shape.c;
                             if (pi->requires_grad) {
                               auto gp = pi->grad_buffer();
                               for (std::int64_t n = 0; n < so.n; ++n) {
                                 const double* src = g.data() + (n * so.c + c0) * P;
                                 double* dst = gp.data() + n * pc * P;
                                 for (std::int64_t i = 0; i < pc * P; ++i) dst[i] += src[i];
                               }
                             }
                             c0 += pc;
                           }
                         });
  return y;
}

Tensor concat_batch(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_batch: no inputs");
  const Shape s0 = parts[0].shape();
  std::int64_t batch = 0;
  for (const auto& p : parts) {
    require_defined(p, "concat_batch");
    const Shape s = p.shape();
    if (s.c != s0.c || s.h != s0.h || s.w != s0.w) {
      throw ShapeError("concat_batch: part " + s.str() + " does not match " + s0.str());
    }
    batch += s.n;
  }
  Tensor y(Shape{batch, s0.c, s0.h, s0.w});
  {
    double* Y = y.mutable_data().data();
    for (const auto& p : parts) Y = std::copy(p.data().begin(), p.data().end(), Y);
  }
  std::vector<Impl> impls;
  for (const auto& p : parts) impls.push_back(p.impl());
  Graph::active().record("concat_batch", parts, y,
                         [impls = std::move(impls)](std::span<const double> g) {
                           std::size_t offset = 0;
                           for (const auto& pi : impls) {
                             const std::size_t len = pi->data.size();
                             if (pi->requires_grad) {
                               auto gp = pi->grad_buffer();
                               for (std::size_t i = 0; i < len; ++i) gp[i] += g[offset + i];
                             }
                             offset += len;
                           }
                         });
  return y;
}

Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count) {
  require_defined(x, "slice_channels");
  const Shape si = x.shape();
  if (begin < 0 || count < 1 || begin + count > si.c) {
    throw ShapeError("slice_channels: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside channel extent " +
                     std::to_string(si.c));
  }
  const Shape so{si.n, count, si.h, si.w};
  const std::int64_t P = si.plane();
  Tensor y(so);
  {
    const double* X = x.data().data();
    double* Y = y.mutable_data().data();
    for (std::int64_t n = 0; n < si.n; ++n) {
      std::copy_n(X + (n * si.c + begin) * P, count * P, Y + n * count * P);
    }
  }
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record("slice_channels", inputs, y,
                         [xi = x.impl(), si, begin, count, P](std::span<const double> g) {
                           if (!xi->requires_grad) return;
                           auto gx = xi->grad_buffer();
                           for (std::int64_t n = 0; n < si.n; ++n) {
                             const double* src = g.data() + n * count * P;
                             double* dst = gx.data() + (n * si.c + begin) * P;
                             for (std::int64_t i = 0; i < count * P; ++i) dst[i] += src[i];
                           }
                         });
  return y;
}

Tensor slice_batch(const Tensor& x, std::int64_t begin, std::int64_t count) {
  require_defined(x, "slice_batch");
  const Shape si = x.shape();
  if (begin < 0 || count < 1 || begin + count > si.n) {
    throw ShapeError("slice_batch: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside batch extent " +
                     std::to_string(si.n));
  }
  const std::int64_t sample = si.c * si.plane();
  Tensor y(Shape{count, si.c, si.h, si.w});
  std::copy_n(x.data().data() + begin * sample, count * sample, y.mutable_data().data());
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record("slice_batch", inputs, y,
                         [xi = x.impl(), begin, count, sample](std::span<const double> g) {
                           if (!xi->requires_grad) return;
                           auto gx = xi->grad_buffer();
                           for (std::int64_t i = 0; i < count * sample; ++i) {
                             gx[begin * sample + i] += g[i];
                           }
                         });
  return y;
}

Tensor upsample_nearest2x(const Tensor& x) {
  require_defined(x, "upsample_nearest2x");
  const Shape si = x.shape();
  const Shape so{si.n, si.c, 2 * si.h, 2 * si.w};
  Tensor y(so);
  {
    const double* X = x.data().data();
    double* Y = y.mutable_data().data();
    for (std::int64_t p = 0; p < si.n * si.c; ++p) {
      for (std::int64_t h = 0; h < so.h; ++h) {
        const double* src = X + (p * si.h + h / 2) * si.w;
        double* dst = Y + (p * so.h + h) * so.w;
        for (std::int64_t w = 0; w < so.w; ++w) dst[w] = src[w / 2];
      }
    }
  }
  const std::array<Tensor, 1> inputs{x};
  Graph::active().record("upsample_nearest2x", inputs, y,
                         [xi = x.impl(), si, so](std::span<const double> g) {
                           if (!xi->requires_grad) return;
                           auto gx = xi->grad_buffer();
                           for (std::int64_t p = 0; p < si.n * si.c; ++p) {
                             for (std::int64_t h = 0; h < so.h; ++h) {
                               double* dst = gx.data() + (p * si.h + h / 2) * si.w;
                               const double* src = g.data() + (p * so.h + h) * so.w;
                               for (std::int64_t w = 0; w < so.w; ++w) dst[w / 2] += src[w];
                             }
                           }
                         });
  return y;
}

}  // namespace dcr
