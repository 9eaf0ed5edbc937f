// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"
#include "dcr/tensor.hpp"
#include "dcr/ten_io.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

using testing::random_tensor;
using testing::TempDir;

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }
std::vector<double> grads(const Tensor& t) { return {t.grad().begin(), t.grad().end()}; }

class TensorTest : public ::testing::Test {
 protected:
  void SetUp() override { Graph::active().reset(); }
};

TEST_F(TensorTest, ShapeAndIndexing) {
  Tensor t(Shape{2, 3, 4, 5}, 0.0);
  EXPECT_EQ(t.numel(), 120);
  t.at(1, 2, 3, 4) = 7.0;
  EXPECT_EQ(t.offset(1, 2, 3, 4), 119);
  EXPECT_EQ(t.data()[119], 7.0);
  EXPECT_THROW(Tensor(Shape{0, 1, 1, 1}), ShapeError);
  EXPECT_THROW(Tensor(Shape{1, 1, 1, 3}, std::vector<double>{1, 2}), ShapeError);
  EXPECT_THROW((void)t.item(), ShapeError);
}

TEST_F(TensorTest, HandlesShareStorageAndDetachCopies) {
  Tensor a = Tensor::row({1, 2, 3});
  Tensor b = a;
  b.mutable_data()[0] = 9;
  EXPECT_EQ(a.data()[0], 9);
  Tensor c = a.detach();
  c.mutable_data()[1] = -1;
  EXPECT_EQ(a.data()[1], 2);
  EXPECT_TRUE(a.same(b));
  EXPECT_FALSE(a.same(c));
}

TEST_F(TensorTest, AbsAndClampExamples) {
  EXPECT_EQ(values(abs(Tensor::row({-2, 3}))), (std::vector<double>{2, 3}));
  EXPECT_EQ(values(clamp(Tensor::row({-0.5, 0.5, 1.5}), 0, 1)), (std::vector<double>{0, 0.5, 1}));
}

TEST_F(TensorTest, AbsGradientIsSignWithZeroAtZero) {
  Tensor x = Tensor::row({-2, 3, 0});
  x.set_requires_grad(true);
  backward(sum(abs(x)));
  EXPECT_EQ(grads(x), (std::vector<double>{-1, 1, 0}));
}

TEST_F(TensorTest, LeakyReluDerivativeAtZeroIsOne) {
  Tensor x = Tensor::row({-1, 0, 2});
  x.set_requires_grad(true);
  backward(sum(leaky_relu(x, 0.1)));
  EXPECT_EQ(grads(x), (std::vector<double>{0.1, 1, 1}));
}

TEST_F(TensorTest, ClampGradientPassesInsideRangeOnly) {
  Tensor x = Tensor::row({-0.5, 0.5, 1.5, 1.0});
  x.set_requires_grad(true);
  backward(sum(clamp(x, 0, 1)));
  EXPECT_EQ(grads(x), (std::vector<double>{0, 1, 0, 1}));
}

TEST_F(TensorTest, ReductionExamples) {
  EXPECT_EQ(mean(Tensor::row({1, 2, 3, 4})).item(), 2.5);
  EXPECT_EQ(sum(Tensor::ones(Shape{1, 1, 2, 2}), kAxisHW).item(), 4.0);
  Tensor x = Tensor::row({1, 2, 3, 4});
  x.set_requires_grad(true);
  backward(mean(x));
  EXPECT_EQ(grads(x), (std::vector<double>(4, 0.25)));
}

TEST_F(TensorTest, ReductionKeepsReducedAxesAsOne) {
  const Tensor x = random_tensor(Shape{2, 3, 4, 5}, 1);
  EXPECT_EQ(sum(x, kAxisC).shape(), (Shape{2, 1, 4, 5}));
  EXPECT_EQ(mean(x, kAxisHW).shape(), (Shape{2, 3, 1, 1}));
  EXPECT_EQ(sum(x, kAxisCHW).shape(), (Shape{2, 1, 1, 1}));
  const Tensor m = mean(x, kAxisN);
  EXPECT_NEAR(m.at(0, 1, 2, 3), 0.5 * (x.at(0, 1, 2, 3) + x.at(1, 1, 2, 3)), 1e-15);
}

TEST_F(TensorTest, BroadcastOnlyOverUnitBatchOrChannel) {
  const Tensor a = random_tensor(Shape{2, 3, 4, 4}, 2);
  const Tensor per_channel = random_tensor(Shape{1, 3, 1, 1}, 3);
  EXPECT_THROW(add(a, per_channel), ShapeError);  // H, W must match exactly
  const Tensor c1 = random_tensor(Shape{2, 1, 4, 4}, 4);
  const Tensor y = mul(a, c1);
  EXPECT_EQ(y.shape(), a.shape());
  EXPECT_EQ(y.at(1, 2, 3, 0), a.at(1, 2, 3, 0) * c1.at(1, 0, 3, 0));
  const Tensor n1 = random_tensor(Shape{1, 3, 4, 4}, 5);
  EXPECT_EQ(sub(a, n1).at(1, 1, 0, 2), a.at(1, 1, 0, 2) - n1.at(0, 1, 0, 2));
  EXPECT_THROW(add(a, random_tensor(Shape{2, 2, 4, 4}, 6)), ShapeError);
}

TEST_F(TensorTest, BroadcastGradientSumsOverExpandedAxis) {
  Tensor a = random_tensor(Shape{3, 2, 2, 2}, 7);
  Tensor b = random_tensor(Shape{1, 2, 2, 2}, 8);
  b.set_requires_grad(true);
  backward(sum(add(a, b)));
  for (double g : b.grad()) EXPECT_EQ(g, 3.0);
}

TEST_F(TensorTest, LinearExamples) {
  Tensor eye(Shape{3, 3, 1, 1}, 0.0);
  for (int i = 0; i < 3; ++i) eye.at(i, i, 0, 0) = 1.0;
  const Tensor zero_bias(Shape{1, 3, 1, 1}, 0.0);
  const Tensor x = random_tensor(Shape{2, 3, 1, 1}, 9);
  EXPECT_TRUE(identical(linear(x, eye, zero_bias), x));

  const Tensor w = random_tensor(Shape{2, 12, 1, 1}, 10);
  const Tensor b = random_tensor(Shape{1, 2, 1, 1}, 11);
  const Tensor out = linear(Tensor::zeros(Shape{1, 3, 2, 2}), w, b);
  EXPECT_EQ(values(out), values(b));
  EXPECT_THROW(linear(Tensor::zeros(Shape{1, 3, 2, 1}), w, b), ShapeError);
}

TEST_F(TensorTest, SoftmaxCrossEntropyExamples) {
  const std::array<int, 1> zero{0};
  EXPECT_NEAR(softmax_cross_entropy(Tensor(Shape{1, 2, 1, 1}, {0.0, 0.0}), zero).item(),
              std::log(2.0), 1e-15);
  const double saturated =
      softmax_cross_entropy(Tensor(Shape{1, 2, 1, 1}, {20.0, -20.0}), zero).item();
  EXPECT_TRUE(std::isfinite(saturated));
  EXPECT_LT(saturated, 1e-8);
  const std::array<int, 1> one{1};
  EXPECT_NEAR(softmax_cross_entropy(Tensor(Shape{1, 2, 1, 1}, {600.0, -600.0}), one).item(),
              1200.0, 1e-9);
  const std::array<int, 1> bad{2};
  EXPECT_THROW(softmax_cross_entropy(Tensor(Shape{1, 2, 1, 1}, 0.0), bad), std::out_of_range);
}

TEST_F(TensorTest, BackwardOfSumIsOnes) {
  Tensor x = random_tensor(Shape{2, 3, 2, 2}, 12);
  x.set_requires_grad(true);
  backward(sum(x));
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST_F(TensorTest, BackwardOfHalfSquaredNormIsIdentity) {
  Tensor x = random_tensor(Shape{1, 2, 3, 3}, 13);
  x.set_requires_grad(true);
  backward(scale(sum(mul(x, x)), 0.5));
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_NEAR(x.grad()[i], x.data()[i], 1e-15);
}

TEST_F(TensorTest, BackwardErrors) {
  Tensor x = random_tensor(Shape{1, 1, 2, 2}, 14);
  x.set_requires_grad(true);
  EXPECT_THROW(backward(scale(x, 2.0)), GraphError);  // not a scalar

  Graph::active().reset();
  const Tensor loss = sum(x);
  backward(loss);
  EXPECT_THROW(backward(loss), GraphError);  // consumed

  const Tensor stale = sum(square(x));
  Graph::active().reset();
  EXPECT_THROW(backward(stale), GraphError);

  const Tensor constant = sum(Tensor::ones(Shape{1, 1, 2, 2}));
  EXPECT_THROW(backward(constant), GraphError);
}

TEST_F(TensorTest, NewGenerationAfterBackward) {
  Tensor x = Tensor::row({1, 2});
  x.set_requires_grad(true);
  backward(sum(x));
  const auto gen = Graph::active().generation();
  x.zero_grad();
  backward(sum(scale(x, 3.0)));
  EXPECT_GT(Graph::active().generation(), gen);
  EXPECT_EQ(grads(x), (std::vector<double>{3, 3}));
}

TEST_F(TensorTest, NoGradGuardSkipsRecording) {
  Tensor x = Tensor::row({1, 2});
  x.set_requires_grad(true);
  const auto before = Graph::active().size();
  {
    NoGradGuard guard;
    const Tensor y = square(x);
    EXPECT_FALSE(y.requires_grad());
    EXPECT_TRUE(y.is_leaf());
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_EQ(Graph::active().size(), before);
}

TEST_F(TensorTest, BackwardIsLinearInTheLoss) {
  Tensor x = random_tensor(Shape{1, 3, 4, 4}, 15, 0.1, 1.0);
  x.set_requires_grad(true);
  auto f1 = [&] { return sum(mul(square(x), x)); };
  auto f2 = [&] { return mean(sqrt(x)); };

  backward(f1());
  const Tensor g1 = x.grad_tensor();
  x.clear_grad();
  backward(f2());
  const Tensor g2 = x.grad_tensor();
  x.clear_grad();
  backward(add(f1(), f2()));
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    EXPECT_NEAR(x.grad()[i], g1.data()[i] + g2.data()[i], 1e-12);
  }
}

TEST_F(TensorTest, ForwardIsBitDeterministic) {
  const Tensor x = random_tensor(Shape{2, 3, 8, 8}, 16);
  const Tensor w = random_tensor(Shape{4, 3, 3, 3}, 17);
  const Tensor b = random_tensor(Shape{1, 4, 1, 1}, 18);
  const Tensor y1 = leaky_relu(conv2d(x, w, b, 2, 1), 0.1);
  const Tensor y2 = leaky_relu(conv2d(x, w, b, 2, 1), 0.1);
  EXPECT_TRUE(identical(y1, y2));
}

// Direct nested-loop cross-correlation used as the forward oracle.
Tensor naive_conv(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad) {
  const Shape si = x.shape();
  const Shape sw = w.shape();
  const std::int64_t k = sw.h;
  const std::int64_t ho = (si.h + 2 * pad - k) / stride + 1;
  const std::int64_t wo = (si.w + 2 * pad - k) / stride + 1;
  Tensor y(Shape{si.n, sw.n, ho, wo}, 0.0);
  for (std::int64_t n = 0; n < si.n; ++n)
    for (std::int64_t o = 0; o < sw.n; ++o)
      for (std::int64_t i = 0; i < ho; ++i)
        for (std::int64_t j = 0; j < wo; ++j) {
          double acc = b.defined() ? b.at(0, o, 0, 0) : 0.0;
          for (std::int64_t c = 0; c < si.c; ++c)
            for (std::int64_t u = 0; u < k; ++u)
              for (std::int64_t v = 0; v < k; ++v) {
                const std::int64_t r = i * stride + u - pad;
                const std::int64_t q = j * stride + v - pad;
                if (r < 0 || q < 0 || r >= si.h || q >= si.w) continue;
                acc += w.at(o, c, u, v) * x.at(n, c, r, q);
              }
          y.at(n, o, i, j) = acc;
        }
  return y;
}

TEST_F(TensorTest, Conv2dMatchesNestedLoopOracle) {
  struct Case {
    Shape in;
    std::int64_t cout, k;
    int stride, pad;
  };
  const std::vector<Case> cases{{{1, 1, 5, 5}, 1, 3, 1, 0},
                                {{2, 3, 7, 6}, 4, 3, 1, 1},
                                {{1, 2, 8, 8}, 3, 3, 2, 1},
                                {{1, 4, 9, 9}, 2, 5, 2, 2},
                                {{2, 2, 4, 4}, 3, 1, 1, 0}};
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const Tensor x = random_tensor(c.in, seed++);
    const Tensor w = random_tensor(Shape{c.cout, c.in.c, c.k, c.k}, seed++);
    const Tensor b = random_tensor(Shape{1, c.cout, 1, 1}, seed++);
    const Tensor got = conv2d(x, w, b, c.stride, c.pad);
    const Tensor want = naive_conv(x, w, b, c.stride, c.pad);
    ASSERT_EQ(got.shape(), want.shape());
    EXPECT_LT(max_abs_diff(got, want), 1e-12);
  }
  const Tensor x = random_tensor(Shape{1, 2, 5, 5}, 1);
  const Tensor w = random_tensor(Shape{1, 2, 3, 3}, 2);
  EXPECT_LT(max_abs_diff(conv2d(x, w, Tensor(), 1, 1), naive_conv(x, w, Tensor(), 1, 1)), 1e-12);
}

TEST_F(TensorTest, Conv2dShapeErrors) {
  const Tensor x = random_tensor(Shape{1, 2, 5, 5}, 1);
  EXPECT_THROW(conv2d(x, random_tensor(Shape{1, 3, 3, 3}, 2), Tensor(), 1, 1), ShapeError);
  EXPECT_THROW(conv2d(x, random_tensor(Shape{1, 2, 2, 2}, 2), Tensor(), 1, 0), ShapeError);
  EXPECT_THROW(conv2d(x, random_tensor(Shape{1, 2, 3, 3}, 2), Tensor(), 0, 0), ShapeError);
  EXPECT_THROW(conv2d(random_tensor(Shape{1, 2, 2, 2}, 3), random_tensor(Shape{1, 2, 3, 3}, 2),
                      Tensor(), 1, 0),
               ShapeError);
}

TEST_F(TensorTest, ConcatSliceAndUpsample) {
  const Tensor a = random_tensor(Shape{1, 2, 3, 3}, 20);
  const Tensor b = random_tensor(Shape{1, 3, 3, 3}, 21);
  const std::array<Tensor, 2> parts{a, b};
  const Tensor c = concat_channels(parts);
  EXPECT_EQ(c.shape(), (Shape{1, 5, 3, 3}));
  EXPECT_TRUE(identical(slice_channels(c, 0, 2), a));
  EXPECT_TRUE(identical(slice_channels(c, 2, 3), b));
  EXPECT_THROW(slice_channels(c, 4, 2), ShapeError);

  const std::array<Tensor, 2> batch{a, a};
  const Tensor ab = concat_batch(batch);
  EXPECT_EQ(ab.shape(), (Shape{2, 2, 3, 3}));
  EXPECT_TRUE(identical(slice_batch(ab, 1, 1), a));

  const Tensor up = upsample_nearest2x(a);
  EXPECT_EQ(up.shape(), (Shape{1, 2, 6, 6}));
  for (std::int64_t i = 0; i < 6; ++i)
    for (std::int64_t j = 0; j < 6; ++j) EXPECT_EQ(up.at(0, 1, i, j), a.at(0, 1, i / 2, j / 2));
}

TEST_F(TensorTest, TenRoundTripIsExact) {
  TempDir dir;
  const Tensor t = random_tensor(Shape{2, 3, 4, 5}, 22, -1e6, 1e6);
  write_ten(dir / "t.ten", t);
  EXPECT_EQ(std::filesystem::file_size(dir / "t.ten"), ten_file_bytes(t.shape()));
  EXPECT_TRUE(identical(read_ten(dir / "t.ten"), t));
}

TEST_F(TensorTest, TenByteLayout) {
  const auto bytes = encode_ten(Tensor(Shape{1, 1, 1, 2}, {1.0, -2.0}));
  ASSERT_EQ(bytes.size(), 36u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TEN1");
  // Extents as little-endian uint32: 1, 1, 1, 2.
  const std::vector<std::uint8_t> header(bytes.begin() + 4, bytes.begin() + 20);
  EXPECT_EQ(header, (std::vector<std::uint8_t>{1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0}));
  // 1.0 = 0x3FF0000000000000 little-endian.
  const std::vector<std::uint8_t> one(bytes.begin() + 20, bytes.begin() + 28);
  EXPECT_EQ(one, (std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0xF0, 0x3F}));
}

TEST_F(TensorTest, TenRejectsCorruption) {
  auto bytes = encode_ten(Tensor(Shape{1, 1, 2, 2}, 0.5));
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_ten(truncated), DataError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_ten(bad_magic), DataError);
}

}  // namespace
}  // namespace dcr
