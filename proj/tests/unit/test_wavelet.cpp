// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dcr/errors.hpp"
#include "dcr/gradcheck.hpp"
#include "dcr/ops.hpp"
#include "dcr/tensor.hpp"
#include "dcr/wavelet.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

using testing::random_tensor;

double band_energy(const WaveletBands& b) {
  return squared_norm(b.ll) + squared_norm(b.hl) + squared_norm(b.lh) + squared_norm(b.hh);
}

bool all_zero(const Tensor& t) {
  for (double v : t.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

TEST(Wavelet, ConstantImageHasNoDetail) {
  const WaveletBands b = haar_dwt2d(Tensor(Shape{1, 3, 6, 8}, 0.37));
  EXPECT_EQ(b.ll.shape(), (Shape{1, 3, 3, 4}));
  for (double v : b.ll.data()) EXPECT_DOUBLE_EQ(v, 0.74);
  EXPECT_TRUE(all_zero(b.hl));
  EXPECT_TRUE(all_zero(b.lh));
  EXPECT_TRUE(all_zero(b.hh));
}

TEST(Wavelet, HandComputedBlock) {
  const Tensor block(Shape{1, 1, 2, 2}, {1, 2, 3, 4});
  const WaveletBands b = haar_dwt2d(block);
  EXPECT_EQ(b.ll.item(), 5.0);
  EXPECT_EQ(b.hl.item(), -1.0);
  EXPECT_EQ(b.lh.item(), -2.0);
  EXPECT_EQ(b.hh.item(), 0.0);
  EXPECT_TRUE(identical(haar_idwt2d(b), block));
}

TEST(Wavelet, VerticalStripesAreHorizontalDetailOnly) {
  Tensor stripes(Shape{1, 1, 4, 4});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) stripes.at(0, 0, i, j) = j % 2;
  const WaveletBands b = haar_dwt2d(stripes);
  // Each block is [0 1; 0 1]: HL = (0 - 1 + 0 - 1) / 2 = -1, LL = 1.
  for (double v : b.hl.data()) EXPECT_EQ(v, -1.0);
  for (double v : b.ll.data()) EXPECT_EQ(v, 1.0);
  EXPECT_TRUE(all_zero(b.lh));
  EXPECT_TRUE(all_zero(b.hh));
}

TEST(Wavelet, ZeroBandsGiveZeroImage) {
  const Tensor z(Shape{1, 2, 3, 3}, 0.0);
  const Tensor img = haar_idwt2d({z, z, z, z});
  EXPECT_EQ(img.shape(), (Shape{1, 2, 6, 6}));
  EXPECT_TRUE(all_zero(img));
}

TEST(Wavelet, RoundTripAndParsevalOnRandomImages) {
  double worst_rt = 0.0;
  double worst_energy = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Tensor x = random_tensor(Shape{1, 1, 16, 16}, seed);
    const WaveletBands b = haar_dwt2d(x);
    worst_rt = std::max(worst_rt, max_abs_diff(haar_idwt2d(b), x));
    const double e = squared_norm(x);
    worst_energy = std::max(worst_energy, std::abs(band_energy(b) - e) / e);
  }
  EXPECT_LT(worst_rt, 1e-10);
  EXPECT_LT(worst_energy, 1e-9);
}

TEST(Wavelet, Linearity) {
  const Tensor x = random_tensor(Shape{2, 3, 8, 8}, 1);
  const Tensor y = random_tensor(Shape{2, 3, 8, 8}, 2);
  const double a = 0.7;
  const double c = -1.9;
  const WaveletBands lhs = haar_dwt2d(add(scale(x, a), scale(y, c)));
  const WaveletBands bx = haar_dwt2d(x);
  const WaveletBands by = haar_dwt2d(y);
  auto check = [&](const Tensor& l, const Tensor& px, const Tensor& py) {
    for (std::int64_t i = 0; i < l.numel(); ++i) {
      EXPECT_NEAR(l.data()[i], a * px.data()[i] + c * py.data()[i], 1e-12);
    }
  };
  check(lhs.ll, bx.ll, by.ll);
  check(lhs.hl, bx.hl, by.hl);
  check(lhs.lh, bx.lh, by.lh);
  check(lhs.hh, bx.hh, by.hh);
}

TEST(Wavelet, ShapeErrors) {
  EXPECT_THROW(haar_dwt2d(Tensor(Shape{1, 1, 3, 4})), ShapeError);
  EXPECT_THROW(haar_dwt2d(Tensor(Shape{1, 1, 4, 5})), ShapeError);
  const Tensor a(Shape{1, 1, 2, 2});
  const Tensor b(Shape{1, 1, 2, 3});
  EXPECT_THROW(haar_idwt2d({a, a, b, a}), ShapeError);
  EXPECT_THROW(highfreq_stack(Tensor(Shape{1, 4, 5, 4})), ShapeError);
}

TEST(Wavelet, HighfreqStackLayout) {
  const Tensor x = random_tensor(Shape{2, 4, 8, 6}, 3);
  const Tensor h = highfreq_stack(x);
  EXPECT_EQ(h.shape(), (Shape{2, 12, 4, 3}));
  const WaveletBands b = haar_dwt2d(x);
  EXPECT_TRUE(identical(slice_channels(h, 0, 4), b.hl));
  EXPECT_TRUE(identical(slice_channels(h, 4, 4), b.lh));
  EXPECT_TRUE(identical(slice_channels(h, 8, 4), b.hh));
  EXPECT_TRUE(all_zero(highfreq_stack(Tensor(Shape{1, 4, 8, 8}, 0.8))));
}

TEST(Wavelet, WhiteNoiseDetailEnergyIsThreeQuarters) {
  // Orthonormality spreads white-noise energy evenly over the four bands.
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01;
  double ratio_sum = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Tensor x(Shape{1, 1, 16, 16});
    for (auto& v : x.mutable_data()) v = n01(rng);
    const WaveletBands b = haar_dwt2d(x);
    ratio_sum += squared_norm(highfreq_stack(x)) / band_energy(b);
  }
  EXPECT_NEAR(ratio_sum / trials, 0.75, 0.05 * 0.75);
}

TEST(Wavelet, GradientsPassTightGradcheck) {
  const Tensor x = random_tensor(Shape{1, 2, 4, 4}, 4);
  const Tensor p = random_tensor(Shape{1, 6, 2, 2}, 5);
  GradcheckOptions o;
  o.tolerance = 1e-6;
  auto r = gradcheck([&](const Tensor& t) { return sum(mul(highfreq_stack(t), p)); }, x, o);
  EXPECT_TRUE(r.passed) << r.summary();
  const Tensor q = random_tensor(Shape{1, 2, 2, 2}, 6);
  r = gradcheck(
      [&](const Tensor& t) {
        const WaveletBands b = haar_dwt2d(t);
        return add(sum(mul(b.ll, q)), sum(square(b.hh)));
      },
      x, o);
  EXPECT_TRUE(r.passed) << r.summary();
}

}  // namespace
}  // namespace dcr
