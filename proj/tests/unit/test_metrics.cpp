// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dcr/errors.hpp"
#include "dcr/metrics.hpp"
#include "dcr/synthetic.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

using testing::random_tensor;

// Per-window SSIM with an explicit 2-D Gaussian weight grid: an independent
// restatement of the definition, not sharing the separable filter.
double ssim_oracle(const Tensor& a, const Tensor& b) {
  const int win = 11;
  const double sigma = 1.5;
  std::vector<double> wgt(win * win);
  double norm = 0.0;
  for (int u = 0; u < win; ++u)
    for (int v = 0; v < win; ++v) {
      const double du = u - 5;
      const double dv = v - 5;
      wgt[u * win + v] = std::exp(-(du * du + dv * dv) / (2 * sigma * sigma));
      norm += wgt[u * win + v];
    }
  for (double& w : wgt) w /= norm;
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;

  const Shape s = a.shape();
  double total = 0.0;
  for (std::int64_t n = 0; n < s.n; ++n)
    for (std::int64_t c = 0; c < s.c; ++c) {
      double plane = 0.0;
      std::int64_t windows = 0;
      for (std::int64_t i = 0; i + win <= s.h; ++i)
        for (std::int64_t j = 0; j + win <= s.w; ++j) {
          double mx = 0, my = 0;
          for (int u = 0; u < win; ++u)
            for (int v = 0; v < win; ++v) {
              mx += wgt[u * win + v] * a.at(n, c, i + u, j + v);
              my += wgt[u * win + v] * b.at(n, c, i + u, j + v);
            }
          double vx = 0, vy = 0, cov = 0;
          for (int u = 0; u < win; ++u)
            for (int v = 0; v < win; ++v) {
              const double dx = a.at(n, c, i + u, j + v) - mx;
              const double dy = b.at(n, c, i + u, j + v) - my;
              vx += wgt[u * win + v] * dx * dx;
              vy += wgt[u * win + v] * dy * dy;
              cov += wgt[u * win + v] * dx * dy;
            }
          plane += ((2 * mx * my + c1) * (2 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
          ++windows;
        }
      total += plane / static_cast<double>(windows);
    }
  return total / static_cast<double>(s.n * s.c);
}

Tensor offset(const Tensor& t, double d) {
  Tensor out = t.clone();
  for (auto& v : out.mutable_data()) v += d;
  return out;
}

TEST(Psnr, ClosedForms) {
  const Tensor ref(Shape{1, 4, 8, 8}, 0.0);
  EXPECT_EQ(psnr(ref, ref), kPsnrCapDb);
  EXPECT_NEAR(psnr(offset(ref, 0.1), ref), 20.0, 1e-12);
  EXPECT_NEAR(psnr(offset(ref, 0.01), ref), 40.0, 1e-12);
  const Tensor img = random_tensor(Shape{1, 4, 8, 8}, 1, 0.2, 0.8);
  EXPECT_NEAR(psnr(offset(img, 0.1), img), 20.0, 1e-9);
  EXPECT_NEAR(psnr(offset(img, -0.01), img), 40.0, 1e-9);
  EXPECT_NEAR(psnr(offset(img, 0.1), img, 2.0), 20.0 + 20.0 * std::log10(2.0), 1e-9);
}

TEST(Psnr, SymmetricExactly) {
  const Tensor a = random_tensor(Shape{1, 4, 8, 8}, 2, 0, 1);
  const Tensor b = random_tensor(Shape{1, 4, 8, 8}, 3, 0, 1);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
}

TEST(Psnr, FallsWithGrowingNoise) {
  const Tensor clean = synthetic_scene(4, 32, 32).tensor;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  double previous = kPsnrCapDb;
  for (double sigma : {0.01, 0.05, 0.1}) {
    Tensor noisy = clean.clone();
    for (auto& v : noisy.mutable_data()) v += sigma * n01(rng);
    const double db = psnr(noisy, clean);
    EXPECT_LT(db, previous);
    previous = db;
  }
}

TEST(Psnr, Errors) {
  EXPECT_THROW(psnr(Tensor(Shape{1, 4, 8, 8}), Tensor(Shape{1, 4, 8, 6})), ShapeError);
  EXPECT_THROW(psnr(Tensor(Shape{1, 1, 2, 2}), Tensor(Shape{1, 1, 2, 2}), 0.0),
               std::invalid_argument);
}

TEST(Ssim, GaussianTaps) {
  const auto taps = ssim_gaussian_taps();
  ASSERT_EQ(taps.size(), 11u);
  double sum = 0.0;
  for (double t : taps) sum += t;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(taps[4] / taps[5], std::exp(-1.0 / (2 * 1.5 * 1.5)));
  EXPECT_EQ(taps[0], taps[10]);
}

TEST(Ssim, SelfSimilarityIsExactlyOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Tensor a = random_tensor(Shape{1, 4, 16, 20}, seed, 0, 1);
    EXPECT_EQ(ssim(a, a.clone()), 1.0);
  }
  const Tensor flat(Shape{1, 1, 11, 11}, 0.3);
  EXPECT_EQ(ssim(flat, flat), 1.0);
}

TEST(Ssim, InvertedImageScoresBelowOne) {
  const Tensor a = synthetic_scene(6, 16, 16).tensor;
  Tensor inv = a.clone();
  for (auto& v : inv.mutable_data()) v = 1.0 - v;
  EXPECT_LT(ssim(inv, a), 1.0);
}

TEST(Ssim, AgreesWithPerWindowOracle) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Tensor a = random_tensor(Shape{1, 2, 32, 32}, 10 + seed, 0, 1);
    Tensor b = a.clone();
    std::mt19937_64 rng(20 + seed);
    std::normal_distribution<double> n01;
    for (auto& v : b.mutable_data()) v += 0.1 * n01(rng);
    EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-10);
    const Tensor c = random_tensor(Shape{1, 2, 32, 32}, 30 + seed, 0, 1);
    EXPECT_NEAR(ssim(a, c), ssim_oracle(a, c), 1e-10);
  }
  const Tensor tall = random_tensor(Shape{2, 1, 14, 23}, 40, 0, 1);
  const Tensor other = random_tensor(Shape{2, 1, 14, 23}, 41, 0, 1);
  EXPECT_NEAR(ssim(tall, other), ssim_oracle(tall, other), 1e-10);
}

TEST(Ssim, SymmetricAndBounded) {
  const Tensor a = random_tensor(Shape{1, 1, 16, 16}, 50, 0, 1);
  const Tensor b = random_tensor(Shape{1, 1, 16, 16}, 51, 0, 1);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-15);
  EXPECT_LE(ssim(a, b), 1.0);
  EXPECT_GE(ssim(a, b), -1.0);
}

TEST(Ssim, RejectsSmallImages) {
  EXPECT_THROW(ssim(Tensor(Shape{1, 4, 10, 16}), Tensor(Shape{1, 4, 10, 16})), ShapeError);
  EXPECT_THROW(ssim(Tensor(Shape{1, 4, 16, 16}), Tensor(Shape{1, 4, 16, 12})), ShapeError);
}

TEST(MetricReport, MeansAndCsv) {
  MetricReport r;
  const Tensor ref = random_tensor(Shape{1, 4, 12, 12}, 60, 0.2, 0.8);
  r.add("a.ten", offset(ref, 0.1), ref);
  r.add("b.ten", offset(ref, 0.01), ref);
  r.add("c.ten", random_tensor(Shape{1, 4, 12, 12}, 61, 0, 1), ref);
  ASSERT_EQ(r.entries.size(), 3u);
  double p = 0.0, s = 0.0;
  for (const auto& e : r.entries) {
    p += e.psnr_db;
    s += e.ssim;
  }
  EXPECT_NEAR(r.mean_psnr_db, p / 3.0, 1e-12);
  EXPECT_NEAR(r.mean_ssim, s / 3.0, 1e-12);

  std::istringstream csv(r.csv());
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "filename,psnr_db,ssim");
  EXPECT_EQ(lines[1].rfind("a.ten,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("mean,", 0), 0u);
  const double parsed = std::stod(lines[1].substr(6, lines[1].find(',', 6) - 6));
  EXPECT_EQ(parsed, r.entries[0].psnr_db);
}

}  // namespace
}  // namespace dcr
