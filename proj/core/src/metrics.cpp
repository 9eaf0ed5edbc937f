// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dcr/errors.hpp"

namespace dcr {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

void check_same(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shapes differ (" + a.shape().str() + " vs " +
                     b.shape().str() + ")");
  }
}

// Valid-mode separable filtering of one H x W plane.
std::vector<double> filter_valid(const double* src, std::int64_t h, std::int64_t w,
                                 const std::vector<double>& taps) {
  const std::int64_t oh = h - kWindow + 1;
  const std::int64_t ow = w - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h * ow));
  for (std::int64_t i = 0; i < h; ++i) {
    for (std::int64_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * src[i * w + j + k];
      rows[static_cast<std::size_t>(i * ow + j)] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh * ow));
  for (std::int64_t i = 0; i < oh; ++i) {
    for (std::int64_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * rows[static_cast<std::size_t>((i + k) * ow + j)];
      out[static_cast<std::size_t>(i * ow + j)] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const Tensor& test, const Tensor& ref, double peak) {
  check_same(test, ref, "psnr");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
  double se = 0.0;
  auto a = test.data();
  auto b = ref.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 20.0 * std::log10(peak) - 10.0 * std::log10(mse));
}

std::vector<double> ssim_gaussian_taps() {
  std::vector<double> taps(kWindow);
  double total = 0.0;
  for (int k = 0; k < kWindow; ++k) {
    const double x = k - kWindow / 2;
    taps[k] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
    total += taps[k];
  }
  for (double& t : taps) t /= total;
  return taps;
}

double ssim(const Tensor& test, const Tensor& ref) {
  check_same(test, ref, "ssim");
  const Shape s = test.shape();
  if (s.h < kWindow || s.w < kWindow) {
    throw ShapeError("ssim: image " + s.str() + " smaller than the 11x11 window");
  }
  const auto taps = ssim_gaussian_taps();
  const std::int64_t P = s.plane();
  std::vector<double> xx(static_cast<std::size_t>(P));
  std::vector<double> yy(xx.size());
  std::vector<double> xy(xx.size());
  double total = 0.0;
  for (std::int64_t plane = 0; plane < s.n * s.c; ++plane) {
    const double* X = test.data().data() + plane * P;
    const double* Y = ref.data().data() + plane * P;
    for (std::int64_t i = 0; i < P; ++i) {
      xx[i] = X[i] * X[i];
      yy[i] = Y[i] * Y[i];
      xy[i] = X[i] * Y[i];
    }
    const auto mx = filter_valid(X, s.h, s.w, taps);
    const auto my = filter_valid(Y, s.h, s.w, taps);
    const auto sxx = filter_valid(xx.data(), s.h, s.w, taps);
    const auto syy = filter_valid(yy.data(), s.h, s.w, taps);
    const auto sxy = filter_valid(xy.data(), s.h, s.w, taps);
    double acc = 0.0;
    for (std::size_t k = 0; k < mx.size(); ++k) {
      const double vx = sxx[k] - mx[k] * mx[k];
      const double vy = syy[k] - my[k] * my[k];
      const double cxy = sxy[k] - mx[k] * my[k];
      const double num = (2.0 * mx[k] * my[k] + kC1) * (2.0 * cxy + kC2);
      const double den = (mx[k] * mx[k] + my[k] * my[k] + kC1) * (vx + vy + kC2);
      acc += num / den;
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / static_cast<double>(s.n * s.c);
}

void MetricReport::add(std::string name, const Tensor& test, const Tensor& ref) {
  entries.push_back({std::move(name), psnr(test, ref), ssim(test, ref)});
  finalize();
}

void MetricReport::finalize() {
  mean_psnr_db = 0.0;
  mean_ssim = 0.0;
  if (entries.empty()) return;
  for (const auto& e : entries) {
    mean_psnr_db += e.psnr_db;
    mean_ssim += e.ssim;
  }
  mean_psnr_db /= static_cast<double>(entries.size());
  mean_ssim /= static_cast<double>(entries.size());
}

std::string MetricReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "filename,psnr_db,ssim\n";
  for (const auto& e : entries) os << e.name << "," << e.psnr_db << "," << e.ssim << "\n";
  os << "mean," << mean_psnr_db << "," << mean_ssim << "\n";
  return os.str();
}

}  // namespace dcr
