// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dcr/tensor.hpp"

namespace dcr {

inline constexpr double kPsnrCapDb = 100.0;

/// 10 log10(peak^2 / MSE) over every value; 100 dB when MSE is zero.
double psnr(const Tensor& test, const Tensor& ref, double peak = 1.0);

/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01,
/// K2 0.03, dynamic range 1), computed per channel and averaged over
/// channels and batch. Throws ShapeError for images smaller than the window.
double ssim(const Tensor& test, const Tensor& ref);

/// Normalised 11-tap Gaussian used by ssim().
std::vector<double> ssim_gaussian_taps();

struct MetricReport {
  struct Entry {
    std::string name;
    double psnr_db = 0.0;
    double ssim = 0.0;
  };

  std::vector<Entry> entries;
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;

  void add(std::string name, const Tensor& test, const Tensor& ref);
  /// Recomputes the aggregate means from the entries.
  void finalize();
  /// "filename,psnr_db,ssim" rows, one per entry, then a "mean" row.
  [[nodiscard]] std::string csv() const;
};

}  // namespace dcr
