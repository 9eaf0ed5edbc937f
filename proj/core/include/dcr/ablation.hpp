// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dcr/raw_image.hpp"
#include "dcr/trainer.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

enum class AblationMode {
  kBaseline,  // alpha = 0
  kWnetL1,    // feature term = weighted L1 between Wnet taps
  kDcr,       // feature term = contrastive ratio loss
};

std::string to_string(AblationMode m);
AblationMode parse_ablation_mode(const std::string& s);

/// `base` with the loss settings of `mode` applied.
TrainConfig ablation_config(const TrainConfig& base, AblationMode mode);

struct AblationRow {
  AblationMode mode = AblationMode::kBaseline;
  std::int64_t steps = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double noisy_psnr_db = 0.0;
  double closs_step0 = 0.0;  // logged feature term at the first step
  std::vector<StepLog> log;
};

struct AblationResult {
  std::vector<AblationRow> rows;

  /// Header comment with the published full-scale reference figures, then
  /// "mode,steps,psnr_db,ssim,noisy_psnr_db,closs_step0" rows.
  [[nodiscard]] std::string csv() const;
};

/// Trains one denoiser per mode with identical seed, data and schedule and
/// evaluates each on `test`. `base.loss.alpha` must be > 0 (it is zeroed for
/// the baseline).
AblationResult run_ablation(
    const TrainConfig& base, const std::vector<RawImage>& train, const std::vector<RawImage>& test,
    const FrozenWnet& wnet, const std::vector<AblationMode>& modes,
    const std::function<void(AblationMode, const StepLog&)>& on_step = {});

}  // namespace dcr
