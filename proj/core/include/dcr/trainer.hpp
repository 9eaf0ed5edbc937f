// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcr/adam.hpp"
#include "dcr/denoiser.hpp"
#include "dcr/key_value.hpp"
#include "dcr/losses.hpp"
#include "dcr/noise.hpp"
#include "dcr/raw_image.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

struct TrainConfig {
  double lr = 1e-4;
  int batch_size = 1;
  int steps = 500;
  std::uint64_t seed = 0;
  /// Global L2 gradient norm limit; 0 disables clipping.
  double grad_clip = 10.0;
  /// Validation PSNR every this many steps (0: only after the last step).
  int eval_interval = 0;
  /// Save to checkpoint_dir every this many steps (0: never).
  int checkpoint_interval = 0;
  std::string checkpoint_dir;

  LossConfig loss;
  DenoiserConfig denoiser;
  OutputInit output_init = OutputInit::kZero;
  // Moderate low-light level by default. The seed field is ignored; per-sample
  // seeds derive from `seed`.
  NoiseParams noise{.shot_gain = 0.01, .read_sigma = 0.05};

  // Paths used by the command-line front end only.
  std::string train_dir;
  std::string val_dir;
  std::string wnet_dir;
  std::string log_path;

  void validate() const;

  /// Keys: lr, batch_size, steps, seed, grad_clip, eval_interval,
  /// checkpoint_interval, checkpoint_dir, train_dir, val_dir, wnet, log,
  /// loss.{alpha,layer_weights,variant,eps_cos,eps_ratio,mode},
  /// denoiser.{in_frames,base_width,depth,leaky_slope,residual,input_skip,output_init},
  /// noise.{shot,read,row,bias,bits}. Unknown keys are rejected.
  static TrainConfig from_key_value(const KeyValue& kv);
  [[nodiscard]] KeyValue to_key_value() const;
};

struct StepLog {
  std::int64_t step = 0;
  double total = 0.0;
  double l1 = 0.0;
  double perceptual = 0.0;
  /// Feature term before alpha; logged as 0 when alpha is 0.
  double closs = 0.0;
  std::optional<double> psnr_val;
};

inline constexpr const char* kTrainLogHeader = "step,total,l1,perceptual,closs,psnr_val";
std::string format_log_row(const StepLog& row);
std::string format_log(const std::vector<StepLog>& rows);

/// Denoiser training loop. The sample order, every training burst and every
/// validation burst are pure functions of (seed, step), so a run resumed from
/// a checkpoint reproduces the uninterrupted run bit for bit.
class DenoiserTrainer {
 public:
  /// `wnet` may be null only when loss.alpha is 0; it must outlive the trainer.
  DenoiserTrainer(TrainConfig config, std::vector<RawImage> train, std::vector<RawImage> val,
                  const FrozenWnet* wnet);

  /// One optimiser step. Throws NumericalError with the step index and the
  /// term breakdown when the loss is not finite.
  const StepLog& step();
  /// Steps until `config.steps` have been taken.
  void run(const std::function<void(const StepLog&)>& on_step = {});

  /// Mean validation PSNR of the current model's inference output.
  [[nodiscard]] double validation_psnr() const;
  /// Mean validation PSNR of the noisy centre frames (the no-op baseline).
  [[nodiscard]] double noisy_validation_psnr() const;
  /// Mean validation SSIM of the current model.
  [[nodiscard]] double validation_ssim() const;

  void save(const std::filesystem::path& dir) const;
  /// Restores parameters, optimiser state, step counter and log. The
  /// checkpoint's denoiser shape must match this trainer's configuration.
  void load(const std::filesystem::path& dir);

  [[nodiscard]] std::int64_t steps_done() const { return step_; }
  [[nodiscard]] const TrainConfig& config() const { return config_; }
  [[nodiscard]] const DenoiserParams& params() const { return params_; }
  [[nodiscard]] const Adam& optimizer() const { return adam_; }
  [[nodiscard]] const std::vector<StepLog>& log() const { return log_; }

  /// The burst fed to the network for training sample `k` (0-based across
  /// steps and batch). Exposed for tests.
  [[nodiscard]] std::vector<RawImage> training_burst(std::int64_t k, std::size_t* index) const;

 private:
  const std::vector<std::size_t>& epoch_order(std::int64_t epoch) const;

  TrainConfig config_;
  std::vector<RawImage> train_;
  std::vector<RawImage> val_;
  std::vector<std::vector<Tensor>> val_bursts_;
  const FrozenWnet* wnet_;
  DenoiserParams params_;
  Adam adam_;
  std::int64_t step_ = 0;
  std::vector<StepLog> log_;
  mutable std::int64_t order_epoch_ = -1;
  mutable std::vector<std::size_t> order_;
};

struct DenoiserCheckpoint {
  DenoiserParams params;
  TrainConfig config;
  std::int64_t step = 0;
};

/// Parameters and configuration of a checkpoint written by DenoiserTrainer.
DenoiserCheckpoint load_denoiser(const std::filesystem::path& dir);

}  // namespace dcr
