// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dcr/checkpoint.hpp"
#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/metrics.hpp"
#include "dcr/ops.hpp"
#include "dcr/seed.hpp"

namespace dcr {

namespace {

// Seed stream identifiers.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kOrderStream = 2;
constexpr std::uint64_t kTrainNoiseStream = 3;
constexpr std::uint64_t kValNoiseStream = 4;

std::string output_init_name(OutputInit init) { return init == OutputInit::kZero ? "zero" : "he"; }

OutputInit parse_output_init(const std::string& s) {
  if (s == "he") return OutputInit::kHe;
  if (s == "zero") return OutputInit::kZero;
  throw DataError("unknown output_init '" + s + "' (expected he or zero)");
}

std::string weights_text(const std::array<double, kWnetStages>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ",";
    out += format_double(w[i]);
  }
  return out;
}

std::array<double, kWnetStages> parse_weights(const std::string& text) {
  std::array<double, kWnetStages> w{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ',')) {
    if (i >= kWnetStages) throw DataError("loss.layer_weights: expected 5 values");
    KeyValue one;
    one.set("w", part);
    w[i++] = one.get_double("w", 0.0);
  }
  if (i != kWnetStages) throw DataError("loss.layer_weights: expected 5 values");
  return w;
}

DenoiserParams make_params(const TrainConfig& config) {
  config.validate();
  DenoiserParams p =
      init_denoiser(config.denoiser, derive_seed(config.seed, {kInitStream}), config.output_init);
  auto named = p.named();
  set_requires_grad(named, true);
  return p;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<Tensor> tensors_of(const std::vector<RawImage>& frames) {
  std::vector<Tensor> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.tensor);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("train: lr must be > 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (steps < 0) throw std::invalid_argument("train: steps must be >= 0");
  if (!(grad_clip >= 0.0)) throw std::invalid_argument("train: grad_clip must be >= 0");
  if (eval_interval < 0) throw std::invalid_argument("train: eval_interval must be >= 0");
  if (checkpoint_interval < 0) {
    throw std::invalid_argument("train: checkpoint_interval must be >= 0");
  }
  if (checkpoint_interval > 0 && checkpoint_dir.empty()) {
    throw std::invalid_argument("train: checkpoint_interval set without checkpoint_dir");
  }
  loss.validate();
  denoiser.validate();
  noise.validate();
}

TrainConfig TrainConfig::from_key_value(const KeyValue& kv) {
  TrainConfig c;
  c.lr = kv.get_double("lr", c.lr);
  c.batch_size = static_cast<int>(kv.get_int("batch_size", c.batch_size));
  c.steps = static_cast<int>(kv.get_int("steps", c.steps));
  c.seed = kv.get_uint("seed", c.seed);
  c.grad_clip = kv.get_double("grad_clip", c.grad_clip);
  c.eval_interval = static_cast<int>(kv.get_int("eval_interval", c.eval_interval));
  c.checkpoint_interval =
      static_cast<int>(kv.get_int("checkpoint_interval", c.checkpoint_interval));
  c.checkpoint_dir = kv.get_string("checkpoint_dir", c.checkpoint_dir);
  c.train_dir = kv.get_string("train_dir", c.train_dir);
  c.val_dir = kv.get_string("val_dir", c.val_dir);
  c.wnet_dir = kv.get_string("wnet", c.wnet_dir);
  c.log_path = kv.get_string("log", c.log_path);

  c.loss.alpha = kv.get_double("loss.alpha", c.loss.alpha);
  if (kv.has("loss.layer_weights")) {
    c.loss.layer_weights = parse_weights(kv.get_string("loss.layer_weights", ""));
  }
  try {
    c.loss.variant =
        parse_similarity_variant(kv.get_string("loss.variant", to_string(c.loss.variant)));
    c.loss.feature_loss_mode =
        parse_feature_loss_mode(kv.get_string("loss.mode", to_string(c.loss.feature_loss_mode)));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  c.loss.eps_cos = kv.get_double("loss.eps_cos", c.loss.eps_cos);
  c.loss.eps_ratio = kv.get_double("loss.eps_ratio", c.loss.eps_ratio);

  c.denoiser.in_frames = static_cast<int>(kv.get_int("denoiser.in_frames", c.denoiser.in_frames));
  c.denoiser.base_width =
      static_cast<int>(kv.get_int("denoiser.base_width", c.denoiser.base_width));
  c.denoiser.depth = static_cast<int>(kv.get_int("denoiser.depth", c.denoiser.depth));
  c.denoiser.leaky_slope = kv.get_double("denoiser.leaky_slope", c.denoiser.leaky_slope);
  c.denoiser.residual = kv.get_bool("denoiser.residual", c.denoiser.residual);
  c.denoiser.input_skip = kv.get_bool("denoiser.input_skip", c.denoiser.input_skip);
  c.output_init = parse_output_init(
      kv.get_string("denoiser.output_init", output_init_name(c.output_init)));

  c.noise.shot_gain = kv.get_double("noise.shot", c.noise.shot_gain);
  c.noise.read_sigma = kv.get_double("noise.read", c.noise.read_sigma);
  c.noise.row_sigma = kv.get_double("noise.row", c.noise.row_sigma);
  c.noise.bias = kv.get_double("noise.bias", c.noise.bias);
  c.noise.quant_bits = static_cast<int>(kv.get_int("noise.bits", c.noise.quant_bits));

  kv.reject_unused();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  return c;
}

KeyValue TrainConfig::to_key_value() const {
  KeyValue kv;
  kv.set("lr", format_double(lr));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("steps", std::to_string(steps));
  kv.set("seed", std::to_string(seed));
  kv.set("grad_clip", format_double(grad_clip));
  kv.set("eval_interval", std::to_string(eval_interval));
  kv.set("checkpoint_interval", std::to_string(checkpoint_interval));
  if (!checkpoint_dir.empty()) kv.set("checkpoint_dir", checkpoint_dir);
  if (!train_dir.empty()) kv.set("train_dir", train_dir);
  if (!val_dir.empty()) kv.set("val_dir", val_dir);
  if (!wnet_dir.empty()) kv.set("wnet", wnet_dir);
  if (!log_path.empty()) kv.set("log", log_path);
  kv.set("loss.alpha", format_double(loss.alpha));
  kv.set("loss.layer_weights", weights_text(loss.layer_weights));
  kv.set("loss.variant", to_string(loss.variant));
  kv.set("loss.mode", to_string(loss.feature_loss_mode));
  kv.set("loss.eps_cos", format_double(loss.eps_cos));
  kv.set("loss.eps_ratio", format_double(loss.eps_ratio));
  kv.set("denoiser.in_frames", std::to_string(denoiser.in_frames));
  kv.set("denoiser.base_width", std::to_string(denoiser.base_width));
  kv.set("denoiser.depth", std::to_string(denoiser.depth));
  kv.set("denoiser.leaky_slope", format_double(denoiser.leaky_slope));
  kv.set("denoiser.residual", denoiser.residual ? "1" : "0");
  kv.set("denoiser.input_skip", denoiser.input_skip ? "1" : "0");
  kv.set("denoiser.output_init", output_init_name(output_init));
  kv.set("noise.shot", format_double(noise.shot_gain));
  kv.set("noise.read", format_double(noise.read_sigma));
  kv.set("noise.row", format_double(noise.row_sigma));
  kv.set("noise.bias", format_double(noise.bias));
  kv.set("noise.bits", std::to_string(noise.quant_bits));
  return kv;
}

std::string format_log_row(const StepLog& row) {
  std::string out = std::to_string(row.step) + "," + format_double(row.total) + "," +
                    format_double(row.l1) + "," + format_double(row.perceptual) + "," +
                    format_double(row.closs) + ",";
  if (row.psnr_val) out += format_double(*row.psnr_val);
  return out;
}

std::string format_log(const std::vector<StepLog>& rows) {
  std::string out = std::string(kTrainLogHeader) + "\n";
  for (const auto& r : rows) out += format_log_row(r) + "\n";
  return out;
}

DenoiserTrainer::DenoiserTrainer(TrainConfig config, std::vector<RawImage> train,
                                 std::vector<RawImage> val, const FrozenWnet* wnet)
    : config_(std::move(config)),
      train_(std::move(train)),
      val_(std::move(val)),
      wnet_(wnet),
      params_(make_params(config_)),
      adam_(params_.named(), AdamOptions{config_.lr, 0.9, 0.999, 1e-8}) {
  if (train_.empty()) throw std::invalid_argument("trainer: empty training set");
  if (wnet_ == nullptr && config_.loss.alpha != 0.0) {
    throw std::invalid_argument("trainer: a pretrained Wnet is required when alpha > 0");
  }
  const Shape s = train_[0].shape();
  for (const auto& img : train_) {
    check_raw_shape(img.tensor);
    if (img.shape() != s) {
      throw ShapeError("trainer: training images differ in shape (" + s.str() + " vs " +
                       img.shape().str() + "); batching needs equal patches");
    }
  }
  for (std::size_t i = 0; i < val_.size(); ++i) {
    check_raw_shape(val_[i].tensor);
    NoiseParams p = config_.noise;
    p.seed = derive_seed(config_.seed, {kValNoiseStream, i});
    val_bursts_.push_back(tensors_of(make_burst(val_[i], p, config_.denoiser.in_frames)));
  }
}

const std::vector<std::size_t>& DenoiserTrainer::epoch_order(std::int64_t epoch) const {
  if (epoch != order_epoch_) {
    order_.resize(train_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(config_.seed, {kOrderStream, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order_.begin(), order_.end(), rng);
    order_epoch_ = epoch;
  }
  return order_;
}

std::vector<RawImage> DenoiserTrainer::training_burst(std::int64_t k, std::size_t* index) const {
  const auto n = static_cast<std::int64_t>(train_.size());
  const std::int64_t epoch = k / n;
  const std::size_t idx = epoch_order(epoch)[static_cast<std::size_t>(k % n)];
  if (index != nullptr) *index = idx;
  NoiseParams p = config_.noise;
  p.seed = derive_seed(config_.seed, {kTrainNoiseStream, static_cast<std::uint64_t>(epoch), idx});
  return make_burst(train_[idx], p, config_.denoiser.in_frames);
}

const StepLog& DenoiserTrainer::step() {
  const int frames = config_.denoiser.in_frames;
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  std::vector<std::vector<Tensor>> per_frame(static_cast<std::size_t>(frames));
  std::vector<Tensor> cleans;
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t idx = 0;
    const auto burst =
        training_burst(step_ * static_cast<std::int64_t>(batch) + static_cast<std::int64_t>(b), &idx);
    for (int f = 0; f < frames; ++f) per_frame[static_cast<std::size_t>(f)].push_back(burst[f].tensor);
    cleans.push_back(train_[idx].tensor);
  }
  std::vector<Tensor> inputs;
  for (auto& f : per_frame) inputs.push_back(batch == 1 ? f[0] : concat_batch(f));
  const Tensor clean = batch == 1 ? cleans[0] : concat_batch(cleans);

  Graph::active().reset();
  const Tensor denoised = denoise_burst(inputs, params_, config_.denoiser);
  const Tensor& negative = inputs[static_cast<std::size_t>(config_.denoiser.center_index())];
  LossBreakdown lb = final_loss(denoised, clean, negative, wnet_, config_.loss);

  StepLog row;
  row.step = step_;
  row.total = lb.total_value;
  row.l1 = lb.l1;
  row.perceptual = lb.perceptual;
  row.closs = config_.loss.alpha == 0.0 ? 0.0 : lb.feature;
  if (!std::isfinite(row.total) || !std::isfinite(row.l1) || !std::isfinite(row.perceptual) ||
      !std::isfinite(lb.feature)) {
    throw NumericalError("train: non-finite loss at step " + std::to_string(step_) +
                         " (total " + format_double(row.total) + ", l1 " + format_double(row.l1) +
                         ", perceptual " + format_double(row.perceptual) + ", feature " +
                         format_double(lb.feature) + ")");
  }

  backward(lb.total);
  if (config_.grad_clip > 0.0) clip_grad_norm(adam_.params(), config_.grad_clip);
  adam_.step();
  adam_.zero_grad();
  ++step_;

  const bool last = step_ == config_.steps;
  const bool due = config_.eval_interval > 0 && step_ % config_.eval_interval == 0;
  if (!val_.empty() && (last || due)) row.psnr_val = validation_psnr();
  log_.push_back(row);

  if (config_.checkpoint_interval > 0 && step_ % config_.checkpoint_interval == 0) {
    save(config_.checkpoint_dir);
  }
  return log_.back();
}

void DenoiserTrainer::run(const std::function<void(const StepLog&)>& on_step) {
  while (step_ < config_.steps) {
    const StepLog& row = step();
    if (on_step) on_step(row);
  }
}

double DenoiserTrainer::validation_psnr() const {
  if (val_.empty()) throw std::logic_error("trainer: no validation set");
  std::vector<double> values;
  for (std::size_t i = 0; i < val_.size(); ++i) {
    values.push_back(psnr(denoise_burst_inference(val_bursts_[i], params_, config_.denoiser),
                          val_[i].tensor));
  }
  return mean(values);
}

double DenoiserTrainer::noisy_validation_psnr() const {
  if (val_.empty()) throw std::logic_error("trainer: no validation set");
  std::vector<double> values;
  const auto c = static_cast<std::size_t>(config_.denoiser.center_index());
  for (std::size_t i = 0; i < val_.size(); ++i) {
    values.push_back(psnr(val_bursts_[i][c], val_[i].tensor));
  }
  return mean(values);
}

double DenoiserTrainer::validation_ssim() const {
  if (val_.empty()) throw std::logic_error("trainer: no validation set");
  std::vector<double> values;
  for (std::size_t i = 0; i < val_.size(); ++i) {
    values.push_back(ssim(denoise_burst_inference(val_bursts_[i], params_, config_.denoiser),
                          val_[i].tensor));
  }
  return mean(values);
}

void DenoiserTrainer::save(const std::filesystem::path& dir) const {
  Checkpoint ckpt;
  ckpt.kind = "denoiser";
  ckpt.step = step_;
  ckpt.adam_t = adam_.t();
  ckpt.config = config_.to_key_value();
  ckpt.params = params_.named();
  ckpt.adam_m = adam_.first_moments();
  ckpt.adam_v = adam_.second_moments();
  ckpt.extra.emplace_back("log.csv", format_log(log_));
  save_checkpoint(dir, ckpt);
}

void DenoiserTrainer::load(const std::filesystem::path& dir) {
  Checkpoint ckpt = load_checkpoint(dir);
  if (ckpt.kind != "denoiser") {
    throw DataError("checkpoint " + dir.string() + " holds a '" + ckpt.kind + "', not a denoiser");
  }
  const DenoiserParams loaded = [&] {
    try {
      return DenoiserParams::from_named(ckpt.params, config_.denoiser);
    } catch (const ShapeError& e) {
      throw DataError("checkpoint " + dir.string() + ": " + e.what());
    }
  }();
  // Copy into the existing tensors: the optimiser holds handles to them.
  auto dst = params_.named();
  const auto src = loaded.named();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    auto out = dst[i].tensor.mutable_data();
    const auto in = src[i].tensor.data();
    std::copy(in.begin(), in.end(), out.begin());
  }
  adam_.restore(ckpt.adam_t, ckpt.adam_m, ckpt.adam_v);
  step_ = ckpt.step;
  log_.clear();
  for (const auto& [name, text] : ckpt.extra) {
    if (name != "log.csv") continue;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cols;
      std::string col;
      std::istringstream ls(line);
      while (std::getline(ls, col, ',')) cols.push_back(col);
      if (line.back() == ',') cols.emplace_back();
      if (cols.size() != 6) throw DataError("checkpoint " + dir.string() + ": malformed log row");
      StepLog row;
      row.step = std::stoll(cols[0]);
      row.total = std::stod(cols[1]);
      row.l1 = std::stod(cols[2]);
      row.perceptual = std::stod(cols[3]);
      row.closs = std::stod(cols[4]);
      if (!cols[5].empty()) row.psnr_val = std::stod(cols[5]);
      log_.push_back(row);
    }
  }
}

DenoiserCheckpoint load_denoiser(const std::filesystem::path& dir) {
  Checkpoint ckpt = load_checkpoint(dir);
  if (ckpt.kind != "denoiser") {
    throw DataError("checkpoint " + dir.string() + " holds a '" + ckpt.kind + "', not a denoiser");
  }
  DenoiserCheckpoint out;
  out.config = TrainConfig::from_key_value(ckpt.config);
  out.step = ckpt.step;
  try {
    out.params = DenoiserParams::from_named(ckpt.params, out.config.denoiser);
  } catch (const ShapeError& e) {
    throw DataError("checkpoint " + dir.string() + ": " + e.what());
  }
  return out;
}

}  // namespace dcr
