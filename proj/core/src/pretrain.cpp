// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dcr/adam.hpp"
#include "dcr/errors.hpp"
#include "dcr/graph.hpp"
#include "dcr/ops.hpp"
#include "dcr/seed.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

namespace {

enum Stream : std::uint64_t { kSplit = 1, kInit = 2, kValNoise = 3, kTrainNoise = 4, kOrder = 5 };

struct Sample {
  Tensor image;
  int label;
};

// Clean sample i followed by its noisy counterpart, for every i.
std::vector<Sample> with_counterparts(std::span<const RawImage> clean,
                                      std::span<const std::size_t> idx, const NoiseParams& noise,
                                      std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t epoch) {
  std::vector<Sample> out;
  out.reserve(2 * idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    NoiseParams p = noise;
    p.seed = derive_seed(seed, {stream, epoch, idx[k]});
    const RawImage& c = clean[idx[k]];
    out.push_back({c.tensor, 0});
    out.push_back({synthesize_noise(c, p).tensor, 1});
  }
  return out;
}

double evaluate_accuracy(const WnetParams& params, const WnetConfig& config,
                         const std::vector<Sample>& samples, std::size_t batch) {
  NoGradGuard no_grad;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < samples.size(); b += batch) {
    const std::size_t e = std::min(samples.size(), b + batch);
    std::vector<Tensor> images;
    std::vector<int> labels;
    for (std::size_t i = b; i < e; ++i) {
      images.push_back(samples[i].image);
      labels.push_back(samples[i].label);
    }
    const Tensor logits = wnet_forward(concat_batch(images), params, config).logits;
    correct += static_cast<std::size_t>(
        std::lround(classification_accuracy(logits, labels) * static_cast<double>(e - b)));
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace

PretrainResult wnet_pretrain(std::span<const RawImage> clean_set, const NoiseParams& noise,
                             const WnetConfig& config, const PretrainOptions& options) {
  config.validate();
  noise.validate();
  if (clean_set.empty()) throw std::invalid_argument("wnet_pretrain: empty dataset");
  if (options.epochs < 1) throw std::invalid_argument("wnet_pretrain: epochs must be >= 1");
  if (options.batch_size < 1) throw std::invalid_argument("wnet_pretrain: batch_size must be >= 1");

  std::vector<std::size_t> order(clean_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 split_rng(derive_seed(options.seed, {kSplit}));
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto val_count = static_cast<std::size_t>(
      std::lround(options.val_fraction * static_cast<double>(clean_set.size())));
  if (val_count == 0 || val_count >= clean_set.size()) {
    throw std::invalid_argument("wnet_pretrain: split of " + std::to_string(clean_set.size()) +
                                " samples leaves an empty train or validation side");
  }
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + val_count);
  const std::vector<std::size_t> train_idx(order.begin() + val_count, order.end());

  const auto val_samples =
      with_counterparts(clean_set, val_idx, noise, options.seed, kValNoise, 0);

  WnetParams params = init_wnet(config, derive_seed(options.seed, {kInit}));
  auto named = params.named();
  set_requires_grad(named, true);
  Adam adam(named, AdamOptions{.lr = options.lr});

  PretrainResult result;
  result.train_count = train_idx.size();
  result.val_count = val_idx.size();
  result.best_val_accuracy = -1.0;

  std::vector<Sample> train;
  const auto batch = static_cast<std::size_t>(options.batch_size);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    if (epoch == 1 || options.fresh_noise_each_epoch) {
      train = with_counterparts(clean_set, train_idx, noise, options.seed, kTrainNoise,
                                options.fresh_noise_each_epoch ? epoch : 1);
    }
    std::vector<std::size_t> perm(train.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 order_rng(derive_seed(options.seed, {kOrder, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(perm.begin(), perm.end(), order_rng);

    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < perm.size(); b += batch) {
      const std::size_t e = std::min(perm.size(), b + batch);
      std::vector<Tensor> images;
      std::vector<int> labels;
      for (std::size_t i = b; i < e; ++i) {
        images.push_back(train[perm[i]].image);
        labels.push_back(train[perm[i]].label);
      }
      Graph::active().reset();
      const Tensor logits = wnet_forward(concat_batch(images), params, config).logits;
      const Tensor loss = softmax_cross_entropy(logits, labels);
      if (!std::isfinite(loss.item())) {
        throw NumericalError("wnet_pretrain: non-finite loss at epoch " + std::to_string(epoch) +
                             " step " + std::to_string(steps));
      }
      adam.zero_grad();
      backward(loss);
      adam.step();
      loss_sum += loss.item();
      ++steps;
    }
    Graph::active().reset();

    PretrainEpoch stats{epoch, loss_sum / static_cast<double>(steps),
                        evaluate_accuracy(params, config, val_samples, batch)};
    result.curve.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
    if (stats.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = stats.val_accuracy;
      result.best_epoch = epoch;
      result.params = params.clone();
    }
    if (options.stop_at_accuracy && stats.val_accuracy >= *options.stop_at_accuracy) break;
  }
  adam.zero_grad();
  return result;
}

}  // namespace dcr
