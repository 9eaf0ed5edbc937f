// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dcr/key_value.hpp"
#include "dcr/nn.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

inline constexpr int kCheckpointFormatVersion = 1;

/// On-disk layout of a checkpoint directory:
///   manifest.txt       key=value: format_version, kind, step, adam_t,
///                      config.<key>, param.<name>=N,C,H,W per parameter
///   params/<name>.ten  parameter values
///   adam_m/<name>.ten  Adam first moments (only when adam_t > 0 or present)
///   adam_v/<name>.ten  Adam second moments
///   extra/<file>       opaque text attachments (e.g. the training log)
struct Checkpoint {
  std::string kind;
  std::int64_t step = 0;
  std::int64_t adam_t = 0;
  KeyValue config;
  std::vector<NamedTensor> params;
  std::vector<Tensor> adam_m;  // empty, or one per parameter
  std::vector<Tensor> adam_v;
  std::vector<std::pair<std::string, std::string>> extra;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);

/// Every .ten file is length-checked against the manifest shape before it is
/// decoded. Throws DataError on a version mismatch, a missing file or a size
/// mismatch (naming the file and both byte counts).
Checkpoint load_checkpoint(const std::filesystem::path& dir);

/// Reads only manifest.txt.
KeyValue read_manifest(const std::filesystem::path& dir);

struct WnetCheckpoint {
  WnetParams params;
  WnetConfig config;
  int epoch = 0;
  double val_accuracy = 0.0;
};

void save_wnet(const std::filesystem::path& dir, const WnetCheckpoint& wnet);
/// Throws DataError when the directory does not hold a Wnet checkpoint.
WnetCheckpoint load_wnet(const std::filesystem::path& dir);

KeyValue to_key_value(const WnetConfig& config);
WnetConfig wnet_config_from(const KeyValue& kv, const std::string& prefix = "");

}  // namespace dcr
