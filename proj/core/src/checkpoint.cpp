// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "dcr/errors.hpp"
#include "dcr/ten_io.hpp"

namespace dcr {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";

std::string shape_text(const Shape& s) {
  return std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) + "," +
         std::to_string(s.w);
}

Shape parse_shape(const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(part);
  const auto bad = [&] {
    return DataError("checkpoint manifest: bad shape for " + what + ": '" + text + "'");
  };
  if (parts.size() != 4) throw bad();
  std::int64_t dims[4] = {};
  for (int k = 0; k < 4; ++k) {
    try {
      std::size_t used = 0;
      dims[k] = std::stoll(parts[k], &used);
      if (used != parts[k].size() || dims[k] < 1) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  return Shape{dims[0], dims[1], dims[2], dims[3]};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Tensor read_checked(const fs::path& path, const Shape& expected) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw DataError("checkpoint: missing file " + path.string());
  const auto actual = fs::file_size(path, ec);
  if (ec) throw DataError("checkpoint: cannot stat " + path.string());
  const auto want = ten_file_bytes(expected);
  if (actual != want) {
    throw DataError("checkpoint: " + path.string() + " has " + std::to_string(actual) +
                    " bytes, expected " + std::to_string(want) + " for shape " + expected.str());
  }
  Tensor t = read_ten(path);
  if (t.shape() != expected) {
    throw DataError("checkpoint: " + path.string() + " holds " + t.shape().str() +
                    ", manifest says " + expected.str());
  }
  return t;
}

}  // namespace

void save_checkpoint(const fs::path& dir, const Checkpoint& ckpt) {
  if (!ckpt.adam_m.empty() && ckpt.adam_m.size() != ckpt.params.size()) {
    throw std::invalid_argument("save_checkpoint: adam_m count differs from params");
  }
  if (ckpt.adam_m.size() != ckpt.adam_v.size()) {
    throw std::invalid_argument("save_checkpoint: adam_m and adam_v counts differ");
  }
  std::error_code ec;
  fs::create_directories(dir / "params", ec);
  if (ec) throw DataError("cannot create " + (dir / "params").string() + ": " + ec.message());
  const bool moments = !ckpt.adam_m.empty();
  if (moments) {
    fs::create_directories(dir / "adam_m");
    fs::create_directories(dir / "adam_v");
  }
  if (!ckpt.extra.empty()) fs::create_directories(dir / "extra");

  KeyValue manifest;
  manifest.set("format_version", std::to_string(kCheckpointFormatVersion));
  manifest.set("kind", ckpt.kind);
  manifest.set("step", std::to_string(ckpt.step));
  manifest.set("adam_t", std::to_string(ckpt.adam_t));
  manifest.set("moments", moments ? "1" : "0");
  manifest.set("param_count", std::to_string(ckpt.params.size()));
  for (const auto& [k, v] : ckpt.config.entries()) manifest.set("config." + k, v);
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    const auto& p = ckpt.params[i];
    manifest.set("param." + p.name, shape_text(p.tensor.shape()));
    manifest.set("order." + std::to_string(i), p.name);
    write_ten(dir / "params" / (p.name + ".ten"), p.tensor);
    if (moments) {
      write_ten(dir / "adam_m" / (p.name + ".ten"), ckpt.adam_m[i]);
      write_ten(dir / "adam_v" / (p.name + ".ten"), ckpt.adam_v[i]);
    }
  }
  for (const auto& [name, text] : ckpt.extra) {
    manifest.set("extra." + name, "1");
    write_text(dir / "extra" / name, text);
  }
  // Manifest last: a directory without one never loads.
  write_text(dir / kManifest, manifest.str());
}

KeyValue read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifest;
  std::error_code ec;
  if (!fs::exists(path, ec)) throw DataError("checkpoint: no manifest in " + dir.string());
  KeyValue kv = KeyValue::parse(read_text(path), path.string());
  const std::int64_t version = kv.get_int("format_version", -1);
  if (version != kCheckpointFormatVersion) {
    throw DataError("checkpoint " + dir.string() + ": format version " + std::to_string(version) +
                    " is incompatible with supported version " +
                    std::to_string(kCheckpointFormatVersion));
  }
  return kv;
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const KeyValue kv = read_manifest(dir);
  Checkpoint ckpt;
  ckpt.kind = kv.require("kind");
  ckpt.step = kv.get_int("step", 0);
  ckpt.adam_t = kv.get_int("adam_t", 0);
  const bool moments = kv.get_bool("moments", false);
  const std::int64_t count = kv.get_int("param_count", -1);
  if (count < 0) throw DataError("checkpoint " + dir.string() + ": missing param_count");
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind("config.", 0) == 0) ckpt.config.set(k.substr(7), v);
  }
  for (std::int64_t i = 0; i < count; ++i) {
    const std::string name = kv.require("order." + std::to_string(i));
    const Shape shape = parse_shape(kv.require("param." + name), name);
    ckpt.params.push_back({name, read_checked(dir / "params" / (name + ".ten"), shape)});
    if (moments) {
      ckpt.adam_m.push_back(read_checked(dir / "adam_m" / (name + ".ten"), shape));
      ckpt.adam_v.push_back(read_checked(dir / "adam_v" / (name + ".ten"), shape));
    }
  }
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind("extra.", 0) == 0) {
      const std::string name = k.substr(6);
      ckpt.extra.emplace_back(name, read_text(dir / "extra" / name));
    }
  }
  return ckpt;
}

KeyValue to_key_value(const WnetConfig& config) {
  KeyValue kv;
  kv.set("input_channels", std::to_string(config.input_channels));
  std::string widths;
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    if (i) widths += ",";
    widths += std::to_string(config.stage_widths[i]);
  }
  kv.set("stage_widths", widths);
  kv.set("kernel_size", std::to_string(config.kernel_size));
  kv.set("leaky_slope", format_double(config.leaky_slope));
  return kv;
}

WnetConfig wnet_config_from(const KeyValue& kv, const std::string& prefix) {
  WnetConfig config;
  config.input_channels =
      static_cast<int>(kv.get_int(prefix + "input_channels", config.input_channels));
  config.kernel_size = static_cast<int>(kv.get_int(prefix + "kernel_size", config.kernel_size));
  config.leaky_slope = kv.get_double(prefix + "leaky_slope", config.leaky_slope);
  if (kv.has(prefix + "stage_widths")) {
    std::istringstream in(kv.get_string(prefix + "stage_widths", ""));
    std::string part;
    std::size_t i = 0;
    while (std::getline(in, part, ',')) {
      if (i >= kWnetStages) throw DataError("wnet config: too many stage widths");
      try {
        config.stage_widths[i++] = std::stoi(part);
      } catch (const std::exception&) {
        throw DataError("wnet config: bad stage width '" + part + "'");
      }
    }
    if (i != kWnetStages) throw DataError("wnet config: expected 5 stage widths");
  }
  config.validate();
  return config;
}

void save_wnet(const fs::path& dir, const WnetCheckpoint& wnet) {
  wnet.params.check(wnet.config);
  Checkpoint ckpt;
  ckpt.kind = "wnet";
  ckpt.step = wnet.epoch;
  ckpt.config = to_key_value(wnet.config);
  ckpt.config.set("epoch", std::to_string(wnet.epoch));
  ckpt.config.set("val_accuracy", format_double(wnet.val_accuracy));
  ckpt.params = wnet.params.named();
  save_checkpoint(dir, ckpt);
}

WnetCheckpoint load_wnet(const fs::path& dir) {
  Checkpoint ckpt = load_checkpoint(dir);
  if (ckpt.kind != "wnet") {
    throw DataError("checkpoint " + dir.string() + " holds a '" + ckpt.kind + "', not a wnet");
  }
  WnetCheckpoint out;
  try {
    out.config = wnet_config_from(ckpt.config);
  } catch (const std::invalid_argument& e) {
    throw DataError("checkpoint " + dir.string() + ": " + e.what());
  }
  out.epoch = static_cast<int>(ckpt.config.get_int("epoch", 0));
  out.val_accuracy = ckpt.config.get_double("val_accuracy", 0.0);
  try {
    out.params = WnetParams::from_named(ckpt.params, out.config);
  } catch (const ShapeError& e) {
    throw DataError("checkpoint " + dir.string() + ": " + e.what());
  }
  return out;
}

}  // namespace dcr
