// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "dcr/checkpoint.hpp"
#include "dcr/errors.hpp"
#include "dcr/key_value.hpp"
#include "dcr/ten_io.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

namespace fs = std::filesystem;
using testing::random_tensor;
using testing::TempDir;

Checkpoint sample_checkpoint() {
  Checkpoint c;
  c.kind = "test";
  c.step = 17;
  c.adam_t = 17;
  c.config.set("lr", "0.001");
  c.config.set("name", "demo");
  c.params = {{"a.weight", random_tensor(Shape{2, 3, 3, 3}, 1)},
              {"a.bias", random_tensor(Shape{1, 2, 1, 1}, 2)}};
  c.adam_m = {random_tensor(Shape{2, 3, 3, 3}, 3), random_tensor(Shape{1, 2, 1, 1}, 4)};
  c.adam_v = {random_tensor(Shape{2, 3, 3, 3}, 5, 0, 1), random_tensor(Shape{1, 2, 1, 1}, 6, 0, 1)};
  c.extra = {{"log.csv", "step,total\n0,1.5\n"}};
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Checkpoint, RoundTripIsExact) {
  TempDir dir("ckpt_roundtrip");
  const Checkpoint c = sample_checkpoint();
  save_checkpoint(dir.path(), c);
  const Checkpoint d = load_checkpoint(dir.path());
  EXPECT_EQ(d.kind, "test");
  EXPECT_EQ(d.step, 17);
  EXPECT_EQ(d.adam_t, 17);
  EXPECT_EQ(d.config.entries(), c.config.entries());
  ASSERT_EQ(d.params.size(), 2u);
  EXPECT_EQ(d.params[0].name, "a.weight");  // manifest order, not alphabetical
  EXPECT_TRUE(identical(d.params, c.params));
  ASSERT_EQ(d.adam_m.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(identical(d.adam_m[i], c.adam_m[i]));
    EXPECT_TRUE(identical(d.adam_v[i], c.adam_v[i]));
  }
  ASSERT_EQ(d.extra.size(), 1u);
  EXPECT_EQ(d.extra[0].second, c.extra[0].second);
  EXPECT_TRUE(fs::exists(dir / "extra" / "log.csv"));
}

TEST(Checkpoint, WithoutMomentsWritesNoMomentDirs) {
  TempDir dir("ckpt_nomoments");
  Checkpoint c = sample_checkpoint();
  c.adam_m.clear();
  c.adam_v.clear();
  c.adam_t = 0;
  save_checkpoint(dir.path(), c);
  EXPECT_FALSE(fs::exists(dir / "adam_m"));
  const Checkpoint d = load_checkpoint(dir.path());
  EXPECT_TRUE(d.adam_m.empty());
  EXPECT_TRUE(identical(d.params, c.params));
}

TEST(Checkpoint, TruncatedFileNamesFileAndSizes) {
  TempDir dir("ckpt_truncated");
  save_checkpoint(dir.path(), sample_checkpoint());
  const fs::path victim = dir / "params" / "a.weight.ten";
  const auto full = fs::file_size(victim);
  fs::resize_file(victim, full - 8);
  try {
    load_checkpoint(dir.path());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("a.weight.ten"), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(full)), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(full - 8)), std::string::npos) << msg;
  }
  EXPECT_EQ(full, ten_file_bytes(Shape{2, 3, 3, 3}));
}

TEST(Checkpoint, MomentSizeMismatchAlsoCaught) {
  TempDir dir("ckpt_moment_size");
  save_checkpoint(dir.path(), sample_checkpoint());
  write_ten(dir / "adam_v" / "a.bias.ten", Tensor(Shape{1, 3, 1, 1}));
  EXPECT_THROW(load_checkpoint(dir.path()), DataError);
}

TEST(Checkpoint, MissingFileOrManifest) {
  TempDir dir("ckpt_missing");
  save_checkpoint(dir.path(), sample_checkpoint());
  fs::remove(dir / "params" / "a.bias.ten");
  EXPECT_THROW(load_checkpoint(dir.path()), DataError);
  TempDir empty("ckpt_empty");
  EXPECT_THROW(load_checkpoint(empty.path()), DataError);
}

TEST(Checkpoint, VersionMismatchRejected) {
  TempDir dir("ckpt_version");
  save_checkpoint(dir.path(), sample_checkpoint());
  const fs::path manifest = dir / "manifest.txt";
  std::string text = slurp(manifest);
  const std::string key = "format_version=" + std::to_string(kCheckpointFormatVersion);
  const auto at = text.find(key);
  ASSERT_NE(at, std::string::npos);
  text.replace(at, key.size(), "format_version=" + std::to_string(kCheckpointFormatVersion + 1));
  std::ofstream(manifest, std::ios::trunc) << text;
  try {
    load_checkpoint(dir.path());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("format version 2"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, MismatchedMomentCountRejectedOnSave) {
  TempDir dir("ckpt_bad_save");
  Checkpoint c = sample_checkpoint();
  c.adam_v.pop_back();
  EXPECT_THROW(save_checkpoint(dir.path(), c), std::invalid_argument);
}

TEST(KeyValue, ParsesCommentsAndWhitespace) {
  const KeyValue kv = KeyValue::parse("# comment\n\n lr = 0.5 \nname=x y\nflag=true\nn=-3\n");
  EXPECT_EQ(kv.get_double("lr", 0), 0.5);
  EXPECT_EQ(kv.get_string("name", ""), "x y");
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_int("n", 0), -3);
  EXPECT_EQ(kv.get_int("absent", 9), 9);
  EXPECT_NO_THROW(kv.reject_unused());
}

TEST(KeyValue, MalformedInputNamesLine) {
  try {
    KeyValue::parse("a=1\nbroken\n", "cfg.txt");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(KeyValue::parse("a=1\na=2\n"), DataError);
  EXPECT_THROW(KeyValue::parse("=2\n"), DataError);
  const KeyValue kv = KeyValue::parse("x=abc\ny=1.5\n");
  EXPECT_THROW(kv.get_double("x", 0), DataError);
  EXPECT_THROW(kv.get_int("y", 0), DataError);
  EXPECT_THROW(kv.get_bool("x", false), DataError);
  EXPECT_THROW(kv.require("z"), DataError);
}

TEST(KeyValue, UnusedKeysReported) {
  const KeyValue kv = KeyValue::parse("lr=1\nlrr=2\n");
  kv.get_double("lr", 0);
  EXPECT_EQ(kv.unused_keys(), (std::set<std::string>{"lrr"}));
  try {
    kv.reject_unused();
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("lrr"), std::string::npos);
  }
}

TEST(KeyValue, StrRoundTripsDoubles) {
  KeyValue kv;
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.05}) {
    kv.set("v", format_double(v));
    EXPECT_EQ(KeyValue::parse(kv.str()).get_double("v", 0), v);
  }
  EXPECT_EQ(format_double(0.05), "0.05");
}

TEST(WnetCheckpoint, SaveLoadRoundTrip) {
  TempDir dir("ckpt_wnet");
  WnetConfig cfg;
  cfg.stage_widths = {3, 4, 4, 5, 5};
  WnetCheckpoint w{init_wnet(cfg, 3), cfg, 4, 0.875};
  save_wnet(dir.path(), w);
  const WnetCheckpoint back = load_wnet(dir.path());
  EXPECT_EQ(back.config.stage_widths, cfg.stage_widths);
  EXPECT_EQ(back.epoch, 4);
  EXPECT_EQ(back.val_accuracy, 0.875);
  EXPECT_TRUE(identical(back.params.named(), w.params.named()));
}

TEST(WnetCheckpoint, WrongKindRejected) {
  TempDir dir("ckpt_wnet_kind");
  save_checkpoint(dir.path(), sample_checkpoint());
  EXPECT_THROW(load_wnet(dir.path()), DataError);
}

TEST(WnetCheckpoint, ConfigKeyValueRoundTrip) {
  WnetConfig cfg;
  cfg.stage_widths = {8, 8, 16, 16, 32};
  cfg.leaky_slope = 0.2;
  const WnetConfig back = wnet_config_from(to_key_value(cfg));
  EXPECT_EQ(back.stage_widths, cfg.stage_widths);
  EXPECT_EQ(back.leaky_slope, 0.2);
  EXPECT_THROW(wnet_config_from(KeyValue::parse("stage_widths=1,2,3\n")), DataError);
}

}  // namespace
}  // namespace dcr
