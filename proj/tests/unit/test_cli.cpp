// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dcr/checkpoint.hpp"
#include "dcr/key_value.hpp"
#include "dcr/synthetic.hpp"
#include "dcr/ten_io.hpp"
#include "dcr/wavelet.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with stdout captured and stderr discarded.
CliResult dcr_cli(const std::string& args, const TempDir& dir) {
  const fs::path capture = dir / "stdout.txt";
  const std::string cmd =
      std::string("\"") + DCR_CLI_PATH + "\" " + args + " >\"" + capture.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::ostringstream os;
  os << in.rdbuf();
  r.out = os.str();
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void write_clean_dir(const fs::path& dir, int count, std::int64_t extent, std::uint64_t seed) {
  fs::create_directories(dir);
  const auto set = synthetic_set(count, extent, extent, seed);
  for (int i = 0; i < count; ++i) {
    write_ten(dir / ("img" + std::to_string(i) + ".ten"), set[static_cast<std::size_t>(i)].tensor);
  }
}

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(dcr_cli("", dir).code, 1);
  EXPECT_EQ(dcr_cli("frobnicate", dir).code, 1);
  EXPECT_EQ(dcr_cli("dwt", dir).code, 1);  // --in is required
  EXPECT_EQ(dcr_cli("gradcheck --instances 1 --filter no_such_case", dir).code, 1);
  EXPECT_EQ(dcr_cli("synth-noise --input x --out y --noise volume=3", dir).code, 1);
  EXPECT_EQ(dcr_cli("--help", dir).code, 0);
}

TEST(Cli, DataErrorsExitTwo) {
  TempDir dir;
  EXPECT_EQ(dcr_cli("dwt --in " + q(dir / "missing.ten") + " --out " + q(dir / "b"), dir).code, 2);
  std::ofstream(dir / "bad.ten") << "garbage";
  EXPECT_EQ(dcr_cli("dwt --in " + q(dir / "bad.ten") + " --out-prefix " + q(dir / "x_"), dir).code,
            2);
  EXPECT_EQ(dcr_cli("eval --pred-dir " + q(dir.path()) + " --ref-dir " + q(dir / "nope"), dir).code, 2);
}

TEST(Cli, DwtRoundTrip) {
  TempDir dir;
  const Tensor img = synthetic_scene(1, 8, 12).tensor;
  write_ten(dir / "img.ten", img);
  ASSERT_EQ(dcr_cli("dwt --in " + q(dir / "img.ten") + " --out-prefix " + q(dir / "b_"), dir).code,
            0);
  const WaveletBands bands = haar_dwt2d(img);
  EXPECT_TRUE(identical(read_ten(dir / "b_ll.ten"), bands.ll));
  EXPECT_TRUE(identical(read_ten(dir / "b_hh.ten"), bands.hh));
  ASSERT_EQ(dcr_cli("dwt --inverse --in " + q(dir / "b_") + " --out " + q(dir / "back.ten"), dir)
                .code,
            0);
  const Tensor back = read_ten(dir / "back.ten");
  ASSERT_EQ(back.shape(), img.shape());
  for (std::int64_t i = 0; i < img.numel(); ++i) EXPECT_NEAR(back.data()[i], img.data()[i], 1e-12);

  ASSERT_EQ(dcr_cli("dwt --in " + q(dir / "img.ten") + " --out " + q(dir / "bands"), dir).code, 0);
  EXPECT_TRUE(fs::exists(dir / "bands" / "lh.ten"));
  EXPECT_EQ(dcr_cli("dwt --in " + q(dir / "img.ten") + " --out " + q(dir / "bands") +
                        " --out-prefix " + q(dir / "c_"),
                    dir)
                .code,
            1);
}

TEST(Cli, SynthNoiseWritesBurstsAndManifest) {
  TempDir dir;
  write_clean_dir(dir / "clean", 2, 8, 3);
  const CliResult r = dcr_cli("--seed 9 synth-noise --clean-dir " + q(dir / "clean") + " --out-dir " +
                            q(dir / "noisy") + " --frames 3 --read 0.02 --png",
                        dir);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "noisy" / "img0_f00.ten"));
  EXPECT_TRUE(fs::exists(dir / "noisy" / "img1_f02.ten"));
  EXPECT_TRUE(fs::exists(dir / "noisy" / "img1_f02.png"));
  const KeyValue m = KeyValue::load(dir / "noisy" / "manifest.txt");
  EXPECT_EQ(m.get_int("bursts", 0), 2);
  EXPECT_EQ(m.get_int("frames", 0), 3);
  EXPECT_EQ(m.get_string("burst.1.source", ""), "img1.ten");
  EXPECT_NE(m.get_string("burst.0.noise", "").find("read=0.02"), std::string::npos);
  EXPECT_NE(r.out.find("read=0.02"), std::string::npos);
}

TEST(Cli, IngestSynthetic) {
  TempDir dir;
  const CliResult r = dcr_cli("--seed 1 ingest --synthetic 5 --synthetic-size 32 --patch 8 --out " +
                            q(dir / "data"),
                        dir);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("train 16 patches (4 files)"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "data" / "manifest.txt"));
}

TEST(Cli, TrainDenoiseEvalFlow) {
  TempDir dir;
  write_clean_dir(dir / "train", 3, 16, 4);  // SSIM needs 11 x 11
  write_clean_dir(dir / "val", 1, 16, 5);
  {
    std::ofstream cfg(dir / "train.cfg");
    cfg << "# tiny run\n"
        << "steps=2\nlr=0.001\nloss.alpha=0\n"
        << "denoiser.base_width=4\ndenoiser.depth=1\ndenoiser.in_frames=3\n"
        << "train_dir=" << (dir / "train").string() << "\n"
        << "val_dir=" << (dir / "val").string() << "\n"
        << "checkpoint_dir=" << (dir / "ckpt").string() << "\n"
        << "log=" << (dir / "log.csv").string() << "\n";
  }
  const CliResult t = dcr_cli("train-denoiser --config " + q(dir / "train.cfg"), dir);
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("step 2"), std::string::npos) << t.out;
  EXPECT_TRUE(fs::exists(dir / "ckpt" / "manifest.txt"));
  EXPECT_TRUE(fs::exists(dir / "log.csv"));

  ASSERT_EQ(dcr_cli("synth-noise --input " + q(dir / "val") + " --out " + q(dir / "noisy") +
                        " --frames 3",
                    dir)
                .code,
            0);
  std::string frames;
  for (int k = 0; k < 3; ++k) frames += " " + q(dir / "noisy" / ("img0_f0" + std::to_string(k) + ".ten"));
  fs::create_directories(dir / "pred");
  ASSERT_EQ(dcr_cli("denoise --ckpt " + q(dir / "ckpt") + " --burst" + frames + " --out " +
                        q(dir / "pred" / "img0.ten") + " --png " + q(dir / "pred.png"),
                    dir)
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "pred.png"));
  EXPECT_EQ(dcr_cli("denoise --ckpt " + q(dir / "ckpt") + " --burst" +
                        frames.substr(0, frames.rfind(' ')) + " --out " + q(dir / "x.ten"),
                    dir)
                .code,
            1);

  const CliResult e = dcr_cli("eval --pred-dir " + q(dir / "pred") + " --ref-dir " + q(dir / "val"), dir);
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(e.out.rfind("filename,psnr_db,ssim", 0), 0u) << e.out;

  ASSERT_EQ(dcr_cli("denoise --ckpt " + q(dir / "ckpt") + " --input " + q(dir / "noisy") +
                        " --out " + q(dir / "stream"),
                    dir)
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "stream" / "img0_f01.ten"));

  // Resuming at the final step trains nothing more and reproduces the weights.
  const CliResult again = dcr_cli("train-denoiser --config " + q(dir / "train.cfg") + " --resume " +
                                q(dir / "ckpt") + " --out " + q(dir / "ckpt2"),
                            dir);
  ASSERT_EQ(again.code, 0);
  EXPECT_TRUE(identical(load_checkpoint(dir / "ckpt2").params, load_checkpoint(dir / "ckpt").params));
}

TEST(Cli, PretrainThenAblate) {
  TempDir dir;
  ASSERT_EQ(dcr_cli("--seed 2 pretrain-wnet --synthetic 6 --synthetic-size 16 --epochs 1 --out " +
                        q(dir / "wnet"),
                    dir)
                .code,
            0);
  write_clean_dir(dir / "train", 2, 16, 7);
  write_clean_dir(dir / "test", 1, 16, 8);
  std::ofstream(dir / "abl.cfg") << "lr=0.001\ndenoiser.base_width=4\ndenoiser.depth=1\n";
  const CliResult r = dcr_cli("--config " + q(dir / "abl.cfg") + " ablate --steps 2 --wnet " +
                                  q(dir / "wnet") + " --train-dir " + q(dir / "train") +
                                  " --test-dir " + q(dir / "test") + " --out " + q(dir / "abl.csv"),
                              dir);
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(dir / "abl.csv");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);  // reference comment, header, one row per mode
  EXPECT_EQ(lines[0].rfind("# ", 0), 0u);
  EXPECT_EQ(lines[1], "mode,steps,psnr_db,ssim,noisy_psnr_db,closs_step0");
  EXPECT_EQ(lines[2].rfind("baseline,2,", 0), 0u) << lines[2];
  EXPECT_EQ(lines[4].rfind("dcr,2,", 0), 0u) << lines[4];
  EXPECT_EQ(lines[2].substr(lines[2].rfind(',') + 1), "0");
  EXPECT_GT(std::stod(lines[4].substr(lines[4].rfind(',') + 1)), 0.0);

  EXPECT_EQ(dcr_cli("ablate --train-dir " + q(dir / "train"), dir).code, 1);
}

TEST(Cli, DivergenceExitsThree) {
  TempDir dir;
  write_clean_dir(dir / "train", 2, 8, 6);
  {
    std::ofstream cfg(dir / "train.cfg");
    cfg << "steps=20\nlr=1e200\ngrad_clip=0\nloss.alpha=0\ndenoiser.output_init=he\n"
        << "denoiser.base_width=4\ndenoiser.depth=1\ndenoiser.in_frames=3\n"
        << "train_dir=" << (dir / "train").string() << "\n";
  }
  EXPECT_EQ(dcr_cli("train-denoiser --config " + q(dir / "train.cfg"), dir).code, 3);
  std::ofstream(dir / "typo.cfg") << "stpes=3\n";
  EXPECT_EQ(dcr_cli("train-denoiser --config " + q(dir / "typo.cfg"), dir).code, 2);
}

TEST(Cli, GradcheckSubset) {
  TempDir dir;
  const CliResult r = dcr_cli("gradcheck --instances 2 --filter haar", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ok"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace dcr
