// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <gtest/gtest.h>

#include "dcr/denoiser.hpp"
#include "dcr/errors.hpp"
#include "dcr/gradcheck.hpp"
#include "dcr/losses.hpp"
#include "dcr/ops.hpp"
#include "test_util.hpp"

namespace dcr {
namespace {

using testing::random_tensor;

std::vector<Tensor> random_frames(int count, Shape s, std::uint64_t seed) {
  std::vector<Tensor> frames;
  for (int k = 0; k < count; ++k) frames.push_back(random_tensor(s, seed + k, 0.0, 1.0));
  return frames;
}

DenoiserConfig small_config() {
  DenoiserConfig c;
  c.base_width = 4;
  c.depth = 2;
  return c;
}

TEST(Denoiser, ZeroOutputLayerReturnsCentreFrame) {
  for (bool skip : {true, false}) {
    DenoiserConfig c;
    c.input_skip = skip;
    const DenoiserParams p = init_denoiser(c, 1, OutputInit::kZero);
    const auto frames = random_frames(5, Shape{1, 4, 16, 16}, 10);
    EXPECT_TRUE(identical(denoise_burst(frames, p, c), frames[2]));
  }
}

TEST(Denoiser, OutputShapeMatchesFrame) {
  const DenoiserConfig c;
  const DenoiserParams p = init_denoiser(c, 2, OutputInit::kHe);
  const auto frames = random_frames(5, Shape{1, 4, 64, 64}, 20);
  EXPECT_EQ(denoise_burst(frames, p, c).shape(), (Shape{1, 4, 64, 64}));
  const auto batched = random_frames(5, Shape{2, 4, 8, 12}, 30);
  EXPECT_EQ(denoise_burst(batched, p, c).shape(), (Shape{2, 4, 8, 12}));
}

TEST(Denoiser, LayerLayout) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 3);
  ASSERT_EQ(p.encoder.size(), 3u);
  ASSERT_EQ(p.decoder.size(), 2u);
  EXPECT_EQ(p.encoder[0].in_channels(), 20);
  EXPECT_EQ(p.encoder[2].out_channels(), 16);
  EXPECT_EQ(p.decoder[0].in_channels(), 16 + 8);
  EXPECT_EQ(p.decoder[1].out_channels(), 4);
  EXPECT_EQ(p.output.in_channels(), 4 + 4 * 4);  // width 0 plus four frame differences
  EXPECT_EQ(p.output.out_channels(), 4);
  DenoiserConfig plain = c;
  plain.input_skip = false;
  EXPECT_EQ(init_denoiser(plain, 3).output.in_channels(), 4);
  EXPECT_THROW(p.check(plain), ShapeError);
}

TEST(Denoiser, NamedRoundTrip) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 4, OutputInit::kHe);
  const DenoiserParams q = DenoiserParams::from_named(clone(p.named()), c);
  EXPECT_TRUE(identical(q.named(), p.named()));
  auto missing = p.named();
  missing.pop_back();
  EXPECT_THROW(DenoiserParams::from_named(missing, c), DataError);
}

TEST(Denoiser, L1GradcheckOverAllParameters) {
  const DenoiserConfig c = small_config();
  DenoiserParams p = init_denoiser(c, 5, OutputInit::kHe);
  for (auto& layer : p.encoder)
    for (auto& v : layer.bias.mutable_data()) v = 0.03;
  const auto frames = random_frames(5, Shape{1, 4, 16, 16}, 40);
  const Tensor clean = random_tensor(Shape{1, 4, 16, 16}, 50, 0.0, 1.0);
  std::vector<Tensor> wrt;
  for (const auto& n : p.named()) wrt.push_back(n.tensor);
  GradcheckOptions o;
  o.max_coordinates = 40;
  const auto r = gradcheck([&] { return l1_loss(denoise_burst(frames, p, c), clean); }, wrt, o);
  EXPECT_TRUE(r.passed) << r.summary();
}

TEST(Denoiser, InferenceClampsToUnitRange) {
  const DenoiserConfig c = small_config();
  DenoiserParams p = init_denoiser(c, 6, OutputInit::kZero);
  for (auto& v : p.output.bias.mutable_data()) v = 0.7;
  const auto frames = random_frames(5, Shape{1, 4, 8, 8}, 60);
  const Tensor train_out = denoise_burst(frames, p, c);
  const Tensor out = denoise_burst_inference(frames, p, c);
  bool exceeded = false;
  for (std::int64_t i = 0; i < out.numel(); ++i) {
    EXPECT_GE(out.data()[i], 0.0);
    EXPECT_LE(out.data()[i], 1.0);
    if (train_out.data()[i] > 1.0) exceeded = true;
  }
  EXPECT_TRUE(exceeded);  // the training path is not clamped
  EXPECT_FALSE(out.requires_grad());
}

TEST(Denoiser, ShapeErrors) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 7);
  EXPECT_THROW(denoise_burst(random_frames(4, Shape{1, 4, 8, 8}, 0), p, c), ShapeError);
  EXPECT_THROW(denoise_burst(random_frames(5, Shape{1, 4, 6, 8}, 0), p, c), ShapeError);
  EXPECT_THROW(denoise_burst(random_frames(5, Shape{1, 3, 8, 8}, 0), p, c), ShapeError);
  auto mixed = random_frames(5, Shape{1, 4, 8, 8}, 0);
  mixed[3] = random_tensor(Shape{1, 4, 8, 12}, 1);
  EXPECT_THROW(denoise_burst(mixed, p, c), ShapeError);
  DenoiserConfig bad = c;
  bad.depth = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.in_frames = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Denoiser, StreamWindowReplicatesEdges) {
  const auto frames = random_frames(7, Shape{1, 4, 4, 4}, 70);
  auto idx = [&](const std::vector<Tensor>& w) {
    std::vector<int> out;
    for (const auto& t : w)
      for (int k = 0; k < 7; ++k)
        if (t.same(frames[k])) out.push_back(k);
    return out;
  };
  EXPECT_EQ(idx(stream_window(frames, 0, 5)), (std::vector<int>{0, 0, 0, 1, 2}));
  EXPECT_EQ(idx(stream_window(frames, 1, 5)), (std::vector<int>{0, 0, 1, 2, 3}));
  EXPECT_EQ(idx(stream_window(frames, 3, 5)), (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(idx(stream_window(frames, 6, 5)), (std::vector<int>{4, 5, 6, 6, 6}));
  EXPECT_THROW(stream_window({}, 0, 5), std::invalid_argument);
}

TEST(Denoiser, StreamMiddleOutputMatchesBurst) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 8, OutputInit::kHe);
  const auto frames = random_frames(5, Shape{1, 4, 8, 8}, 80);
  const auto outs = denoise_frame_stream(frames, p, c);
  ASSERT_EQ(outs.size(), 5u);
  EXPECT_TRUE(identical(outs[2], denoise_burst_inference(frames, p, c)));
}

TEST(Denoiser, StaticSequenceGivesIdenticalOutputs) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 9, OutputInit::kHe);
  const Tensor f = random_tensor(Shape{1, 4, 8, 8}, 90, 0.0, 1.0);
  const std::vector<Tensor> frames(6, f);
  const auto outs = denoise_frame_stream(frames, p, c);
  for (const auto& o : outs) EXPECT_TRUE(identical(o, outs[0]));
}

TEST(Denoiser, SingleFrameStreamUsesReplicatedWindow) {
  const DenoiserConfig c = small_config();
  const DenoiserParams p = init_denoiser(c, 10, OutputInit::kHe);
  const std::vector<Tensor> one{random_tensor(Shape{1, 4, 8, 8}, 91, 0.0, 1.0)};
  const auto outs = denoise_frame_stream(one, p, c);
  ASSERT_EQ(outs.size(), 1u);
  const std::vector<Tensor> copies(5, one[0]);
  EXPECT_TRUE(identical(outs[0], denoise_burst_inference(copies, p, c)));
}

}  // namespace
}  // namespace dcr
