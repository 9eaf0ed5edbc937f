// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "dcr/denoiser.hpp"
#include "dcr/graph.hpp"
#include "dcr/losses.hpp"
#include "dcr/metrics.hpp"
#include "dcr/ops.hpp"
#include "dcr/synthetic.hpp"
#include "dcr/trainer.hpp"
#include "dcr/wavelet.hpp"
#include "dcr/wnet.hpp"

namespace {

using dcr::Shape;
using dcr::Tensor;

Tensor random_tensor(Shape s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(s);
  for (auto& v : t.mutable_data()) v = u(rng);
  return t;
}

void BM_Conv2dForward(benchmark::State& state) {
  const auto c = state.range(0);
  const Tensor x = random_tensor(Shape{1, c, 64, 64}, 1);
  const Tensor w = random_tensor(Shape{c, c, 3, 3}, 2);
  const Tensor b = random_tensor(Shape{1, c, 1, 1}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(dcr::conv2d(x, w, b, 1, 1));
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const auto c = state.range(0);
  const Tensor x = random_tensor(Shape{1, c, 64, 64}, 1);
  Tensor w = random_tensor(Shape{c, c, 3, 3}, 2);
  Tensor b = random_tensor(Shape{1, c, 1, 1}, 3);
  w.set_requires_grad(true);
  b.set_requires_grad(true);
  for (auto _ : state) {
    dcr::Graph::active().reset();
    dcr::backward(dcr::sum(dcr::conv2d(x, w, b, 1, 1)));
    w.zero_grad();
    b.zero_grad();
  }
}
BENCHMARK(BM_Conv2dBackward)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_HaarDwt(benchmark::State& state) {
  const Tensor x = random_tensor(Shape{1, 4, state.range(0), state.range(0)}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dcr::haar_dwt2d(x));
}
BENCHMARK(BM_HaarDwt)->Arg(64)->Arg(256);

void BM_WnetForward(benchmark::State& state) {
  const dcr::WnetConfig cfg;
  const dcr::WnetParams p = dcr::init_wnet(cfg, 5);
  const Tensor x = random_tensor(Shape{1, 4, 64, 64}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(dcr::wnet_forward(x, p, cfg));
}
BENCHMARK(BM_WnetForward)->Unit(benchmark::kMillisecond);

void BM_SsimPsnr(benchmark::State& state) {
  const Tensor a = dcr::synthetic_scene(1, 64, 64).tensor;
  const Tensor b = dcr::synthetic_scene(2, 64, 64).tensor;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dcr::ssim(a, b));
    benchmark::DoNotOptimize(dcr::psnr(a, b));
  }
}
BENCHMARK(BM_SsimPsnr)->Unit(benchmark::kMillisecond);

// One full optimiser step on a 64 x 64 burst; range(0) selects L1 only (0)
// or the full objective with Closs (1).
void BM_DenoiserTrainStep(benchmark::State& state) {
  const bool dcr_loss = state.range(0) != 0;
  dcr::TrainConfig c;
  c.steps = 1 << 30;
  c.loss.alpha = dcr_loss ? 0.1 : 0.0;
  c.noise = dcr::NoiseParams::parse("shot=0.01,read=0.05");
  const dcr::WnetConfig wc;
  const dcr::FrozenWnet wnet(dcr::init_wnet(wc, 7), wc);
  dcr::DenoiserTrainer trainer(c, dcr::synthetic_set(4, 64, 64, 8), {}, dcr_loss ? &wnet : nullptr);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.step());
}
BENCHMARK(BM_DenoiserTrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
