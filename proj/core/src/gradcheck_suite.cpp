// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

#include "dcr/gradcheck_suite.hpp"

#include <array>
#include <random>

#include "dcr/denoiser.hpp"
#include "dcr/graph.hpp"
#include "dcr/losses.hpp"
#include "dcr/ops.hpp"
#include "dcr/seed.hpp"
#include "dcr/wavelet.hpp"
#include "dcr/wnet.hpp"

namespace dcr {

namespace {

using Rng = std::mt19937_64;

Tensor uniform(Rng& rng, Shape s, double lo, double hi, bool grad = true) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(s.numel()));
  for (double& x : v) x = u(rng);
  Tensor t(s, std::move(v));
  if (grad) t.set_requires_grad(true);
  return t;
}

// Magnitude in [lo, hi] with a random sign: keeps abs and leaky_relu inputs
// away from 0.
Tensor away_from_zero(Rng& rng, Shape s, double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(static_cast<std::size_t>(s.numel()));
  for (double& x : v) x = sign(rng) ? u(rng) : -u(rng);
  Tensor t(s, std::move(v));
  t.set_requires_grad(true);
  return t;
}

Shape random_shape(Rng& rng, int max_n = 2, int max_c = 3, int max_hw = 5) {
  std::uniform_int_distribution<int> n(1, max_n), c(1, max_c), hw(1, max_hw);
  return Shape{n(rng), c(rng), hw(rng), hw(rng)};
}

// Scalar <out, R> for a fixed random R: exercises a random direction of the
// full Jacobian.
std::function<Tensor(const Tensor&)> projector(Rng& rng, const Shape& s) {
  Tensor r = uniform(rng, s, -1.0, 1.0, false);
  return [r](const Tensor& out) { return sum(mul(out, r)); };
}

GradcheckOptions sampled(GradcheckOptions o, std::size_t coords) {
  if (o.max_coordinates == 0) o.max_coordinates = coords;
  return o;
}

using Unary = std::function<Tensor(const Tensor&)>;

GradcheckReport check_unary(Rng& rng, const Tensor& x, const Unary& op,
                            const GradcheckOptions& options) {
  const Shape out_shape = [&] {
    NoGradGuard g;
    return op(x).shape();
  }();
  auto proj = projector(rng, out_shape);
  return gradcheck([&](const Tensor& p) { return proj(op(p)); }, x, options);
}

GradcheckReport check_many(Rng& rng, std::vector<Tensor> wrt,
                           const std::function<Tensor()>& op, const GradcheckOptions& options) {
  const Shape out_shape = [&] {
    NoGradGuard g;
    return op().shape();
  }();
  auto proj = projector(rng, out_shape);
  return gradcheck([&] { return proj(op()); }, wrt, options);
}

FeaturePyramid random_pyramid(Rng& rng, std::int64_t n, bool grad) {
  FeaturePyramid p;
  const std::array<std::int64_t, kWnetStages> c{3, 4, 4, 5, 5};
  const std::array<std::int64_t, kWnetStages> hw{4, 4, 2, 2, 1};
  for (std::size_t i = 0; i < kWnetStages; ++i) {
    p.features[i] = uniform(rng, Shape{n, c[i], hw[i], hw[i]}, -1.0, 1.0, grad);
  }
  return p;
}

WnetConfig small_wnet() {
  WnetConfig c;
  c.stage_widths = {4, 6, 8, 8, 8};
  return c;
}

std::vector<GradcheckCase> build_cases() {
  std::vector<GradcheckCase> cases;
  const auto add_case = [&](std::string name, auto fn) {
    cases.push_back({std::move(name), [fn](std::uint64_t seed, const GradcheckOptions& o) {
                       Rng rng(seed);
                       return fn(rng, o);
                     }});
  };

  // Elementwise binary ops, with and without broadcasting over N or C.
  const auto binary = [&](const char* name, auto op, bool positive_rhs) {
    add_case(name, [op, positive_rhs](Rng& rng, const GradcheckOptions& o) {
      const Shape s = random_shape(rng);
      std::bernoulli_distribution coin(0.5);
      Shape sb = s;
      if (coin(rng)) sb.n = 1;
      if (coin(rng)) sb.c = 1;
      Tensor a = uniform(rng, s, -1.0, 1.0);
      Tensor b = positive_rhs ? away_from_zero(rng, sb, 0.5, 1.5) : uniform(rng, sb, -1.0, 1.0);
      return check_many(rng, {a, b}, [=] { return op(a, b); }, o);
    });
  };
  binary("add", [](const Tensor& a, const Tensor& b) { return add(a, b); }, false);
  binary("sub", [](const Tensor& a, const Tensor& b) { return sub(a, b); }, false);
  binary("mul", [](const Tensor& a, const Tensor& b) { return mul(a, b); }, false);
  binary("div", [](const Tensor& a, const Tensor& b) { return div(a, b); }, true);

  add_case("scale", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, uniform(rng, random_shape(rng), -1, 1),
                       [](const Tensor& x) { return scale(x, -1.7); }, o);
  });
  add_case("add_scalar", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, uniform(rng, random_shape(rng), -1, 1),
                       [](const Tensor& x) { return add_scalar(x, 0.3); }, o);
  });
  add_case("abs", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, away_from_zero(rng, random_shape(rng)),
                       [](const Tensor& x) { return abs(x); }, o);
  });
  add_case("square", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, uniform(rng, random_shape(rng), -1, 1),
                       [](const Tensor& x) { return square(x); }, o);
  });
  add_case("sqrt", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, uniform(rng, random_shape(rng), 0.2, 2.0),
                       [](const Tensor& x) { return sqrt(x); }, o);
  });
  add_case("clamp", [](Rng& rng, const GradcheckOptions& o) {
    // Values in [-1, -0.6] u [-0.4, 0.4] u [0.6, 1]: away from the bounds +-0.5.
    Tensor x = away_from_zero(rng, random_shape(rng), 0.0, 0.8);
    for (double& v : x.mutable_data()) v = v >= 0 ? (v < 0.4 ? v : v + 0.2) : (v > -0.4 ? v : v - 0.2);
    return check_unary(rng, x, [](const Tensor& t) { return clamp(t, -0.5, 0.5); }, o);
  });
  add_case("leaky_relu", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, away_from_zero(rng, random_shape(rng)),
                       [](const Tensor& x) { return leaky_relu(x, 0.1); }, o);
  });

  const std::array<unsigned, 6> axes{kAxisAll, kAxisN, kAxisC, kAxisHW, kAxisCHW, kAxisH | kAxisN};
  add_case("sum", [axes](Rng& rng, const GradcheckOptions& o) {
    const unsigned a = axes[std::uniform_int_distribution<std::size_t>(0, axes.size() - 1)(rng)];
    return check_unary(rng, uniform(rng, random_shape(rng), -1, 1),
                       [a](const Tensor& x) { return sum(x, a); }, o);
  });
  add_case("mean", [axes](Rng& rng, const GradcheckOptions& o) {
    const unsigned a = axes[std::uniform_int_distribution<std::size_t>(0, axes.size() - 1)(rng)];
    return check_unary(rng, uniform(rng, random_shape(rng), -1, 1),
                       [a](const Tensor& x) { return mean(x, a); }, o);
  });

  add_case("conv2d", [](Rng& rng, const GradcheckOptions& o) {
    std::uniform_int_distribution<int> pick(0, 2);
    const std::array<int, 3> ks{1, 3, 5};
    const int k = ks[pick(rng)];
    const int stride = std::uniform_int_distribution<int>(1, 2)(rng);
    const int pad = std::uniform_int_distribution<int>(0, k / 2)(rng);
    const std::int64_t n = std::uniform_int_distribution<int>(1, 2)(rng);
    const std::int64_t cin = std::uniform_int_distribution<int>(1, 3)(rng);
    const std::int64_t cout = std::uniform_int_distribution<int>(1, 3)(rng);
    const std::int64_t hw = std::uniform_int_distribution<int>(k, k + 4)(rng);
    Tensor x = uniform(rng, Shape{n, cin, hw, hw}, -1, 1);
    Tensor w = uniform(rng, Shape{cout, cin, k, k}, -1, 1);
    Tensor b = uniform(rng, Shape{1, cout, 1, 1}, -1, 1);
    return check_many(rng, {x, w, b}, [=] { return conv2d(x, w, b, stride, pad); }, o);
  });
  add_case("linear", [](Rng& rng, const GradcheckOptions& o) {
    const Shape s = random_shape(rng, 3, 3, 2);
    const std::int64_t dout = std::uniform_int_distribution<int>(1, 4)(rng);
    Tensor x = uniform(rng, s, -1, 1);
    Tensor w = uniform(rng, Shape{dout, s.c * s.h * s.w, 1, 1}, -1, 1);
    Tensor b = uniform(rng, Shape{1, dout, 1, 1}, -1, 1);
    return check_many(rng, {x, w, b}, [=] { return linear(x, w, b); }, o);
  });
  add_case("softmax_cross_entropy", [](Rng& rng, const GradcheckOptions& o) {
    const std::int64_t n = std::uniform_int_distribution<int>(1, 6)(rng);
    Tensor logits = uniform(rng, Shape{n, 2, 1, 1}, -3, 3);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int& l : labels) l = std::uniform_int_distribution<int>(0, 1)(rng);
    return gradcheck([labels](const Tensor& x) { return softmax_cross_entropy(x, labels); },
                     logits, o);
  });
  add_case("concat_slice", [](Rng& rng, const GradcheckOptions& o) {
    const Shape s = random_shape(rng, 2, 3, 4);
    Shape s2 = s;
    s2.c = std::uniform_int_distribution<int>(1, 3)(rng);
    Tensor a = uniform(rng, s, -1, 1);
    Tensor b = uniform(rng, s2, -1, 1);
    return check_many(rng, {a, b}, [=] {
      const std::array<Tensor, 2> parts{a, b};
      const Tensor c = concat_channels(parts);
      const Tensor sl = slice_channels(c, 1, c.shape().c - 1);
      const std::array<Tensor, 2> rows{sl, sl};
      const Tensor cb = concat_batch(rows);
      return slice_batch(cb, 1, cb.shape().n - 1);
    }, o);
  });
  add_case("upsample_nearest2x", [](Rng& rng, const GradcheckOptions& o) {
    return check_unary(rng, uniform(rng, random_shape(rng, 2, 3, 4), -1, 1),
                       [](const Tensor& x) { return upsample_nearest2x(x); }, o);
  });

  add_case("haar_dwt2d", [](Rng& rng, const GradcheckOptions& o) {
    Shape s = random_shape(rng, 2, 3, 3);
    s.h *= 2;
    s.w *= 2;
    return check_unary(rng, uniform(rng, s, -1, 1), [](const Tensor& x) {
      const WaveletBands b = haar_dwt2d(x);
      const std::array<Tensor, 4> parts{b.ll, b.hl, b.lh, b.hh};
      return concat_channels(parts);
    }, o);
  });
  add_case("haar_idwt2d", [](Rng& rng, const GradcheckOptions& o) {
    const Shape s = random_shape(rng, 2, 3, 3);
    Tensor ll = uniform(rng, s, -1, 1), hl = uniform(rng, s, -1, 1);
    Tensor lh = uniform(rng, s, -1, 1), hh = uniform(rng, s, -1, 1);
    return check_many(rng, {ll, hl, lh, hh}, [=] { return haar_idwt2d({ll, hl, lh, hh}); }, o);
  });
  add_case("highfreq_stack", [](Rng& rng, const GradcheckOptions& o) {
    Shape s = random_shape(rng, 2, 4, 3);
    s.h *= 2;
    s.w *= 2;
    return check_unary(rng, uniform(rng, s, -1, 1),
                       [](const Tensor& x) { return highfreq_stack(x); }, o);
  });

  add_case("pixel_cosine", [](Rng& rng, const GradcheckOptions& o) {
    const Shape s = random_shape(rng, 2, 4, 3);
    Tensor a = uniform(rng, s, -1, 1), b = uniform(rng, s, -1, 1);
    return check_many(rng, {a, b}, [=] { return pixel_cosine(a, b, 1e-12); }, o);
  });
  for (SimilarityVariant v : {SimilarityVariant::kDistance, SimilarityVariant::kLiteral}) {
    add_case("pixel_similarity_" + to_string(v), [v](Rng& rng, const GradcheckOptions& o) {
      const Shape s = random_shape(rng, 2, 4, 3);
      Tensor a = uniform(rng, s, -1, 1);
      // Keep |a - b| away from 0 for the L1 part.
      Tensor d = away_from_zero(rng, s, 0.05, 0.5);
      Tensor b(s, 0.0);
      for (std::int64_t i = 0; i < s.numel(); ++i) b.mutable_data()[i] = a.data()[i] + d.data()[i];
      b.set_requires_grad(true);
      return check_many(rng, {a, b}, [=] { return pixel_similarity(a, b, v, 1e-12); }, o);
    });
  }
  for (SimilarityVariant v : {SimilarityVariant::kDistance, SimilarityVariant::kLiteral}) {
    add_case("closs_" + to_string(v), [v](Rng& rng, const GradcheckOptions& o) {
      const std::int64_t n = std::uniform_int_distribution<int>(1, 2)(rng);
      const FeaturePyramid f = random_pyramid(rng, n, true);
      const FeaturePyramid p = random_pyramid(rng, n, true);
      const FeaturePyramid q = random_pyramid(rng, n, true);
      LossConfig cfg;
      cfg.variant = v;
      std::vector<Tensor> wrt;
      for (const auto* pyr : {&f, &p, &q}) {
        for (const auto& t : pyr->features) wrt.push_back(t);
      }
      return gradcheck([&] { return closs(f, p, q, cfg); }, wrt, sampled(o, 12));
    });
  }
  add_case("l1_feature_loss", [](Rng& rng, const GradcheckOptions& o) {
    const FeaturePyramid f = random_pyramid(rng, 1, true);
    FeaturePyramid p;
    for (std::size_t i = 0; i < kWnetStages; ++i) {
      Tensor d = away_from_zero(rng, f[i].shape(), 0.05, 0.5);
      Tensor t(f[i].shape(), 0.0);
      for (std::int64_t k = 0; k < t.numel(); ++k) t.mutable_data()[k] = f[i].data()[k] + d.data()[k];
      t.set_requires_grad(true);
      p.features[i] = t;
    }
    std::vector<Tensor> wrt;
    for (const FeaturePyramid* pyr : {&f, static_cast<const FeaturePyramid*>(&p)}) {
      for (const auto& t : pyr->features) wrt.push_back(t);
    }
    return gradcheck([&] { return l1_feature_loss(f, p, LossConfig{}); }, wrt, sampled(o, 12));
  });
  add_case("perceptual_from_taps", [](Rng& rng, const GradcheckOptions& o) {
    const FeaturePyramid f = random_pyramid(rng, 2, true);
    const FeaturePyramid p = random_pyramid(rng, 2, true);
    std::vector<Tensor> wrt{f[kWnetStages - 1], p[kWnetStages - 1]};
    return gradcheck([&] { return perceptual_from_taps(f, p); }, wrt, o);
  });

  add_case("wnet_forward", [](Rng& rng, const GradcheckOptions& o) {
    const WnetConfig cfg = small_wnet();
    WnetParams params = init_wnet(cfg, rng());
    auto named = params.named();
    set_requires_grad(named, true);
    Tensor x = uniform(rng, Shape{1, 4, 8, 8}, 0, 1);
    std::vector<Tensor> wrt{x};
    for (auto& p : named) wrt.push_back(p.tensor);
    Rng proj_rng(rng());
    Tensor r3 = uniform(proj_rng, Shape{1, 8, 2, 2}, -1, 1, false);
    Tensor rl = uniform(proj_rng, Shape{1, 2, 1, 1}, -1, 1, false);
    return gradcheck([&] {
      const WnetOutput out = wnet_forward(x, params, cfg);
      return add(sum(mul(out.logits, rl)), sum(mul(out.taps[2], r3)));
    }, wrt, sampled(o, 6));
  });
  add_case("denoise_burst", [](Rng& rng, const GradcheckOptions& o) {
    DenoiserConfig cfg;
    cfg.base_width = 3;
    cfg.depth = 1;
    cfg.in_frames = 3;
    DenoiserParams params = init_denoiser(cfg, rng(), OutputInit::kHe);
    auto named = params.named();
    set_requires_grad(named, true);
    std::vector<Tensor> frames;
    for (int f = 0; f < cfg.in_frames; ++f) frames.push_back(uniform(rng, Shape{1, 4, 4, 4}, 0, 1));
    std::vector<Tensor> wrt = frames;
    for (auto& p : named) wrt.push_back(p.tensor);
    Rng proj_rng(rng());
    const Tensor r = uniform(proj_rng, Shape{1, 4, 4, 4}, -1, 1, false);
    return gradcheck([&] { return sum(mul(denoise_burst(frames, params, cfg), r)); }, wrt,
                     sampled(o, 6));
  });

  // The complete training objective L1 + perceptual + alpha * Closs,
  // differentiated w.r.t. the denoised image through a frozen Wnet.
  for (FeatureLossMode mode : {FeatureLossMode::kCloss, FeatureLossMode::kL1Features}) {
    add_case("final_loss_" + to_string(mode), [mode](Rng& rng, const GradcheckOptions& o) {
      const WnetConfig cfg = small_wnet();
      const FrozenWnet wnet(init_wnet(cfg, rng()), cfg);
      const Shape s{1, 4, 8, 8};
      Tensor clean = uniform(rng, s, 0.1, 0.9, false);
      Tensor noisy = uniform(rng, s, 0, 1, false);
      Tensor d = away_from_zero(rng, s, 0.02, 0.2);
      Tensor denoised(s, 0.0);
      for (std::int64_t i = 0; i < s.numel(); ++i) {
        denoised.mutable_data()[i] = clean.data()[i] + d.data()[i];
      }
      denoised.set_requires_grad(true);
      LossConfig loss;
      loss.feature_loss_mode = mode;
      return gradcheck([&](const Tensor& x) { return final_loss(x, clean, noisy, &wnet, loss).total; },
                       denoised, sampled(o, 24));
    });
  }
  return cases;
}

}  // namespace

const std::vector<GradcheckCase>& gradcheck_cases() {
  static const std::vector<GradcheckCase> cases = build_cases();
  return cases;
}

std::vector<GradcheckSuiteResult> run_gradcheck_suite(int instances, std::uint64_t seed,
                                                      const std::string& filter,
                                                      const GradcheckOptions& options) {
  std::vector<GradcheckSuiteResult> results;
  std::uint64_t case_index = 0;
  for (const auto& c : gradcheck_cases()) {
    ++case_index;
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    GradcheckSuiteResult r;
    r.name = c.name;
    for (int i = 0; i < instances; ++i) {
      const std::uint64_t s = derive_seed(seed, {case_index, static_cast<std::uint64_t>(i)});
      GradcheckOptions o = options;
      o.seed = s;
      const GradcheckReport rep = c.run(s, o);
      ++r.instances;
      if (!rep.passed) ++r.failures;
      if (rep.max_rel_error >= r.max_rel_error) {
        r.max_rel_error = rep.max_rel_error;
        r.worst = "instance " + std::to_string(i) + ": " + rep.summary();
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace dcr
