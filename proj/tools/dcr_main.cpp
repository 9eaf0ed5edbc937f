// Copyright 2026 The DCR Authors
// SPDX-License-Identifier: Apache-2.0

// dcr: dataset preparation, training, inference and evaluation front end.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcr/ablation.hpp"
#include "dcr/checkpoint.hpp"
#include "dcr/dataset.hpp"
#include "dcr/denoiser.hpp"
#include "dcr/errors.hpp"
#include "dcr/gradcheck_suite.hpp"
#include "dcr/key_value.hpp"
#include "dcr/metrics.hpp"
#include "dcr/noise.hpp"
#include "dcr/png_io.hpp"
#include "dcr/seed.hpp"
#include "dcr/synthetic.hpp"
#include "dcr/ten_io.hpp"
#include "dcr/trainer.hpp"
#include "dcr/wavelet.hpp"
#include "dcr/wnet.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  bool verbose = false;

  [[nodiscard]] std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

Globals g;

void info(const std::string& msg) {
  if (g.verbose) std::cerr << msg << "\n";
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw dcr::DataError("cannot write " + path.string());
  out << text;
}

void reject_config(const char* command) {
  if (!g.config.empty()) {
    throw UsageError(std::string("--config is not used by '") + command + "'");
  }
}

dcr::NoiseParams parse_noise(const std::string& spec) {
  try {
    return dcr::NoiseParams::parse(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--noise: ") + e.what());
  }
}

// Per-field noise flags; each one given overrides the --noise spec.
struct NoiseFlags {
  std::string spec = "read=0.05";
  std::optional<double> shot, read, row, bias;
  std::optional<int> bits;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--noise", spec, "shot=..,read=..,row=..,bias=..,bits=..");
    cmd->add_option("--shot", shot, "Shot-noise gain");
    cmd->add_option("--read", read, "Read-noise sigma");
    cmd->add_option("--row", row, "Row-noise sigma");
    cmd->add_option("--bias", bias, "Black-level offset");
    cmd->add_option("--bits", bits, "Quantisation bits (0 = off)");
  }

  [[nodiscard]] dcr::NoiseParams resolve() const {
    dcr::NoiseParams p = parse_noise(spec);
    if (shot) p.shot_gain = *shot;
    if (read) p.read_sigma = *read;
    if (row) p.row_sigma = *row;
    if (bias) p.bias = *bias;
    if (bits) p.quant_bits = *bits;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("noise: ") + e.what());
    }
    return p;
  }
};

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string input;
  std::string out;
  int patch = 64;
  double test_fraction = 0.2;
  double val_fraction = 0.0;
  std::string noise;
  std::size_t synthetic = 0;
  std::int64_t synthetic_size = 256;
};

int run_ingest(const IngestArgs& a) {
  reject_config("ingest");
  fs::path input = a.input;
  if (a.synthetic > 0) {
    if (input.empty()) input = fs::path(a.out) / "source";
    dcr::write_synthetic_pngs(input, a.synthetic, a.synthetic_size, a.synthetic_size, g.seed_or(0));
    info("wrote " + std::to_string(a.synthetic) + " synthetic mosaics to " + input.string());
  } else if (input.empty()) {
    throw UsageError("ingest: --input or --synthetic is required");
  }
  dcr::IngestOptions opt;
  opt.patch = a.patch;
  opt.test_fraction = a.test_fraction;
  opt.val_fraction = a.val_fraction;
  opt.seed = g.seed_or(0);
  opt.noise = a.noise;
  const dcr::DatasetManifest m = dcr::ingest_dataset(input, a.out, opt);
  std::cout << "train " << m.train.size() << " patches (" << m.train_sources.size() << " files), val "
            << m.val.size() << " (" << m.val_sources.size() << "), test " << m.test.size() << " ("
            << m.test_sources.size() << "), skipped " << m.skipped.size() << ", clamped "
            << m.clamped << "\n";
  for (const auto& s : m.skipped) std::cerr << "warning: skipped " << s << "\n";
  if (m.clamped > 0) std::cerr << "warning: clamped " << m.clamped << " values into [0, 1]\n";
  return 0;
}

// ----------------------------------------------------------- synth-noise

struct SynthArgs {
  std::string input;
  std::string out;
  NoiseFlags noise;
  int frames = 5;
  bool png = false;
};

int run_synth_noise(const SynthArgs& a) {
  reject_config("synth-noise");
  const dcr::NoiseParams base = a.noise.resolve();
  std::vector<dcr::RawImage> clean;
  if (fs::is_directory(a.input)) {
    clean = dcr::load_raw_dir(a.input);
  } else {
    clean.push_back({dcr::read_ten(a.input), fs::path(a.input).filename().string()});
    dcr::check_raw_shape(clean.back().tensor);
  }
  if (clean.empty()) throw dcr::DataError("synth-noise: no .ten files in " + a.input);
  fs::create_directories(a.out);
  const std::uint64_t seed = g.seed_or(base.seed);
  dcr::KeyValue manifest;
  manifest.set("seed", std::to_string(seed));
  manifest.set("frames", std::to_string(a.frames));
  manifest.set("bursts", std::to_string(clean.size()));
  for (std::size_t i = 0; i < clean.size(); ++i) {
    dcr::NoiseParams p = base;
    p.seed = dcr::derive_seed(seed, {i});
    const auto burst = dcr::make_burst(clean[i], p, a.frames);
    const std::string stem = fs::path(clean[i].source_id).stem().string();
    const std::string key = "burst." + std::to_string(i);
    manifest.set(key + ".source", clean[i].source_id);
    manifest.set(key + ".noise", p.str());
    for (std::size_t k = 0; k < burst.size(); ++k) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_f%02zu", k);
      dcr::write_ten(fs::path(a.out) / (stem + suffix + ".ten"), burst[k].tensor);
      if (a.png) dcr::to_png(burst[k], fs::path(a.out) / (stem + suffix + ".png"));
    }
  }
  write_file(fs::path(a.out) / "manifest.txt", manifest.str());
  std::cout << "wrote " << clean.size() << " bursts of " << a.frames << " frames (" << base.str()
            << ")\n";
  return 0;
}

// --------------------------------------------------------- pretrain-wnet

struct PretrainArgs {
  std::string data;
  std::size_t synthetic = 0;
  std::int64_t synthetic_size = 64;
  std::string out;
  NoiseFlags noise;
  int epochs = 20;
  int batch = 8;
  double lr = 1e-4;
  double val_fraction = 0.2;
  std::optional<double> stop_at;
  std::string log;
};

int run_pretrain(const PretrainArgs& a) {
  reject_config("pretrain-wnet");
  std::vector<dcr::RawImage> clean;
  if (a.synthetic > 0) {
    clean = dcr::synthetic_set(a.synthetic, a.synthetic_size, a.synthetic_size, g.seed_or(0));
  } else if (!a.data.empty()) {
    clean = dcr::load_raw_dir(a.data);
  } else {
    throw UsageError("pretrain-wnet: --data or --synthetic is required");
  }
  dcr::PretrainOptions opt;
  opt.epochs = a.epochs;
  opt.batch_size = a.batch;
  opt.lr = a.lr;
  opt.val_fraction = a.val_fraction;
  opt.seed = g.seed_or(0);
  opt.stop_at_accuracy = a.stop_at;
  std::string curve = "epoch,train_loss,val_accuracy\n";
  opt.on_epoch = [&](const dcr::PretrainEpoch& e) {
    curve += std::to_string(e.epoch) + "," + dcr::format_double(e.train_loss) + "," +
             dcr::format_double(e.val_accuracy) + "\n";
    info("epoch " + std::to_string(e.epoch) + " loss " + dcr::format_double(e.train_loss) +
         " val_acc " + dcr::format_double(e.val_accuracy));
  };
  const dcr::WnetConfig config;
  const dcr::PretrainResult r = dcr::wnet_pretrain(clean, a.noise.resolve(), config, opt);
  dcr::save_wnet(a.out, {r.params, config, r.best_epoch, r.best_val_accuracy});
  if (!a.log.empty()) write_file(a.log, curve);
  std::cout << "best epoch " << r.best_epoch << " val accuracy " << r.best_val_accuracy << " ("
            << r.train_count << " train / " << r.val_count << " val)\n";
  return 0;
}

// -------------------------------------------------------- train-denoiser

dcr::TrainConfig load_train_config() {
  dcr::KeyValue kv;
  if (!g.config.empty()) kv = dcr::KeyValue::load(g.config);
  if (g.seed) kv.set("seed", std::to_string(*g.seed));
  return dcr::TrainConfig::from_key_value(kv);
}

std::optional<dcr::FrozenWnet> load_frozen(const std::string& dir) {
  if (dir.empty()) return std::nullopt;
  const dcr::WnetCheckpoint w = dcr::load_wnet(dir);
  return dcr::FrozenWnet(w.params, w.config);
}

struct TrainArgs {
  std::string resume;
  std::string out;
};

int run_train(const TrainArgs& a) {
  if (g.config.empty()) throw UsageError("train-denoiser: --config is required");
  const dcr::TrainConfig config = load_train_config();
  if (config.train_dir.empty()) throw UsageError("train-denoiser: config lacks train_dir");
  auto train = dcr::load_raw_dir(config.train_dir);
  std::vector<dcr::RawImage> val;
  if (!config.val_dir.empty()) val = dcr::load_raw_dir(config.val_dir);
  const auto wnet = load_frozen(config.wnet_dir);
  if (!wnet && config.loss.alpha != 0.0) {
    throw UsageError("train-denoiser: loss.alpha > 0 needs a pretrained wnet (key 'wnet')");
  }
  dcr::DenoiserTrainer trainer(config, std::move(train), std::move(val), wnet ? &*wnet : nullptr);
  if (!a.resume.empty()) {
    trainer.load(a.resume);
    info("resumed at step " + std::to_string(trainer.steps_done()));
  }
  trainer.run([&](const dcr::StepLog& row) { info(dcr::format_log_row(row)); });
  if (!config.log_path.empty()) write_file(config.log_path, dcr::format_log(trainer.log()));
  const std::string out = !a.out.empty() ? a.out : config.checkpoint_dir;
  if (!out.empty()) trainer.save(out);
  if (!trainer.log().empty()) {
    const auto& last = trainer.log().back();
    std::cout << "step " << trainer.steps_done() << " total " << dcr::format_double(last.total);
    if (last.psnr_val) std::cout << " psnr_val " << dcr::format_double(*last.psnr_val);
    std::cout << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- denoise

struct DenoiseArgs {
  std::string checkpoint;
  std::vector<std::string> burst;
  std::string input;
  std::string out;
  std::string png;
};

// Two forms: --burst f0 .. f4 --out out.ten denoises one burst; --input DIR
// --out DIR denoises every frame of a sequence with a sliding window.
int run_denoise(const DenoiseArgs& a) {
  reject_config("denoise");
  if (a.burst.empty() == a.input.empty()) {
    throw UsageError("denoise: give exactly one of --burst or --input");
  }
  const dcr::DenoiserCheckpoint ckpt = dcr::load_denoiser(a.checkpoint);
  const dcr::DenoiserConfig& cfg = ckpt.config.denoiser;

  if (!a.burst.empty()) {
    if (static_cast<int>(a.burst.size()) != cfg.in_frames) {
      throw UsageError("denoise: the checkpoint expects " + std::to_string(cfg.in_frames) +
                       " frames, got " + std::to_string(a.burst.size()));
    }
    std::vector<dcr::Tensor> frames;
    for (const auto& f : a.burst) {
      frames.push_back(dcr::read_ten(f));
      dcr::check_raw_shape(frames.back());
    }
    const dcr::Tensor out = dcr::denoise_burst_inference(frames, ckpt.params, cfg);
    dcr::write_ten(a.out, out);
    if (!a.png.empty()) dcr::to_png({out, a.out}, a.png);
    std::cout << "wrote " << a.out << "\n";
    return 0;
  }

  const auto frames = dcr::load_raw_dir(a.input);
  if (frames.empty()) throw dcr::DataError("denoise: no .ten frames in " + a.input);
  std::vector<dcr::Tensor> tensors;
  for (const auto& f : frames) tensors.push_back(f.tensor);
  const auto outputs = dcr::denoise_frame_stream(tensors, ckpt.params, cfg);
  fs::create_directories(a.out);
  if (!a.png.empty()) fs::create_directories(a.png);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const fs::path name = frames[i].source_id;
    dcr::write_ten(fs::path(a.out) / name, outputs[i]);
    if (!a.png.empty()) {
      fs::path png = fs::path(a.png) / name;
      png.replace_extension(".png");
      dcr::to_png({outputs[i], frames[i].source_id}, png);
    }
  }
  std::cout << "denoised " << outputs.size() << " frames\n";
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string pred;
  std::string ref;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  reject_config("eval");
  const auto refs = dcr::load_raw_dir(a.ref);
  if (refs.empty()) throw dcr::DataError("eval: no .ten files in " + a.ref);
  dcr::MetricReport report;
  for (const auto& r : refs) {
    const fs::path p = fs::path(a.pred) / r.source_id;
    if (!fs::exists(p)) throw dcr::DataError("eval: missing prediction " + p.string());
    report.add(r.source_id, dcr::read_ten(p), r.tensor);
  }
  const std::string csv = report.csv();
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out, csv);
    std::cout << "mean psnr " << report.mean_psnr_db << " dB, ssim " << report.mean_ssim << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- ablate

struct AblateArgs {
  std::string wnet;
  std::string train_dir;
  std::string test_dir;
  std::string out = "ablation.csv";
  std::string modes = "baseline,wnet_l1,dcr";
  std::string log_dir;
  std::optional<int> steps;
};

int run_ablate(const AblateArgs& a) {
  dcr::TrainConfig base = load_train_config();
  if (a.steps) base.steps = *a.steps;
  const std::string train_dir = !a.train_dir.empty() ? a.train_dir : base.train_dir;
  const std::string test_dir = !a.test_dir.empty() ? a.test_dir : base.val_dir;
  const std::string wnet_dir = !a.wnet.empty() ? a.wnet : base.wnet_dir;
  if (train_dir.empty() || test_dir.empty() || wnet_dir.empty()) {
    throw UsageError("ablate: training set, test set and wnet are required");
  }
  std::vector<dcr::AblationMode> modes;
  std::stringstream ss(a.modes);
  for (std::string m; std::getline(ss, m, ',');) {
    try {
      modes.push_back(dcr::parse_ablation_mode(m));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  const auto wnet = load_frozen(wnet_dir);
  const auto result = dcr::run_ablation(
      base, dcr::load_raw_dir(train_dir), dcr::load_raw_dir(test_dir), *wnet, modes,
      [](dcr::AblationMode m, const dcr::StepLog& row) {
        info(dcr::to_string(m) + " " + dcr::format_log_row(row));
      });
  write_file(a.out, result.csv());
  if (!a.log_dir.empty()) {
    for (const auto& row : result.rows) {
      write_file(fs::path(a.log_dir) / (dcr::to_string(row.mode) + "_log.csv"),
                 dcr::format_log(row.log));
    }
  }
  std::cout << result.csv();
  return 0;
}

// ------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  int instances = 100;
  std::string filter;
  bool list = false;
};

int run_gradcheck(const GradcheckArgs& a) {
  reject_config("gradcheck");
  if (a.list) {
    for (const auto& c : dcr::gradcheck_cases()) std::cout << c.name << "\n";
    return 0;
  }
  const auto results = dcr::run_gradcheck_suite(a.instances, g.seed_or(0), a.filter);
  if (results.empty()) throw UsageError("gradcheck: no case matches '" + a.filter + "'");
  int failures = 0;
  for (const auto& r : results) {
    std::printf("%-28s %s  instances %d  max_rel_error %.3e\n", r.name.c_str(),
                r.failures == 0 ? "ok  " : "FAIL", r.instances, r.max_rel_error);
    if (r.failures > 0) std::printf("    worst %s\n", r.worst.c_str());
    failures += r.failures;
  }
  return failures == 0 ? 0 : kExitNumerical;
}

// ------------------------------------------------------------------- dwt

struct DwtArgs {
  std::string input;
  std::string out;
  std::string prefix;
  bool inverse = false;
};

// Band files are <prefix>ll.ten etc., or ll.ten etc. inside the --out directory.
fs::path band_path(const DwtArgs& a, const std::string& band) {
  if (!a.prefix.empty()) return a.prefix + band + ".ten";
  return fs::path(a.out) / (band + ".ten");
}

int run_dwt(const DwtArgs& a) {
  reject_config("dwt");
  if (a.inverse) {
    // --in names the band prefix (or directory), --out the image file.
    if (a.out.empty()) throw UsageError("dwt --inverse: --out is required");
    DwtArgs src = a;
    if (fs::is_directory(a.input)) {
      src.prefix.clear();
      src.out = a.input;
    } else {
      src.prefix = a.input;
    }
    const dcr::WaveletBands bands{dcr::read_ten(band_path(src, "ll")),
                                  dcr::read_ten(band_path(src, "hl")),
                                  dcr::read_ten(band_path(src, "lh")),
                                  dcr::read_ten(band_path(src, "hh"))};
    dcr::write_ten(a.out, dcr::haar_idwt2d(bands));
    std::cout << "wrote " << a.out << "\n";
    return 0;
  }
  if (a.out.empty() == a.prefix.empty()) {
    throw UsageError("dwt: give exactly one of --out-prefix or --out");
  }
  const dcr::WaveletBands b = dcr::haar_dwt2d(dcr::read_ten(a.input));
  if (a.prefix.empty()) fs::create_directories(a.out);
  dcr::write_ten(band_path(a, "ll"), b.ll);
  dcr::write_ten(band_path(a, "hl"), b.hl);
  dcr::write_ten(band_path(a, "lh"), b.lh);
  dcr::write_ten(band_path(a, "hh"), b.hh);
  std::cout << "wrote bands " << b.ll.shape().str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcr: burst RAW denoising with feature-space regularisation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Base seed for every random stream");
  app.add_option("--config", g.config, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_flag("--verbose,-v", g.verbose, "Progress output on stderr");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Crop, pack, split and tile a mosaic dataset");
  c_ingest->add_option("--input", ingest.input, "Directory of grayscale mosaic PNG or .ten files");
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();
  c_ingest->add_option("--patch", ingest.patch, "Packed patch size (multiple of 4; 0 = whole image)");
  c_ingest->add_option("--test-fraction", ingest.test_fraction);
  c_ingest->add_option("--val-fraction", ingest.val_fraction);
  c_ingest->add_option("--noise", ingest.noise, "Noise spec recorded in the manifest");
  c_ingest->add_option("--synthetic", ingest.synthetic, "Generate this many synthetic mosaics first");
  c_ingest->add_option("--synthetic-size", ingest.synthetic_size, "Synthetic mosaic extent");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth-noise", "Synthesise noisy bursts from clean images");
  c_synth->add_option("--clean-dir,--input", synth.input, "Clean .ten file or directory")->required();
  c_synth->add_option("--out-dir,--out", synth.out, "Output directory")->required();
  synth.noise.add_to(c_synth);
  c_synth->add_option("--burst,--frames", synth.frames, "Frames per burst");
  c_synth->add_flag("--png", synth.png, "Also write PNG previews");

  PretrainArgs pre;
  auto* c_pre = app.add_subcommand("pretrain-wnet", "Pretrain Wnet as a clean/noisy classifier");
  c_pre->add_option("--clean-dir,--data", pre.data, "Directory of clean .ten patches");
  c_pre->add_option("--synthetic", pre.synthetic, "Use this many synthetic scenes instead");
  c_pre->add_option("--synthetic-size", pre.synthetic_size, "Packed extent of synthetic scenes");
  c_pre->add_option("--out", pre.out, "Checkpoint directory")->required();
  pre.noise.add_to(c_pre);
  c_pre->add_option("--epochs", pre.epochs);
  c_pre->add_option("--batch", pre.batch);
  c_pre->add_option("--lr", pre.lr);
  c_pre->add_option("--val-fraction", pre.val_fraction);
  c_pre->add_option("--stop-at", pre.stop_at, "Stop once validation accuracy reaches this");
  c_pre->add_option("--log", pre.log, "Per-epoch CSV");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-denoiser", "Train the burst denoiser (needs --config)");
  c_train->add_option("--resume", train.resume, "Checkpoint directory to resume from");
  c_train->add_option("--out", train.out, "Final checkpoint directory (default checkpoint_dir)");

  DenoiseArgs den;
  auto* c_den = app.add_subcommand("denoise", "Denoise one burst or a sequence of .ten frames");
  c_den->add_option("--ckpt,--checkpoint", den.checkpoint, "Denoiser checkpoint directory")
      ->required();
  c_den->add_option("--burst", den.burst, "Noisy frames of one burst, in order");
  c_den->add_option("--input", den.input, "Directory of noisy frames, in name order");
  c_den->add_option("--out", den.out, "Output .ten (burst) or directory (sequence)")->required();
  c_den->add_option("--png", den.png, "PNG preview file (burst) or directory (sequence)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "PSNR / SSIM of predictions against references");
  c_eval->add_option("--pred-dir", ev.pred)->required();
  c_eval->add_option("--ref-dir", ev.ref)->required();
  c_eval->add_option("--out", ev.out, "CSV report (default stdout)");

  AblateArgs abl;
  auto* c_abl = app.add_subcommand("ablate", "Train baseline / wnet_l1 / dcr and compare");
  c_abl->add_option("--wnet", abl.wnet);
  c_abl->add_option("--train-dir", abl.train_dir);
  c_abl->add_option("--test-dir", abl.test_dir);
  c_abl->add_option("--out", abl.out);
  c_abl->add_option("--modes", abl.modes);
  c_abl->add_option("--log-dir", abl.log_dir, "Write each mode's training log here");
  c_abl->add_option("--steps", abl.steps);

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  c_gc->add_option("--instances", gc.instances);
  c_gc->add_option("--filter", gc.filter, "Only cases whose name contains this");
  c_gc->add_flag("--list", gc.list);

  DwtArgs dwt;
  auto* c_dwt = app.add_subcommand("dwt", "Haar analysis (or synthesis with --inverse)");
  c_dwt->add_option("--in,--input", dwt.input,
                    "Image .ten (band prefix or directory with --inverse)")
      ->required();
  c_dwt->add_option("--out-prefix", dwt.prefix, "Write <prefix>{ll,hl,lh,hh}.ten");
  c_dwt->add_option("--out", dwt.out, "Band directory (image .ten with --inverse)");
  c_dwt->add_flag("--inverse", dwt.inverse);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) return run_ingest(ingest);
    if (c_synth->parsed()) return run_synth_noise(synth);
    if (c_pre->parsed()) return run_pretrain(pre);
    if (c_train->parsed()) return run_train(train);
    if (c_den->parsed()) return run_denoise(den);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_abl->parsed()) return run_ablate(abl);
    if (c_gc->parsed()) return run_gradcheck(gc);
    if (c_dwt->parsed()) return run_dwt(dwt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dcr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const dcr::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const dcr::ShapeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
