// Copyright 2026 The avlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "avlab/training/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"

namespace fs = std::filesystem;

namespace avlab::training {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string policy_canonical(const signal::NoisePolicy& p) {
  std::string out = "p=" + fmt(p.apply_probability) + ";snr=" + fmt(p.snr_db) + ";cats=";
  for (auto c : p.categories) out += std::string(signal::category_name(c)) + ",";
  out += ";seed=" + std::to_string(p.seed);
  if (p.sample_snr) out += ";range=" + fmt(p.snr_min_db) + ":" + fmt(p.snr_max_db);
  return out;
}

std::string adam_canonical(const AdamConfig& a) {
  return "lr=" + fmt(a.lr) + ";warmup=" + std::to_string(a.warmup) + ";b1=" + fmt(a.beta1) +
         ";b2=" + fmt(a.beta2) + ";eps=" + fmt(a.eps) + ";clip=" + fmt(a.clip_norm);
}

signal::NoisePolicy policy_from(const ExperimentFile& f, const std::string& s, uint64_t seed) {
  signal::NoisePolicy p;
  p.apply_probability = f.get_double(s, "noise_p", p.apply_probability);
  p.snr_db = f.get_double(s, "noise_snr_db", p.snr_db);
  if (auto cats = f.get(s, "noise_types")) {
    p.categories.clear();
    for (const auto& c : f.get_list(s, "noise_types", {})) p.categories.push_back(signal::parse_category(c));
  }
  if (f.get(s, "noise_snr_range")) {
    auto r = f.get_list(s, "noise_snr_range", {});
    if (r.size() != 2) fail(ErrorKind::Config, "[" + s + "] noise_snr_range needs two values");
    p.sample_snr = true;
    p.snr_min_db = std::stod(r[0]);
    p.snr_max_db = std::stod(r[1]);
  }
  p.seed = f.get_u64(s, "noise_seed", derive_seed(seed, {tag("noise-policy")}));
  p.validate();
  return p;
}

AdamConfig adam_from(const ExperimentFile& f, const std::string& s, AdamConfig a) {
  a.lr = f.get_double(s, "lr", a.lr);
  a.warmup = f.get_int(s, "warmup", a.warmup);
  a.clip_norm = f.get_double(s, "clip_norm", a.clip_norm);
  a.validate();
  return a;
}

void write_log(const std::string& path, const std::vector<double>& loss,
               const std::vector<double>& lr, const std::vector<double>& acc) {
  std::string out = "step\tloss\tlr\tmasked_acc\n";
  for (size_t i = 0; i < loss.size(); ++i)
    out += std::to_string(i + 1) + '\t' + fmt(loss[i]) + '\t' + fmt(lr[i]) + '\t' + fmt(acc[i]) + '\n';
  write_text_file(path, out);
}

[[noreturn]] void nan_abort(const std::string& out_dir, const std::string& stage, long step,
                            const std::vector<std::string>& ids, double loss) {
  std::string msg = stage + " step " + std::to_string(step) + ": loss " + fmt(loss);
  if (!out_dir.empty()) {
    std::string dump = msg + "\nbatch:";
    for (const auto& id : ids) dump += " " + id;
    write_text_file((fs::path(out_dir) / "nan_dump.txt").string(), dump + "\n");
    msg += " (diagnostics in " + (fs::path(out_dir) / "nan_dump.txt").string() + ")";
  }
  fail(ErrorKind::NaNLoss, msg);
}

}  // namespace

void PretrainConfig::validate() const {
  if (iterations < 1) fail(ErrorKind::Config, "pretrain iterations must be >= 1");
  if (steps < 1) fail(ErrorKind::Config, "pretrain steps must be >= 1");
  if (batch_frames < 1) fail(ErrorKind::Config, "batch_frames must be >= 1");
  if (!(mask_start_prob >= 0.0 && mask_start_prob <= 1.0) || mask_span < 1)
    fail(ErrorKind::Config, "invalid mask parameters");
  if (n_clusters < 1) fail(ErrorKind::Config, "n_clusters must be >= 1");
  noise.validate();
  dropout.validate();
  adam.validate();
  model::preset(preset).validate();
  if (!small_preset.empty()) model::preset(small_preset).validate();
}

std::string PretrainConfig::canonical() const {
  return "iterations=" + std::to_string(iterations) + "\nsteps=" + std::to_string(steps) +
         "\nbatch_frames=" + std::to_string(batch_frames) +
         "\npretrain_noise=" + (pretrain_noise ? "1" : "0") + "\nnoise=" + policy_canonical(noise) +
         "\nmask=" + fmt(mask_start_prob) + "," + std::to_string(mask_span) +
         "\np_both=" + fmt(dropout.p_both) + "\nadam=" + adam_canonical(adam) + "\npreset=" + preset +
         "\nsmall_preset=" + small_preset + "\nk=" + std::to_string(n_clusters) +
         "\nlayer=" + std::to_string(feature_layer) +
         "\nkmeans=" + std::to_string(kmeans.max_iters) + "," + fmt(kmeans.tolerance) + "," +
         std::to_string(kmeans.restarts) + "\nseed=" + std::to_string(seed) + "\n";
}

std::string PretrainConfig::preset_for(int iteration) const {
  return (iteration < iterations && !small_preset.empty()) ? small_preset : preset;
}

int PretrainConfig::layer_for(const model::ArchConfig& arch) const {
  int layer = feature_layer < 0 ? arch.n_enc_layers / 2 : feature_layer;
  return std::min(layer, arch.n_enc_layers - 1);
}

const char* input_mode_name(InputMode m) { return m == InputMode::AV ? "AV" : "A"; }

InputMode parse_input_mode(const std::string& s) {
  if (s == "AV" || s == "av") return InputMode::AV;
  if (s == "A" || s == "a") return InputMode::A;
  fail(ErrorKind::Config, "input mode must be A or AV, got '" + s + "'");
}

void FinetuneConfig::validate() const {
  if (steps < 1) fail(ErrorKind::Config, "finetune steps must be >= 1");
  if (freeze_steps > steps) fail(ErrorKind::Config, "freeze_steps must not exceed steps");
  if (batch_frames < 1) fail(ErrorKind::Config, "batch_frames must be >= 1");
  noise.validate();
  adam.validate();
  model::preset(preset).validate();
}

int FinetuneConfig::effective_freeze_steps() const {
  return freeze_steps >= 0 ? freeze_steps : steps / 4;
}

std::string FinetuneConfig::canonical() const {
  return "name=" + name + "\nmanifest=" + manifest + "\nsteps=" + std::to_string(steps) +
         "\nfreeze=" + std::to_string(effective_freeze_steps()) +
         "\nbatch_frames=" + std::to_string(batch_frames) + "\nnoise=" + policy_canonical(noise) +
         "\nmode=" + input_mode_name(mode) + "\nadam=" + adam_canonical(adam) +
         "\npreset=" + preset + "\nseed=" + std::to_string(seed) + "\n";
}

PretrainConfig pretrain_config_from(const ExperimentFile& f, uint64_t base_seed) {
  const std::string s = "pretrain";
  f.check_keys(s, {"iterations", "steps", "batch_frames", "noise", "noise_p", "noise_snr_db",
                   "noise_types", "noise_snr_range", "noise_seed", "mask_start_prob", "mask_span",
                   "p_both", "lr", "warmup", "clip_norm", "preset", "small_preset", "feature_layer",
                   "seed"});
  f.check_keys("cluster", {"k", "max_iters", "restarts", "tolerance", "checkpoint", "layer",
                           "iteration"});
  PretrainConfig c;
  c.seed = f.get_u64(s, "seed", derive_seed(base_seed, {tag("pretrain")}));
  c.iterations = f.get_int(s, "iterations", c.iterations);
  c.steps = f.get_int(s, "steps", c.steps);
  c.batch_frames = f.get_int(s, "batch_frames", c.batch_frames);
  c.pretrain_noise = f.get_bool(s, "noise", c.pretrain_noise);
  c.noise = policy_from(f, s, c.seed);
  c.mask_start_prob = f.get_double(s, "mask_start_prob", c.mask_start_prob);
  c.mask_span = f.get_int(s, "mask_span", c.mask_span);
  c.dropout.p_both = f.get_double(s, "p_both", c.dropout.p_both);
  c.adam = adam_from(f, s, AdamConfig{5e-4, 200});
  c.preset = f.get_string(s, "preset", f.get_string("model", "preset", c.preset));
  c.small_preset = f.get_string(s, "small_preset", c.small_preset);
  if (c.small_preset == "none") c.small_preset.clear();
  c.feature_layer = f.get_int(s, "feature_layer", c.feature_layer);
  c.n_clusters = f.get_int("cluster", "k", c.n_clusters);
  c.kmeans.max_iters = f.get_int("cluster", "max_iters", c.kmeans.max_iters);
  c.kmeans.restarts = f.get_int("cluster", "restarts", c.kmeans.restarts);
  c.kmeans.tolerance = f.get_double("cluster", "tolerance", c.kmeans.tolerance);
  c.validate();
  return c;
}

FinetuneConfig finetune_config_from(const ExperimentFile& f, const std::string& name,
                                    uint64_t base_seed) {
  const std::string s = "finetune." + name;
  f.check_keys(s, {"manifest", "steps", "freeze_steps", "batch_frames", "noise_p", "noise_snr_db",
                   "noise_types", "noise_snr_range", "noise_seed", "mode", "lr", "warmup",
                   "clip_norm", "preset", "seed", "pretrained"});
  FinetuneConfig c;
  c.name = name;
  c.seed = f.get_u64(s, "seed", derive_seed(base_seed, {tag("finetune"), tag(name)}));
  c.manifest = f.get_string(s, "manifest", "finetune_" + name);
  c.steps = f.get_int(s, "steps", name == "mid" ? 10000 : 3000);
  c.freeze_steps = f.get_int(s, "freeze_steps", -1);
  c.batch_frames = f.get_int(s, "batch_frames", c.batch_frames);
  c.noise = policy_from(f, s, c.seed);
  c.mode = parse_input_mode(f.get_string(s, "mode", "AV"));
  c.adam = adam_from(f, s, AdamConfig{5e-4, 200});
  c.preset = f.get_string(s, "preset", f.get_string("model", "preset", c.preset));
  c.validate();
  return c;
}

std::vector<size_t> batch_indices(const corpus::Dataset& ds, int batch_frames, uint64_t seed,
                                  long step) {
  std::vector<size_t> order(ds.items.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, {tag("batch"), static_cast<uint64_t>(step)});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<size_t> out;
  long frames = 0;
  for (size_t i : order) {
    long t = static_cast<long>(ds.items[i].video.rows());
    if (!out.empty() && frames + t > batch_frames) break;
    out.push_back(i);
    frames += t;
  }
  return out;
}

Mat training_audio(const corpus::Example& ex, const signal::NoiseBank* bank,
                   const signal::NoisePolicy& policy, uint64_t draw, NoiseApplied* info) {
  if (info) *info = NoiseApplied{};
  if (!bank || policy.apply_probability <= 0.0) return ex.clean_audio;
  auto pick = signal::sample_training_noise(*bank, policy, draw);
  if (!pick) return ex.clean_audio;
  signal::Waveform clean = corpus::load_audio(ex);
  signal::Waveform mixed = signal::mix_at_snr(clean, *pick->clip, pick->snr_db,
                                              derive_seed(policy.seed, {tag("fit"), draw}));
  if (info) *info = NoiseApplied{true, pick->clip->id, pick->snr_db};
  return corpus::audio_features_for(mixed, ex.video.rows(), ex.id);
}

PretrainBatch build_pretrain_batch(const PretrainConfig& cfg, const corpus::Dataset& ds,
                                   const clustering::LabelMap& labels,
                                   const signal::NoiseBank* bank, uint64_t iter_seed, long step) {
  const std::vector<size_t> idx = batch_indices(ds, cfg.batch_frames, iter_seed, step);
  PretrainBatch b;
  b.examples.resize(idx.size());
  b.ids.resize(idx.size());
  b.noise.resize(idx.size());
  const uint64_t ustep = static_cast<uint64_t>(step);
  parallel_for(idx.size(), [&](size_t slot) {
    const corpus::Example& ex = ds.items[idx[slot]];
    model::PretrainExample& pe = b.examples[slot];
    b.ids[slot] = ex.id;
    auto lt = labels.find(ex.id);
    if (lt == labels.end()) fail(ErrorKind::Format, "no cluster labels for " + ex.id);
    if (static_cast<Eigen::Index>(lt->second.size()) != ex.video.rows())
      fail(ErrorKind::ShapeMismatch, ex.id + ": label length != frame count");
    pe.targets = lt->second;
    const uint64_t draw = derive_seed(iter_seed, {tag("noise-draw"), ustep, slot});
    pe.audio = cfg.pretrain_noise ? training_audio(ex, bank, cfg.noise, draw, &b.noise[slot])
                                  : ex.clean_audio;
    pe.video = ex.video;
    pe.mask = model::sample_mask(static_cast<int>(ex.video.rows()), cfg.mask_start_prob,
                                 cfg.mask_span, derive_seed(iter_seed, {tag("mask"), ustep, slot}));
    pe.mode = model::sample_modality(cfg.dropout, derive_seed(iter_seed, {tag("modality"), slot}),
                                     ustep);
  });
  return b;
}

PretrainResult pretrain(const PretrainConfig& cfg, const corpus::Dataset& ds,
                        const signal::NoiseBank* bank, const std::string& out_dir,
                        const Progress& progress) {
  cfg.validate();
  if (cfg.pretrain_noise && cfg.noise.apply_probability > 0.0 && !bank)
    fail(ErrorKind::Config, "noisy pretraining needs a noise corpus");
  std::map<std::string, std::vector<int>> symbols;
  for (const auto& ex : ds.items)
    if (!ex.symbols.empty()) symbols.emplace(ex.id, ex.symbols);

  PretrainResult result;
  const std::string cfg_hash = short_hash(cfg.canonical());
  for (int it = 1; it <= cfg.iterations; ++it) {
    const uint64_t iter_seed = derive_seed(cfg.seed, {tag("iteration"), static_cast<uint64_t>(it)});
    const uint64_t km_seed = derive_seed(iter_seed, {tag("kmeans")});
    IterationRecord rec;
    clustering::LabelMap labels;
    if (it == 1) {
      rec.codebook = clustering::fit_mfcc_codebook(ds, cfg.n_clusters, km_seed, cfg.kmeans);
      labels = clustering::label_mfcc(rec.codebook, ds);
    } else {
      const model::Checkpoint& prev = result.iterations.back().checkpoint;
      const int layer = cfg.layer_for(prev.arch);
      rec.codebook = clustering::refit_from_encoder(prev, layer, ds, cfg.n_clusters, km_seed, it,
                                                    cfg.kmeans);
      labels = clustering::label_encoder(rec.codebook, prev, layer, ds);
    }
    if (symbols.size() == ds.items.size()) rec.purity = clustering::purity(labels, symbols);
    if (progress)
      progress("pretrain iteration " + std::to_string(it) + ": targets " + rec.codebook.source +
               (rec.purity >= 0 ? ", purity " + fmt(rec.purity).substr(0, 6) : ""));

    model::ArchConfig arch = model::preset(cfg.preset_for(it));
    arch.n_clusters = cfg.n_clusters;
    model::ParamStore params =
        model::init_params(arch, derive_seed(iter_seed, {tag("init")}), {true, true, false});
    AdamState state = make_adam_state(params);
    std::vector<double> lrs;
    for (long step = 1; step <= cfg.steps; ++step) {
      PretrainBatch batch = build_pretrain_batch(cfg, ds, labels, bank, iter_seed, step);
      model::GradStore grads;
      model::BatchResult r = model::pretrain_backward(params, arch, batch.examples, grads);
      if (!std::isfinite(r.loss) || !grads.all_finite())
        nan_abort(out_dir, "pretrain iteration " + std::to_string(it), step, batch.ids, r.loss);
      const double lr = cfg.adam.lr_at(step);
      adam_step(params, grads, state, cfg.adam, lr);
      rec.losses.push_back(r.loss);
      rec.accuracies.push_back(r.count ? static_cast<double>(r.correct) / static_cast<double>(r.count) : 0.0);
      lrs.push_back(lr);
      if (progress && (step % 100 == 0 || step == cfg.steps))
        progress("  step " + std::to_string(step) + " loss " + fmt(r.loss).substr(0, 7));
    }
    if (!params.all_finite()) nan_abort(out_dir, "pretrain", cfg.steps, {}, NAN);
    params.round_to_f32();
    rec.checkpoint.arch = arch;
    rec.checkpoint.params = std::move(params);
    rec.checkpoint.meta = {{"kind", "pretrain"},
                           {"iteration", std::to_string(it)},
                           {"targets", rec.codebook.source},
                           {"pretrain_noise", cfg.pretrain_noise ? "true" : "false"},
                           {"steps", std::to_string(cfg.steps)},
                           {"config_hash", cfg_hash}};
    if (!out_dir.empty()) {
      const fs::path dir(out_dir);
      const std::string n = std::to_string(it);
      model::save_checkpoint((dir / ("iter" + n + ".avck")).string(), rec.checkpoint);
      clustering::write_codebook((dir / ("iter" + n + "_codebook.kmc")).string(), rec.codebook);
      clustering::write_labels((dir / ("iter" + n + "_labels.tsv")).string(), labels);
      write_log((dir / ("iter" + n + "_log.tsv")).string(), rec.losses, lrs, rec.accuracies);
    }
    result.iterations.push_back(std::move(rec));
  }
  return result;
}

FinetuneResult finetune(const FinetuneConfig& cfg, const corpus::Dataset& labeled,
                        const signal::NoiseBank* bank, const model::Checkpoint* pretrained,
                        const std::string& out_dir, const Progress& progress) {
  cfg.validate();
  if (cfg.noise.apply_probability > 0.0 && !bank)
    fail(ErrorKind::Config, "noisy finetuning needs a noise corpus");
  FinetuneResult result;
  model::ArchConfig arch = pretrained ? pretrained->arch : model::preset(cfg.preset);
  const uint64_t init_seed = derive_seed(cfg.seed, {tag("init")});
  model::ParamStore params;
  if (pretrained) {
    params = pretrained->params;
    params.erase_prefix("head.");
    model::init_parts(params, arch, init_seed, {false, false, true});
  } else {
    params = model::init_params(arch, init_seed, {true, false, true});
  }
  const int freeze = pretrained ? cfg.effective_freeze_steps() : 0;
  const auto mode = cfg.mode == InputMode::A ? model::ModalityMode::AudioOnly : model::ModalityMode::Both;
  result.encoder_digest_before = params.digest("enc.");
  result.encoder_digest_after_freeze = result.encoder_digest_before;

  AdamState state = make_adam_state(params);
  std::vector<double> lrs, accs;
  for (long step = 1; step <= cfg.steps; ++step) {
    const std::vector<size_t> idx = batch_indices(labeled, cfg.batch_frames, cfg.seed, step);
    std::vector<model::FinetuneExample> batch(idx.size());
    std::vector<std::string> ids(idx.size());
    parallel_for(idx.size(), [&](size_t slot) {
      const corpus::Example& ex = labeled.items[idx[slot]];
      const uint64_t draw = derive_seed(cfg.seed, {tag("noise-draw"), static_cast<uint64_t>(step), slot});
      batch[slot].audio = training_audio(ex, bank, cfg.noise, draw);
      batch[slot].video = ex.video;
      batch[slot].mode = mode;
      batch[slot].transcript = ex.transcript;
      ids[slot] = ex.id;
    });
    const bool frozen = step <= freeze;
    model::GradStore grads;
    model::BatchResult r = model::finetune_backward(params, arch, batch, grads, !frozen);
    if (!std::isfinite(r.loss) || !grads.all_finite())
      nan_abort(out_dir, "finetune", step, ids, r.loss);
    const double lr = cfg.adam.lr_at(step);
    if (frozen)
      adam_step(params, grads, state, cfg.adam, lr, model::is_encoder_param);
    else
      adam_step(params, grads, state, cfg.adam, lr);
    if (step == freeze) result.encoder_digest_after_freeze = params.digest("enc.");
    result.losses.push_back(r.loss);
    accs.push_back(r.count ? static_cast<double>(r.correct) / static_cast<double>(r.count) : 0.0);
    lrs.push_back(lr);
    if (progress && (step % 100 == 0 || step == cfg.steps))
      progress("  finetune step " + std::to_string(step) + " loss " + fmt(r.loss).substr(0, 7));
  }
  if (!params.all_finite()) nan_abort(out_dir, "finetune", cfg.steps, {}, NAN);
  params.round_to_f32();
  result.checkpoint.arch = arch;
  result.checkpoint.params = std::move(params);
  result.checkpoint.meta = {{"kind", "finetune"},
                            {"finetune", cfg.name},
                            {"mode", input_mode_name(cfg.mode)},
                            {"pt", !pretrained ? "None"
                                   : pretrained->meta.count("pretrain_noise") &&
                                           pretrained->meta.at("pretrain_noise") == "true"
                                       ? "Noisy"
                                       : "Clean"},
                            {"freeze_steps", std::to_string(freeze)},
                            {"steps", std::to_string(cfg.steps)},
                            {"config_hash", short_hash(cfg.canonical())}};
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    model::save_checkpoint((dir / "model.avck").string(), result.checkpoint);
    write_log((dir / "finetune_log.tsv").string(), result.losses, lrs, accs);
  }
  return result;
}

}  // namespace avlab::training
