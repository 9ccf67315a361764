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

#include "avlab/runner/runner.hpp"

#include <fftw3.h>
#include <openssl/crypto.h>
#include <zlib.h>

#include <Eigen/Core>
#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/model/checkpoint.hpp"

namespace fs = std::filesystem;

namespace avlab::runner {

namespace {

void emit(const Sinks& s, const std::string& text) {
  if (!s.out) return;
  for (const auto& line : split(text, '\n')) s.out(line);
}

void note(const Sinks& s, const std::string& line) {
  if (s.log) s.log(line);
}

std::string out_dir(const Options& opt) { return opt.out.empty() ? "avlab-out" : opt.out; }

void write_run_header(const Options& opt, const Plan& plan) {
  const fs::path dir(out_dir(opt));
  fs::create_directories(dir);
  std::string text = "command=" + opt.command + "\nconfig=" + (opt.config.empty() ? "-" : opt.config) +
                     "\nconfig_hash=" + plan.hash() + "\nseed=" + std::to_string(plan.seed) + "\n" +
                     version_string();
  write_text_file((dir / "run_header.txt").string(), text);
}

const signal::NoiseBank& bank_for(const Plan& plan, std::optional<signal::NoiseBank>& slot) {
  if (!slot) {
    const fs::path manifest = fs::path(plan.data_dir) / "noise.tsv";
    if (!fs::exists(manifest))
      fail(ErrorKind::Io, manifest.string() + " not found; run gen-noise first");
    slot = signal::NoiseBank::load(manifest.string());
  }
  return *slot;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void cmd_gen_data(const Plan& plan, const Sinks& sinks) {
  corpus::Manifests m = corpus::gen_corpus(plan.corpus, plan.data_dir);
  emit(sinks, "corpus " + plan.data_dir + " hash " + short_hash(plan.corpus.canonical()));
  emit(sinks, "pretrain " + std::to_string(m.pretrain.size()) + " finetune_low " +
                  std::to_string(m.finetune_low.size()) + " finetune_mid " +
                  std::to_string(m.finetune_mid.size()) + " validation " +
                  std::to_string(m.validation.size()) + " test " + std::to_string(m.test.size()));
}

void cmd_gen_noise(const Plan& plan, const Sinks& sinks) {
  if (!fs::exists(fs::path(plan.data_dir) / "corpus.cfg"))
    fail(ErrorKind::Io, plan.data_dir + " has no corpus; run gen-data first");
  corpus::NoiseCorpusResult r = corpus::gen_noise_corpus(plan.corpus, plan.noise, plan.data_dir);
  std::map<std::string, int> counts;
  for (const auto& e : r.entries)
    ++counts[std::string(signal::partition_name(e.partition)) + "/" + signal::category_name(e.category)];
  emit(sinks, "noise clips " + std::to_string(r.entries.size()));
  for (const auto& [k, n] : counts) emit(sinks, "  " + k + " " + std::to_string(n));
}

void cmd_pretrain(const Plan& plan, const std::string& out, const Sinks& sinks) {
  corpus::Dataset ds = corpus::load_split(plan.data_dir, "pretrain", true);
  std::optional<signal::NoiseBank> bank;
  const signal::NoiseBank* nb = plan.pretrain.pretrain_noise ? &bank_for(plan, bank) : nullptr;
  fs::create_directories(out);
  training::PretrainResult r = training::pretrain(plan.pretrain, ds, nb, out, sinks.log);
  for (size_t i = 0; i < r.iterations.size(); ++i) {
    const auto& it = r.iterations[i];
    std::string line = "iteration " + std::to_string(i + 1) + " targets " + it.codebook.source;
    if (it.purity >= 0) line += " purity " + format_fixed(it.purity, 3);
    if (!it.losses.empty()) line += " final_loss " + format_fixed(it.losses.back(), 4);
    emit(sinks, line);
  }
}

void cmd_cluster(const Plan& plan, const std::string& out, const Sinks& sinks) {
  const auto& f = plan.file;
  corpus::Dataset ds = corpus::load_split(plan.data_dir, "pretrain", true);
  const int k = plan.pretrain.n_clusters;
  const uint64_t seed = derive_seed(plan.pretrain.seed, {tag("cluster")});
  clustering::Codebook cb;
  clustering::LabelMap labels;
  if (auto path = f.get("cluster", "checkpoint")) {
    model::Checkpoint ck = model::load_checkpoint(f.resolve_path(*path));
    const int layer = f.get_int("cluster", "layer", plan.pretrain.layer_for(ck.arch));
    int iteration = 2;
    if (auto it = ck.meta.find("iteration"); it != ck.meta.end()) iteration = std::stoi(it->second) + 1;
    iteration = f.get_int("cluster", "iteration", iteration);
    cb = clustering::refit_from_encoder(ck, layer, ds, k, seed, iteration, plan.pretrain.kmeans);
    labels = clustering::label_encoder(cb, ck, layer, ds);
  } else {
    cb = clustering::fit_mfcc_codebook(ds, k, seed, plan.pretrain.kmeans);
    labels = clustering::label_mfcc(cb, ds);
  }
  std::map<std::string, std::vector<int>> symbols;
  for (const auto& ex : ds.items) symbols[ex.id] = ex.symbols;
  fs::create_directories(out);
  clustering::write_codebook((fs::path(out) / "codebook.kmc").string(), cb);
  clustering::write_labels((fs::path(out) / "labels.tsv").string(), labels);
  emit(sinks, "codebook " + cb.source + " k " + std::to_string(cb.k()) + " dim " +
                  std::to_string(cb.dim()));
  emit(sinks, "purity " + format_fixed(clustering::purity(labels, symbols), 4));
}

void cmd_finetune(const Plan& plan, const std::string& out, const Sinks& sinks) {
  const training::FinetuneConfig& fc = plan.finetunes.front();
  std::optional<model::Checkpoint> init;
  if (auto path = plan.file.get("finetune." + fc.name, "pretrained"))
    init = model::load_checkpoint(plan.file.resolve_path(*path));
  corpus::Dataset ds = corpus::load_split(plan.data_dir, fc.manifest);
  std::optional<signal::NoiseBank> bank;
  const signal::NoiseBank* nb = fc.noise.apply_probability > 0.0 ? &bank_for(plan, bank) : nullptr;
  fs::create_directories(out);
  training::FinetuneResult r =
      training::finetune(fc, ds, nb, init ? &*init : nullptr, out, sinks.log);
  emit(sinks, "finetune " + fc.name + " mode " + training::input_mode_name(fc.mode) + " pt " +
                  r.checkpoint.meta.at("pt") + " steps " + std::to_string(fc.steps));
  emit(sinks, "final_loss " + format_fixed(r.losses.empty() ? 0.0 : r.losses.back(), 4));
  emit(sinks, "model " + (fs::path(out) / "model.avck").string());
}

evaluation::GridMeta meta_from(const model::Checkpoint& ck) {
  auto get = [&](const char* k, const std::string& def) {
    auto it = ck.meta.find(k);
    return it == ck.meta.end() ? def : it->second;
  };
  return {ck.arch.preset, get("pt", "None"), get("finetune", "low"), get("mode", "AV")};
}

void cmd_eval(const Plan& plan, const std::string& out, const Sinks& sinks) {
  auto path = plan.file.get("eval", "checkpoint");
  if (!path) fail(ErrorKind::Config, "eval needs [eval] checkpoint");
  model::Checkpoint ck = model::load_checkpoint(plan.file.resolve_path(*path));
  if (!ck.params.contains("dec.tok_emb"))
    fail(ErrorKind::KindMismatch, *path + " is not a finetuned model");
  const evaluation::GridMeta meta = meta_from(ck);
  const auto mode = meta.mode == "A" ? model::ModalityMode::AudioOnly : model::ModalityMode::Both;
  corpus::Dataset test = corpus::load_split(plan.data_dir, plan.eval_split);
  std::optional<signal::NoiseBank> bank;
  evaluation::EvalGrid grid = evaluation::eval_grid(
      evaluation::greedy_recognizer(ck, mode, plan.eval.max_len), test, bank_for(plan, bank),
      plan.eval, meta);
  const std::string chash = corpus::corpus_hash(plan.data_dir);
  fs::create_directories(out);
  write_text_file((fs::path(out) / "grid.csv").string(),
                  "# config_hash=" + plan.hash() + "\n" +
                      evaluation::render_report({grid}, evaluation::ReportFormat::Csv, chash));
  emit(sinks, evaluation::render_report({grid}, evaluation::ReportFormat::Text, chash));
}

bool is_grid_csv(const fs::path& p) {
  for (const auto& raw : split(read_text_file(p.string()), '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    return line == "model,pt,ft,mode,noise_type,snr_db,wer_percent";
  }
  return false;
}

std::vector<fs::path> report_sources(const Options& opt) {
  std::vector<fs::path> files;
  const fs::path root = opt.fixtures.empty() ? fs::path(out_dir(opt)) : fs::path(opt.fixtures);
  if (!fs::exists(root)) fail(ErrorKind::Io, root.string() + " not found");
  if (fs::is_regular_file(root)) return {root};
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv" && is_grid_csv(e.path()))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::Io, "no grid CSV files under " + root.string());
  return files;
}

void cmd_report(const Options& opt, const Sinks& sinks) {
  std::vector<evaluation::EvalGrid> grids;
  std::string corpus;
  for (const auto& file : report_sources(opt)) {
    std::string h;
    for (auto& g : evaluation::read_grid_csv(file.string(), &h)) {
      auto same = std::find_if(grids.begin(), grids.end(), [&](const auto& o) { return o.meta == g.meta; });
      if (same != grids.end()) {
        if (same->cells != g.cells || same->clean != g.clean)
          fail(ErrorKind::Format, file.string() + " repeats a grid with different values");
        continue;
      }
      grids.push_back(std::move(g));
    }
    if (!h.empty()) {
      if (!corpus.empty() && corpus != h)
        fail(ErrorKind::HashMismatch, file.string() + " was evaluated on corpus " + h + ", not " + corpus);
      corpus = h;
    }
  }
  std::vector<evaluation::EvalGrid> complete;
  for (const auto& g : grids) {
    try {
      evaluation::aggregate(g);
      complete.push_back(g);
    } catch (const Error&) {
    }
  }
  if (!complete.empty()) emit(sinks, evaluation::render_summary(complete));
  emit(sinks, evaluation::render_report(grids, evaluation::ReportFormat::Text, corpus));
  if (opt.plot) {
    fs::create_directories(out_dir(opt));
    write_text_file((fs::path(out_dir(opt)) / "report.svg").string(), evaluation::render_svg(grids));
  }
}

void cmd_verify(const Options& opt, const Sinks& sinks) {
  const auto outcomes = verify_suite(opt.fixtures);
  int failed = 0;
  for (const auto& c : outcomes) {
    emit(sinks, std::string(c.passed ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : "  " + c.detail));
    failed += c.passed ? 0 : 1;
  }
  if (failed) fail(ErrorKind::Numerical, std::to_string(failed) + " verification check(s) failed");
}

void cmd_experiment(const Plan& plan, const Options& opt, const Sinks& sinks) {
  ExperimentResult r = run_experiment(plan, out_dir(opt), opt.plot, sinks);
  emit(sinks, evaluation::render_summary(r.grids));
  emit(sinks, "trained: pretrain " + std::to_string(r.stats.pretrain_runs) + " finetune " +
                  std::to_string(r.stats.finetune_runs) + " eval " + std::to_string(r.stats.eval_runs) +
                  " steps " + std::to_string(r.stats.training_steps));
  emit(sinks, "report " + (fs::path(out_dir(opt)) / "report.txt").string());
}

std::string dry_run_text(const Options& opt, const Plan& plan) {
  std::string s = "command " + opt.command + "\nconfig_hash " + plan.hash() + "\ndata_dir " +
                  plan.data_dir + "\nout " + out_dir(opt) + "\n";
  if (opt.command == "experiment") {
    s += "cells";
    for (const auto& ft : plan.finetunes)
      for (const auto& pt : plan.pts)
        for (auto m : plan.modes) s += " " + pt + "/" + ft.name + "/" + training::input_mode_name(m);
    s += "\n";
  }
  return s + "\n" + plan.canonical();
}

}  // namespace

std::string version_string() {
  return std::string("avlab=") + AVLAB_VERSION + "\neigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) +
         "\nfftw=" + fftw_version + "\nopenssl=" + OpenSSL_version(OPENSSL_VERSION) +
         "\nzlib=" + zlibVersion() + "\n";
}

void run(const Options& opt, const Sinks& sinks) {
  if (std::find(kCommands.begin(), kCommands.end(), opt.command) == kCommands.end())
    fail(ErrorKind::Usage, "unknown command '" + opt.command + "'");

  // report and verify only read; everything else is driven by the plan.
  if (opt.command == "report" || opt.command == "verify") {
    if (opt.dry_run) {
      emit(sinks, "command " + opt.command + "\nsource " +
                      (opt.fixtures.empty() ? out_dir(opt) : opt.fixtures));
      return;
    }
    if (opt.command == "report")
      cmd_report(opt, sinks);
    else
      cmd_verify(opt, sinks);
    if (!opt.out.empty()) write_run_header(opt, load_plan(opt));
    return;
  }

  const Plan plan = load_plan(opt);
  if (opt.dry_run) {
    emit(sinks, dry_run_text(opt, plan));
    return;
  }
  write_run_header(opt, plan);
  const std::string out = out_dir(opt);
  note(sinks, "config " + plan.hash() + " seed " + std::to_string(plan.seed));
  if (opt.command == "gen-data") cmd_gen_data(plan, sinks);
  else if (opt.command == "gen-noise") cmd_gen_noise(plan, sinks);
  else if (opt.command == "pretrain") cmd_pretrain(plan, out, sinks);
  else if (opt.command == "cluster") cmd_cluster(plan, out, sinks);
  else if (opt.command == "finetune") cmd_finetune(plan, out, sinks);
  else if (opt.command == "eval") cmd_eval(plan, out, sinks);
  else cmd_experiment(plan, opt, sinks);
}

}  // namespace avlab::runner
