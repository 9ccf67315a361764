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

#include <filesystem>
#include <map>
#include <optional>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/model/checkpoint.hpp"
#include "avlab/runner/runner.hpp"

namespace fs = std::filesystem;

namespace avlab::runner {

namespace {

// A cache entry is a directory named <stage>-<hash> holding key.txt (the
// canonical text whose hash names the directory) and the artifact.
struct CacheEntry {
  fs::path dir;
  std::string key_text;
  std::string hash;

  CacheEntry(const fs::path& root, const std::string& stage, std::string text)
      : key_text(std::move(text)), hash(short_hash(key_text)) {
    dir = root / (stage + "-" + hash);
  }

  // True when the key file is present and consistent; throws on mismatch.
  bool claimed() const {
    const fs::path key = dir / "key.txt";
    if (!fs::exists(key)) return false;
    const std::string stored = read_text_file(key.string());
    if (short_hash(stored) != hash || stored != key_text)
      fail(ErrorKind::CacheCorruption, key.string() + " does not match its cache hash " + hash);
    return true;
  }

  void claim() const { write_text_file((dir / "key.txt").string(), key_text); }

  std::optional<model::Checkpoint> checkpoint(const std::string& file) const {
    if (!claimed() || !fs::exists(dir / file)) return std::nullopt;
    model::Checkpoint ck;
    try {
      ck = model::load_checkpoint((dir / file).string());
    } catch (const Error& e) {
      fail(ErrorKind::CacheCorruption, std::string(e.what()));
    }
    auto it = ck.meta.find("cache_key");
    if (it == ck.meta.end() || it->second != hash)
      fail(ErrorKind::CacheCorruption, (dir / file).string() + " was written for another configuration");
    return ck;
  }

  void save(const std::string& file, model::Checkpoint& ck) const {
    ck.meta["cache_key"] = hash;
    model::save_checkpoint((dir / file).string(), ck);
  }
};

void ensure_data(const Plan& plan, const Sinks& sinks) {
  const fs::path root(plan.data_dir);
  const fs::path corpus_cfg = root / "corpus.cfg", noise_cfg = root / "noise.cfg";
  if (fs::exists(corpus_cfg)) {
    if (read_text_file(corpus_cfg.string()) != plan.corpus.canonical())
      fail(ErrorKind::Config, plan.data_dir + " holds a corpus generated from a different spec");
  } else {
    if (sinks.log) sinks.log("generating corpus in " + plan.data_dir);
    corpus::gen_corpus(plan.corpus, plan.data_dir);
  }
  if (fs::exists(noise_cfg)) {
    if (read_text_file(noise_cfg.string()) != plan.noise.canonical())
      fail(ErrorKind::Config, plan.data_dir + " holds a noise corpus from a different spec");
  } else {
    if (sinks.log) sinks.log("generating noise corpus in " + plan.data_dir);
    corpus::gen_noise_corpus(plan.corpus, plan.noise, plan.data_dir);
  }
}

}  // namespace

ExperimentResult run_experiment(const Plan& plan, const std::string& out, bool plot,
                                const Sinks& sinks) {
  ensure_data(plan, sinks);
  ExperimentResult res;
  res.corpus_hash = corpus::corpus_hash(plan.data_dir);
  const fs::path cache = fs::path(out) / "cache";
  auto log = [&](const std::string& s) {
    if (sinks.log) sinks.log(s);
  };

  std::optional<corpus::Dataset> pre_ds, test_ds;
  std::map<std::string, corpus::Dataset> ft_ds;
  std::optional<signal::NoiseBank> bank;
  auto get_bank = [&]() -> const signal::NoiseBank& {
    if (!bank) bank = signal::NoiseBank::load((fs::path(plan.data_dir) / "noise.tsv").string());
    return *bank;
  };

  std::map<std::string, model::Checkpoint> pretrained;
  std::map<std::string, std::string> pretrain_hash;
  for (const auto& pt : plan.pts) {
    if (pt == "none") continue;
    training::PretrainConfig pc = plan.pretrain;
    pc.pretrain_noise = pt == "noisy";
    CacheEntry entry(cache, "pretrain", "stage=pretrain\n" + plan.data_key() + pc.canonical());
    pretrain_hash[pt] = entry.hash;
    if (auto ck = entry.checkpoint("final.avck")) {
      log("pretrain " + pt + ": cached " + entry.dir.string());
      pretrained[pt] = std::move(*ck);
      continue;
    }
    log("pretrain " + pt + ": training into " + entry.dir.string());
    if (!pre_ds) pre_ds = corpus::load_split(plan.data_dir, "pretrain", true);
    fs::create_directories(entry.dir);
    entry.claim();
    training::PretrainResult r = training::pretrain(
        pc, *pre_ds, pc.pretrain_noise ? &get_bank() : nullptr, entry.dir.string(), sinks.log);
    model::Checkpoint ck = r.final();
    entry.save("final.avck", ck);
    pretrained[pt] = std::move(ck);
    ++res.stats.pretrain_runs;
    res.stats.training_steps += static_cast<long>(pc.steps) * pc.iterations;
  }

  for (const auto& base_ft : plan.finetunes) {
    for (const auto& pt : plan.pts) {
      for (auto mode : plan.modes) {
        training::FinetuneConfig fc = base_ft;
        fc.mode = mode;
        const std::string cell = pt + "/" + fc.name + "/" + training::input_mode_name(mode);
        const std::string upstream = pt == "none" ? "none" : pretrain_hash.at(pt);
        CacheEntry ft_entry(cache, "finetune",
                            "stage=finetune\n" + plan.data_key() + "pretrain=" + upstream + "\n" +
                                fc.canonical());
        std::optional<model::Checkpoint> model = ft_entry.checkpoint("model.avck");
        if (model) {
          log("finetune " + cell + ": cached");
        } else {
          log("finetune " + cell + ": training");
          if (!ft_ds.count(fc.manifest))
            ft_ds.emplace(fc.manifest, corpus::load_split(plan.data_dir, fc.manifest));
          fs::create_directories(ft_entry.dir);
          ft_entry.claim();
          const model::Checkpoint* init = pt == "none" ? nullptr : &pretrained.at(pt);
          const signal::NoiseBank* nb = fc.noise.apply_probability > 0.0 ? &get_bank() : nullptr;
          training::FinetuneResult r =
              training::finetune(fc, ft_ds.at(fc.manifest), nb, init, ft_entry.dir.string(), sinks.log);
          model = std::move(r.checkpoint);
          ft_entry.save("model.avck", *model);
          ++res.stats.finetune_runs;
          res.stats.training_steps += fc.steps;
        }

        const evaluation::GridMeta meta{model->arch.preset, pt_label(pt), fc.name,
                                        training::input_mode_name(mode)};
        CacheEntry ev_entry(cache, "eval",
                            "stage=eval\nfinetune=" + ft_entry.hash + "\nsplit=" + plan.eval_split +
                                "\n" + plan.eval.canonical());
        const fs::path grid_path = ev_entry.dir / "grid.csv";
        if (ev_entry.claimed() && fs::exists(grid_path)) {
          std::string stored_hash;
          auto grids = evaluation::read_grid_csv(grid_path.string(), &stored_hash);
          if (grids.size() != 1 || stored_hash != res.corpus_hash || !(grids[0].meta == meta))
            fail(ErrorKind::CacheCorruption, grid_path.string() + " does not match this experiment");
          log("eval " + cell + ": cached");
          res.grids.push_back(grids[0]);
          continue;
        }
        log("eval " + cell + ": decoding");
        if (!test_ds) test_ds = corpus::load_split(plan.data_dir, plan.eval_split);
        const auto mm = mode == training::InputMode::A ? model::ModalityMode::AudioOnly
                                                       : model::ModalityMode::Both;
        evaluation::EvalGrid grid = evaluation::eval_grid(
            evaluation::greedy_recognizer(*model, mm, plan.eval.max_len), *test_ds, get_bank(),
            plan.eval, meta);
        fs::create_directories(ev_entry.dir);
        ev_entry.claim();
        write_text_file(grid_path.string(),
                        "# config_hash=" + ev_entry.hash + "\n" +
                            evaluation::render_report({grid}, evaluation::ReportFormat::Csv, res.corpus_hash));
        ++res.stats.eval_runs;
        res.grids.push_back(grid);
      }
    }
  }

  const fs::path dir(out);
  std::string text = "config " + plan.hash() + "\n\n" + evaluation::render_summary(res.grids) + "\n" +
                     evaluation::render_report(res.grids, evaluation::ReportFormat::Text, res.corpus_hash);
  write_text_file((dir / "report.txt").string(), text);
  write_text_file((dir / "report.csv").string(),
                  "# config_hash=" + plan.hash() + "\n" +
                      evaluation::render_report(res.grids, evaluation::ReportFormat::Csv, res.corpus_hash));
  if (plot) write_text_file((dir / "report.svg").string(), evaluation::render_svg(res.grids));
  return res;
}

}  // namespace avlab::runner
