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

#include <algorithm>
#include <filesystem>

#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/runner/runner.hpp"

namespace fs = std::filesystem;

namespace avlab::runner {

std::string pt_label(const std::string& pt) {
  if (pt == "none") return "None";
  if (pt == "clean") return "Clean";
  if (pt == "noisy") return "Noisy";
  fail(ErrorKind::Config, "PT type must be none, clean or noisy, got '" + pt + "'");
}

std::string Plan::data_key() const {
  return "[corpus]\n" + corpus.canonical() + "[noise]\n" + noise.canonical();
}

std::string Plan::canonical() const {
  std::string out = data_key() + "[pretrain]\n" + pretrain.canonical();
  for (const auto& ft : finetunes) out += "[finetune." + ft.name + "]\n" + ft.canonical();
  out += "[eval]\n" + eval.canonical() + "split=" + eval_split + "\n[experiment]\npt=" + join(pts, ",") +
         "\nmode=";
  for (auto m : modes) out += std::string(training::input_mode_name(m)) + ",";
  out += "\nseed=" + std::to_string(seed) + "\n";
  return out;
}

std::string Plan::hash() const { return short_hash(canonical()); }

Plan load_plan(const Options& opt) {
  Plan p;
  p.file = opt.config.empty() ? training::ExperimentFile::parse("", "<defaults>")
                              : training::ExperimentFile::load(opt.config);
  const auto& f = p.file;
  f.check_sections({"corpus", "noise", "model", "pretrain", "cluster", "finetune", "eval", "experiment"});
  f.check_keys("experiment", {"pt", "mode", "finetune", "seed"});
  f.check_keys("model", {"preset"});
  f.check_keys("corpus", {"dir", "n_speakers", "utterances_per_speaker", "min_len_s", "max_len_s",
                          "frac_finetune", "frac_validation", "frac_test", "label_fraction_low",
                          "label_fraction_mid", "n_symbols", "min_symbol_frames",
                          "max_symbol_frames", "seed"});
  f.check_keys("noise", {"seconds_per_hour", "clip_len_s", "speakers_per_pool", "seed"});
  f.check_keys("eval", {"snrs", "types", "seed", "max_len", "max_utterances", "split", "checkpoint"});

  p.seed = opt.seed ? *opt.seed : f.get_u64("experiment", "seed", 0);

  corpus::CorpusSpec& c = p.corpus;
  c.n_speakers = f.get_int("corpus", "n_speakers", c.n_speakers);
  c.utterances_per_speaker = f.get_int("corpus", "utterances_per_speaker", c.utterances_per_speaker);
  c.min_len_s = f.get_double("corpus", "min_len_s", c.min_len_s);
  c.max_len_s = f.get_double("corpus", "max_len_s", c.max_len_s);
  c.frac_finetune = f.get_double("corpus", "frac_finetune", c.frac_finetune);
  c.frac_validation = f.get_double("corpus", "frac_validation", c.frac_validation);
  c.frac_test = f.get_double("corpus", "frac_test", c.frac_test);
  c.label_fraction_low = f.get_double("corpus", "label_fraction_low", c.label_fraction_low);
  c.label_fraction_mid = f.get_double("corpus", "label_fraction_mid", c.label_fraction_mid);
  c.n_symbols = f.get_int("corpus", "n_symbols", c.n_symbols);
  c.min_symbol_frames = f.get_int("corpus", "min_symbol_frames", c.min_symbol_frames);
  c.max_symbol_frames = f.get_int("corpus", "max_symbol_frames", c.max_symbol_frames);
  c.seed = f.get_u64("corpus", "seed", derive_seed(p.seed, {tag("corpus")}));
  c.validate();

  corpus::NoiseCorpusSpec& n = p.noise;
  n.seconds_per_hour = f.get_double("noise", "seconds_per_hour", n.seconds_per_hour);
  n.clip_len_s = f.get_double("noise", "clip_len_s", n.clip_len_s);
  n.speakers_per_pool = f.get_int("noise", "speakers_per_pool", n.speakers_per_pool);
  n.seed = f.get_u64("noise", "seed", derive_seed(p.seed, {tag("noise-corpus")}));
  n.validate();

  if (auto dir = f.get("corpus", "dir"))
    p.data_dir = f.resolve_path(*dir);
  else
    p.data_dir = (fs::path(opt.out.empty() ? "avlab-out" : opt.out) / "data").string();

  p.pretrain = training::pretrain_config_from(f, p.seed);

  p.pts = f.get_list("experiment", "pt", {"none", "clean", "noisy"});
  for (const auto& pt : p.pts) pt_label(pt);
  for (const auto& m : f.get_list("experiment", "mode", {"A", "AV"}))
    p.modes.push_back(training::parse_input_mode(m));
  for (const auto& name : f.get_list("experiment", "finetune", {"low"}))
    p.finetunes.push_back(training::finetune_config_from(f, name, p.seed));
  for (const auto& s : f.sections_with_prefix("finetune.")) {
    const std::string name = s.substr(9);
    bool listed = std::any_of(p.finetunes.begin(), p.finetunes.end(),
                              [&](const auto& ft) { return ft.name == name; });
    if (!listed) training::finetune_config_from(f, name, p.seed);  // validate anyway
  }

  evaluation::EvalConfig& e = p.eval;
  e.snrs.clear();
  for (const auto& s : f.get_list("eval", "snrs", {"-10", "-5", "0", "5", "10"})) {
    try {
      e.snrs.push_back(std::stod(s));
    } catch (const std::logic_error&) {
      fail(ErrorKind::Config, "[eval] snrs entry '" + s + "' is not a number");
    }
  }
  e.types = f.get_list("eval", "types", evaluation::kNoiseTypes);
  for (const auto& t : e.types) signal::parse_category(t);
  e.seed = f.get_u64("eval", "seed", derive_seed(p.seed, {tag("eval")}));
  e.max_len = f.get_int("eval", "max_len", e.max_len);
  e.max_utterances = static_cast<size_t>(f.get_int("eval", "max_utterances", 0));
  p.eval_split = f.get_string("eval", "split", "test");
  if (e.max_len < 1) fail(ErrorKind::Config, "[eval] max_len must be >= 1");
  return p;
}

}  // namespace avlab::runner
