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

// Acceptance driver: one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avlab/clustering/clustering.hpp"
#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/corpus/corpus.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/evaluation/evaluation.hpp"
#include "avlab/model/checkpoint.hpp"
#include "avlab/model/gradcheck.hpp"
#include "avlab/model/network.hpp"
#include "avlab/runner/runner.hpp"
#include "avlab/signal/noise.hpp"
#include "avlab/training/experiment_file.hpp"
#include "avlab/training/training.hpp"

namespace fs = std::filesystem;
using namespace avlab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double v, const char* fmt = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
  std::string fixtures;
  std::string work;
};

const evaluation::EvalGrid& find_grid(const std::vector<evaluation::EvalGrid>& grids,
                                      const evaluation::GridMeta& meta) {
  for (const auto& g : grids)
    if (g.meta == meta) return g;
  fail(ErrorKind::Format, "no grid for " + meta.model + "/" + meta.pt + "/" + meta.ft + "/" + meta.mode);
}

// One-decimal renderings agree within one tenth.
bool within_tenth(double got, double published) {
  return std::llabs(round_tenths(got) - round_tenths(published)) <= 1;
}

Outcome criterion1(const Context& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = fs::path(ctx.fixtures) / "reference_grids";
  auto large = evaluation::read_grid_csv((dir / "large_grids.csv").string());
  auto main_rows = evaluation::read_grid_csv((dir / "headline.csv").string());
  struct Check {
    std::string label;
    double got, published;
  };
  std::vector<Check> checks = {
      {"N-WER AV/433h/Noisy",
       evaluation::aggregate(find_grid(large, {"LARGE", "Noisy", "433h", "AV"})).n_wer, 5.8},
      {"N-WER AV/30h/Noisy",
       evaluation::aggregate(find_grid(large, {"LARGE", "Noisy", "30h", "AV"})).n_wer, 7.8},
      {"babble AV/30h",
       evaluation::type_average(find_grid(main_rows, {"LARGE", "Noisy", "30h", "AV"}), "babble"), 14.1},
      {"babble AV/433h",
       evaluation::type_average(find_grid(main_rows, {"LARGE", "Noisy", "433h", "AV"}), "babble"), 12.4}};
  bool ok = true;
  std::string detail;
  for (const auto& c : checks) {
    ok = ok && within_tenth(c.got, c.published);
    detail += c.label + " " + format_one_decimal(c.got) + " (published " + format_one_decimal(c.published) + "); ";
  }
  const double t = seconds_since(t0);
  ok = ok && t < 1.0;
  return {ok, detail + "runtime " + num(t, "%.3f") + " s"};
}

Outcome criterion2(const Context&) {
  struct Figure {
    double baseline, ours, published;
  };
  const Figure figures[] = {{28.0, 14.1, 49.6}, {28.0, 12.4, 55.7}, {42.5, 8.3, 80.4}, {25.5, 8.3, 67.4}};
  bool ok = true;
  std::string detail;
  for (const auto& q : figures) {
    const double r = evaluation::relative_reduction(q.baseline, q.ours);
    ok = ok && within_tenth(r, q.published);
    detail += format_one_decimal(q.baseline) + "->" + format_one_decimal(q.ours) + " " +
              format_one_decimal(r) + "% (published " + format_one_decimal(q.published) + "%); ";
  }
  return {ok, detail};
}

Outcome criterion3(const Context&) {
  Rng rng = make_rng(2026, {tag("acceptance-snr")});
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> len(200, 8000), snr_pick(0, 4);
  std::uniform_real_distribution<double> scale(1e-3, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    signal::Waveform s, n;
    s.samples.resize(len(rng));
    n.samples.resize(len(rng));
    const double ss = scale(rng), ns = scale(rng);
    for (auto& x : s.samples) x = ss * g(rng);
    for (auto& x : n.samples) x = ns * g(rng);
    const double snr = evaluation::kSnrGrid[snr_pick(rng)];
    auto m = signal::mix_components(s, n, snr, static_cast<uint64_t>(trial));
    double ps = 0.0, pn = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
      ps += s.samples[i] * s.samples[i];
      pn += m.added.samples[i] * m.added.samples[i];
    }
    worst = std::max(worst, std::abs(10.0 * std::log10(ps / pn) - snr));
  }
  return {worst <= 1e-6, "1000 triples, max |measured - target| " + num(worst, "%.3g") + " dB"};
}

Outcome criterion4(const Context&) {
  auto t0 = std::chrono::steady_clock::now();
  auto r = model::gradient_check(model::preset("toy"), 7, 200);
  const double t = seconds_since(t0);
  const bool ok = r.checked >= 200 && r.failed == 0 && r.max_rel_error <= 1e-4 &&
                  r.unmasked_grad_max == 0.0 && t < 300.0;
  return {ok, std::to_string(r.checked) + " coords, max rel error " + num(r.max_rel_error, "%.3g") +
                  ", unmasked logit grad max " + num(r.unmasked_grad_max, "%.3g") + ", runtime " +
                  num(t, "%.1f") + " s" + (r.failed ? ", worst " + r.worst : "")};
}

// Minimum over every alignment path, enumerated depth first. A branch is cut
// only when even a perfect remainder could not beat the best complete path.
void align_search(const std::vector<int>& a, size_t i, const std::vector<int>& b, size_t j,
                  size_t cost, size_t& best) {
  const size_t ra = a.size() - i, rb = b.size() - j;
  if (cost + (ra > rb ? ra - rb : rb - ra) >= best) return;
  if (ra == 0 && rb == 0) {
    best = cost;
    return;
  }
  if (ra > 0 && rb > 0) align_search(a, i + 1, b, j + 1, cost + (a[i] == b[j] ? 0 : 1), best);
  if (ra > 0) align_search(a, i + 1, b, j, cost + 1, best);
  if (rb > 0) align_search(a, i, b, j + 1, cost + 1, best);
}

size_t alignment_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  size_t best = std::max(a.size(), b.size()) + 1;
  align_search(a, 0, b, 0, 0, best);
  return best;
}

double partition_objective(const std::vector<std::array<double, 2>>& pts,
                           const std::vector<int>& label, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    double mx = 0.0, my = 0.0;
    int n = 0;
    for (size_t i = 0; i < pts.size(); ++i)
      if (label[i] == c) {
        mx += pts[i][0];
        my += pts[i][1];
        ++n;
      }
    if (n == 0) continue;
    mx /= n;
    my /= n;
    for (size_t i = 0; i < pts.size(); ++i)
      if (label[i] == c)
        total += (pts[i][0] - mx) * (pts[i][0] - mx) + (pts[i][1] - my) * (pts[i][1] - my);
  }
  return total / static_cast<double>(pts.size());
}

double brute_force_optimum(const std::vector<std::array<double, 2>>& pts, int k) {
  const size_t n = pts.size();
  std::vector<int> label(n, 0);
  double best = INFINITY;
  while (true) {
    std::vector<bool> used(k, false);
    for (int l : label) used[l] = true;
    if (std::all_of(used.begin(), used.end(), [](bool u) { return u; }))
      best = std::min(best, partition_objective(pts, label, k));
    size_t p = 0;
    while (p < n && ++label[p] == k) label[p++] = 0;
    if (p == n) break;
  }
  return best;
}

Outcome criterion5(const Context&) {
  // All sequences of length 0..6 over a 3-word alphabet.
  std::vector<std::vector<int>> seqs;
  for (int len = 0; len <= 6; ++len) {
    int count = 1;
    for (int i = 0; i < len; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      std::vector<int> s(len);
      for (int i = 0, c = code; i < len; ++i, c /= 3) s[i] = c % 3;
      seqs.push_back(std::move(s));
    }
  }
  const std::string words[] = {"alpha", "beta", "gamma"};
  auto as_words = [&](const std::vector<int>& s) {
    std::vector<std::string> w;
    for (int x : s) w.push_back(words[x]);
    return w;
  };
  size_t pairs = 0, wer_bad = 0;
  for (const auto& ref : seqs) {
    if (ref.empty()) continue;
    const auto rw = as_words(ref);
    for (const auto& hyp : seqs) {
      auto c = evaluation::wer(rw, as_words(hyp));
      ++pairs;
      const long ins_minus_del = static_cast<long>(c.insertions) - static_cast<long>(c.deletions);
      if (c.errors() != alignment_oracle(ref, hyp) || c.ref_words != ref.size() ||
          ins_minus_del != static_cast<long>(hyp.size()) - static_cast<long>(ref.size()))
        ++wer_bad;
    }
  }

  // {0, 1, 10, 11} with k = 2.
  Mat line(4, 1);
  line << 0.0, 1.0, 10.0, 11.0;
  auto fit = clustering::kmeans_fit(line, 2, 1);
  auto a = clustering::assign(fit.codebook, line);
  const bool line_ok = a[0] == a[1] && a[2] == a[3] && a[0] != a[2] &&
                       std::abs(fit.objective - 0.25) < 1e-12;

  Rng rng = make_rng(2026, {tag("acceptance-kmeans")});
  std::uniform_int_distribution<int> n_pick(3, 8), k_pick(1, 3), coord(0, 15);
  int km_bad = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = n_pick(rng);
    const int k = std::min(k_pick(rng), n);
    std::vector<std::array<double, 2>> pts;
    while (static_cast<int>(pts.size()) < n) {
      std::array<double, 2> p{static_cast<double>(coord(rng)), static_cast<double>(coord(rng))};
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
    Mat m(n, 2);
    for (int i = 0; i < n; ++i) m.row(i) << pts[i][0], pts[i][1];
    auto r = clustering::kmeans_fit(m, k, static_cast<uint64_t>(inst), {100, 1e-9, 64});
    auto lab = clustering::assign(r.codebook, m);
    const double optimum = brute_force_optimum(pts, k);
    const double got = partition_objective(pts, lab, k);
    if (std::abs(got - optimum) > 1e-9 * std::max(1.0, optimum)) ++km_bad;
  }
  return {wer_bad == 0 && line_ok && km_bad == 0,
          std::to_string(pairs) + " WER pairs, " + std::to_string(wer_bad) +
              " mismatches; {0,1,10,11} " + (line_ok ? "split" : "wrong") + "; 50 k-means instances, " +
              std::to_string(km_bad) + " off the brute-force optimum"};
}

Outcome criterion6(const Context& ctx) {
  const fs::path dir = fs::path(ctx.work) / "invariance-corpus";
  corpus::CorpusSpec cs;
  cs.n_speakers = 12;
  cs.utterances_per_speaker = 8;
  cs.min_len_s = 1.0;
  cs.max_len_s = 2.5;
  cs.seed = 31;
  corpus::NoiseCorpusSpec ns;
  ns.seconds_per_hour = 1.0;
  ns.clip_len_s = 2.0;
  ns.speakers_per_pool = 30;
  ns.seed = 37;
  if (!fs::exists(dir / "noise.tsv")) {
    fs::remove_all(dir);
    corpus::gen_corpus(cs, dir.string());
    corpus::gen_noise_corpus(cs, ns, dir.string());
  }
  auto ds = corpus::load_split(dir.string(), "pretrain");
  auto bank = signal::NoiseBank::load((dir / "noise.tsv").string());
  training::PretrainConfig on, off;
  on.batch_frames = off.batch_frames = 400;
  on.pretrain_noise = true;
  off.pretrain_noise = false;
  auto cb = clustering::fit_mfcc_codebook(ds, 10, 3, {30, 1e-6, 1});
  auto labels = clustering::label_mfcc(cb, ds);
  size_t examples = 0, noised = 0, differing = 0;
  for (long step = 1; step <= 100; ++step) {
    auto a = training::build_pretrain_batch(on, ds, labels, &bank, 77, step);
    auto b = training::build_pretrain_batch(off, ds, labels, nullptr, 77, step);
    if (a.examples.size() != b.examples.size()) return {false, "batch sizes differ at step " + std::to_string(step)};
    for (size_t i = 0; i < a.examples.size(); ++i) {
      ++examples;
      if (a.noise[i].applied) ++noised;
      if (a.examples[i].targets != b.examples[i].targets ||
          a.examples[i].mask.masked != b.examples[i].mask.masked)
        ++differing;
    }
  }
  return {differing == 0 && noised > 0,
          "100 batches, " + std::to_string(examples) + " examples, " + std::to_string(noised) +
              " with noise, " + std::to_string(differing) + " with differing targets"};
}

runner::Sinks quiet_sinks() {
  return {[](const std::string&) {}, [](const std::string& s) { std::cerr << s << "\n"; }};
}

training::ExperimentFile load_thresholds(const fs::path& exp_dir) {
  auto th = training::ExperimentFile::load((exp_dir / "toy_thresholds.cfg").string());
  th.check_sections({"thresholds"});
  th.check_keys("thresholds", {"finetune", "av_speech0_min_rel", "pt_min_rel", "max_inversions",
                               "max_inversion_points", "masked_accuracy_min_chance_ratio"});
  return th;
}

Outcome criterion7(const Context& ctx) {
  const fs::path exp_dir = fs::path(ctx.fixtures) / "experiments";
  auto th = load_thresholds(exp_dir);
  const std::string ft = th.get_string("thresholds", "finetune", "mid");
  const double av_gain = th.get_double("thresholds", "av_speech0_min_rel", 30.0);
  const double pt_gain = th.get_double("thresholds", "pt_min_rel", 40.0);
  const int max_inv = th.get_int("thresholds", "max_inversions", 1);
  const double max_inv_pts = th.get_double("thresholds", "max_inversion_points", 2.0);

  runner::Options opt;
  opt.command = "experiment";
  opt.config = (exp_dir / "toy.cfg").string();
  opt.out = (fs::path(ctx.work) / "toy").string();
  auto t0 = std::chrono::steady_clock::now();
  auto res = runner::run_experiment(runner::load_plan(opt), opt.out, true, quiet_sinks());
  const double t = seconds_since(t0);
  const std::string model = res.grids.front().meta.model;
  auto grid = [&](const std::string& pt, const std::string& mode) -> const evaluation::EvalGrid& {
    return find_grid(res.grids, {model, pt, ft, mode});
  };
  std::string detail;
  bool ok = true;

  // (a) audio-visual beats audio-only under speech noise at 0 dB.
  const double a_wer = *grid("Noisy", "A").get("speech", 0.0);
  const double av_wer = *grid("Noisy", "AV").get("speech", 0.0);
  const double a_rel = a_wer > 0.0 ? evaluation::relative_reduction(a_wer, av_wer) : 0.0;
  const bool a_ok = a_rel >= av_gain;
  detail += "(a) speech@0dB A " + format_one_decimal(a_wer) + " AV " + format_one_decimal(av_wer) +
            " rel " + format_one_decimal(a_rel) + "% " + (a_ok ? "ok" : "FAIL") + "; ";

  // (b) PT ordering on N-WER.
  const double n_none = evaluation::aggregate(grid("None", "AV")).n_wer;
  const double n_clean = evaluation::aggregate(grid("Clean", "AV")).n_wer;
  const double n_noisy = evaluation::aggregate(grid("Noisy", "AV")).n_wer;
  const double r_clean = evaluation::relative_reduction(n_none, n_clean);
  const double r_noisy = evaluation::relative_reduction(n_none, n_noisy);
  const bool b_ok = n_noisy <= n_clean && r_clean >= pt_gain && r_noisy >= pt_gain;
  detail += "(b) N-WER None " + format_one_decimal(n_none) + " Clean " + format_one_decimal(n_clean) +
            " Noisy " + format_one_decimal(n_noisy) + " (" + format_one_decimal(r_clean) + "%, " +
            format_one_decimal(r_noisy) + "%) " + (b_ok ? "ok" : "FAIL") + "; ";

  // (c) WER non-increasing in SNR per grid and noise type.
  int worst_inv = 0;
  double worst_pts = 0.0;
  for (const auto& g : res.grids) {
    int inv = 0;
    for (const auto& [type, row] : g.cells) {
      double prev = INFINITY;
      for (const auto& [snr, w] : row) {
        if (w > prev) {
          ++inv;
          worst_pts = std::max(worst_pts, w - prev);
        }
        prev = w;
      }
    }
    worst_inv = std::max(worst_inv, inv);
  }
  const bool c_ok = worst_inv <= max_inv && worst_pts <= max_inv_pts;
  detail += "(c) max inversions per grid " + std::to_string(worst_inv) + ", largest " +
            format_one_decimal(worst_pts) + " pts " + (c_ok ? "ok" : "FAIL") + "; ";
  ok = a_ok && b_ok && c_ok;
  return {ok, detail + "runtime " + num(t, "%.0f") + " s"};
}

// Properties of the pretraining stage of the toy run: refined targets are
// purer than MFCC targets, and held-out masked prediction beats chance.
Outcome toy_pretraining(const Context& ctx) {
  const fs::path exp_dir = fs::path(ctx.fixtures) / "experiments";
  auto th = load_thresholds(exp_dir);
  const double min_ratio = th.get_double("thresholds", "masked_accuracy_min_chance_ratio", 3.0);
  runner::Options opt;
  opt.command = "experiment";
  opt.config = (exp_dir / "toy.cfg").string();
  opt.out = (fs::path(ctx.work) / "toy").string();
  const runner::Plan plan = runner::load_plan(opt);
  const fs::path out = opt.out;
  runner::run_experiment(plan, out.string(), false, quiet_sinks());

  auto val = corpus::load_split(plan.data_dir, "validation");
  const auto symbols = corpus::read_symbols((fs::path(plan.data_dir) / "symbols.tsv").string());
  const int last = plan.pretrain.iterations;
  bool ok = true;
  std::string detail;
  int runs = 0;
  for (const auto& e : fs::directory_iterator(out / "cache")) {
    const std::string name = e.path().filename().string();
    if (name.rfind("pretrain-", 0) != 0) continue;
    ++runs;
    const fs::path d = e.path();
    const std::string noise =
        read_text_file((d / "key.txt").string()).find("pretrain_noise=1") != std::string::npos ? "noisy" : "clean";
    const double p1 = clustering::purity(clustering::read_labels((d / "iter1_labels.tsv").string()), symbols);
    const double pl = clustering::purity(
        clustering::read_labels((d / ("iter" + std::to_string(last) + "_labels.tsv")).string()), symbols);

    // Held-out targets come from the same codebook and feature source as
    // the last iteration's training targets.
    const auto final_ck = model::load_checkpoint((d / ("iter" + std::to_string(last) + ".avck")).string());
    const auto cb = clustering::read_codebook((d / ("iter" + std::to_string(last) + "_codebook.kmc")).string());
    clustering::LabelMap targets;
    if (last == 1) {
      targets = clustering::label_mfcc(cb, val);
    } else {
      const auto prev = model::load_checkpoint((d / ("iter" + std::to_string(last - 1) + ".avck")).string());
      targets = clustering::label_encoder(cb, prev, plan.pretrain.layer_for(prev.arch), val);
    }
    size_t hits = 0, total = 0;
    for (size_t i = 0; i < val.items.size(); ++i) {
      const auto& ex = val.items[i];
      const auto mask = model::sample_mask(static_cast<int>(ex.clean_audio.rows()), plan.pretrain.mask_start_prob,
                                           plan.pretrain.mask_span, derive_seed(5, {i}));
      const auto tr = model::encode(final_ck.params, final_ck.arch, ex.clean_audio, ex.video, &mask,
                                    model::ModalityMode::Both);
      const auto& tgt = targets.at(ex.id);
      for (Eigen::Index t = 0; t < tr.logits.rows(); ++t) {
        if (!mask.masked[static_cast<size_t>(t)]) continue;
        Eigen::Index arg;
        tr.logits.row(t).maxCoeff(&arg);
        hits += static_cast<int>(arg) == tgt[static_cast<size_t>(t)];
        ++total;
      }
    }
    const double acc = total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
    const double ratio = acc * cb.k();
    const bool run_ok = pl > p1 && ratio >= min_ratio;
    ok = ok && run_ok;
    detail += noise + ": purity iter1 " + num(p1, "%.3f") + " iter" + std::to_string(last) + " " +
              num(pl, "%.3f") + ", held-out masked accuracy " + num(acc, "%.3f") + " (" +
              num(ratio, "%.1f") + "x chance); ";
  }
  return {ok && runs > 0, detail};
}

std::map<std::string, std::string> tree_digests(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      auto bytes = read_file_bytes(e.path().string());
      out[fs::relative(e.path(), root).string()] =
          sha256_hex({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
    }
  return out;
}

Outcome criterion8(const Context& ctx) {
  runner::Options opt;
  opt.command = "experiment";
  opt.config = (fs::path(ctx.fixtures) / "experiments" / "micro.cfg").string();
  auto plan = runner::load_plan(opt);
  std::vector<std::map<std::string, std::string>> digests;
  size_t grids = 0;
  for (const char* name : {"determinism-a", "determinism-b"}) {
    const fs::path out = fs::path(ctx.work) / name;
    fs::remove_all(out);
    plan.data_dir = (out / "data").string();
    auto res = runner::run_experiment(plan, out.string(), true, quiet_sinks());
    grids = res.grids.size();
    digests.push_back(tree_digests(out));
  }
  size_t checkpoints = 0, reports = 0, differing = 0;
  for (const auto& [path, digest] : digests[0]) {
    if (path.ends_with(".avck")) ++checkpoints;
    if (path.rfind("report", 0) == 0) ++reports;
    auto it = digests[1].find(path);
    if (it == digests[1].end() || it->second != digest) ++differing;
  }
  const bool ok = grids == 6 && digests[0].size() == digests[1].size() && differing == 0 &&
                  checkpoints > 0 && reports > 0;
  return {ok, std::to_string(grids) + " setups; " + std::to_string(digests[0].size()) + " files (" +
                  std::to_string(checkpoints) + " checkpoints, " + std::to_string(reports) +
                  " reports), " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avlab acceptance criteria"};
  int only = 0;
  bool pretraining = false;
  Context ctx{AVLAB_FIXTURES_DIR, "acceptance-work"};
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_option("--fixtures", ctx.fixtures, "fixtures directory");
  app.add_option("--work", ctx.work, "scratch and cache directory");
  app.add_flag("--toy-pretraining", pretraining, "check the pretraining stage of the toy run");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(ctx.work);
  if (pretraining) {
    Outcome o;
    try {
      o = toy_pretraining(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "toy pretraining: " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    return o.passed ? 0 : 1;
  }

  const std::vector<std::function<Outcome(const Context&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8};
  int failures = 0;
  for (int i = 1; i <= 8; ++i) {
    if (only != 0 && only != i) continue;
    Outcome o;
    try {
      o = criteria[i - 1](ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::cout << "criterion " << i << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
