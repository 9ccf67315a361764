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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

#include "avlab/clustering/clustering.hpp"
#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/evaluation/evaluation.hpp"
#include "avlab/model/gradcheck.hpp"
#include "avlab/runner/runner.hpp"
#include "avlab/signal/noise.hpp"

namespace fs = std::filesystem;

namespace avlab::runner {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CheckOutcome check_gradients() {
  auto r = model::gradient_check(model::preset("toy"), 7, 200);
  return {"gradcheck", r.failed == 0 && r.checked > 0,
          std::to_string(r.checked) + " coords, max rel " + num(r.max_rel_error) +
              (r.failed ? ", worst " + r.worst : "")};
}

CheckOutcome check_snr() {
  Rng rng = make_rng(11, {tag("verify-snr")});
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    signal::Waveform s, n;
    s.samples.resize(4000 + 100 * trial);
    n.samples.resize(3000);
    for (auto& x : s.samples) x = 0.3 * g(rng);
    for (auto& x : n.samples) x = 0.05 * (trial + 1) * g(rng);
    for (double snr : evaluation::kSnrGrid) {
      auto m = signal::mix_components(s, n, snr, derive_seed(3, {static_cast<uint64_t>(trial)}));
      double ps = 0.0, pn = 0.0;
      for (size_t i = 0; i < s.samples.size(); ++i) {
        ps += s.samples[i] * s.samples[i];
        pn += m.added.samples[i] * m.added.samples[i];
        worst = std::max(worst, std::abs(m.mixed.samples[i] - s.samples[i] - m.added.samples[i]));
      }
      worst = std::max(worst, std::abs(10.0 * std::log10(ps / pn) - snr));
    }
  }
  return {"snr-oracle", worst < 1e-6, "max deviation " + num(worst)};
}

// Edit distance by plain recursion over the three moves.
size_t edit_distance_slow(const std::vector<std::string>& a, size_t i,
                          const std::vector<std::string>& b, size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  size_t best = edit_distance_slow(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  best = std::min(best, edit_distance_slow(a, i + 1, b, j) + 1);
  best = std::min(best, edit_distance_slow(a, i, b, j + 1) + 1);
  return best;
}

CheckOutcome check_wer() {
  Rng rng = make_rng(5, {tag("verify-wer")});
  std::uniform_int_distribution<int> len(0, 6), word(0, 3);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  int bad = 0, cases = 0;
  for (int t = 0; t < 400; ++t) {
    std::vector<std::string> ref(len(rng) + 1), hyp(len(rng));
    for (auto& w : ref) w = vocab[word(rng)];
    for (auto& w : hyp) w = vocab[word(rng)];
    auto c = evaluation::wer(ref, hyp);
    ++cases;
    if (c.errors() != edit_distance_slow(ref, 0, hyp, 0) || c.ref_words != ref.size()) ++bad;
  }
  return {"wer-bruteforce", bad == 0, std::to_string(cases) + " cases, " + std::to_string(bad) + " mismatches"};
}

CheckOutcome check_kmeans() {
  // Two tight, well separated blobs: the fit must split them exactly and the
  // objective must never rise.
  Rng rng = make_rng(9, {tag("verify-kmeans")});
  std::normal_distribution<double> g(0.0, 0.1);
  Mat pts(200, 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < 3; ++j) pts(i, j) = g(rng) + (i < 100 ? -5.0 : 5.0);
  auto r = clustering::kmeans_fit(pts, 2, 1);
  auto a = clustering::assign(r.codebook, pts);
  bool split = true;
  for (int i = 0; i < 200; ++i) split = split && (a[i] == a[0]) == (i < 100);
  bool monotone = true;
  for (size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i] <= r.history[i - 1] + 1e-12;
  return {"kmeans", split && monotone,
          std::string(split ? "partition recovered" : "partition wrong") + (monotone ? "" : ", objective rose")};
}

CheckOutcome check_aggregation(const std::string& fixtures_dir) {
  const fs::path dir = fs::path(fixtures_dir) / "reference_grids";
  if (fixtures_dir.empty() || !fs::exists(dir / "summary.csv"))
    return {"aggregation", true, "skipped, no fixtures directory"};
  std::vector<evaluation::EvalGrid> grids;
  for (const char* f : {"large_grids.csv", "base_grids.csv"})
    for (auto& g : evaluation::read_grid_csv((dir / f).string())) grids.push_back(std::move(g));
  int rows = 0, bad = 0;
  double worst = 0.0;
  bool header = true;
  for (const auto& line : split(read_text_file((dir / "summary.csv").string()), '\n')) {
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto c = split(trim(line), ',');
    if (c.size() != 6) fail(ErrorKind::Format, "summary.csv: expected 6 columns");
    evaluation::GridMeta meta{c[0], c[1], c[2], c[3]};
    auto it = std::find_if(grids.begin(), grids.end(), [&](const auto& g) { return g.meta == meta; });
    ++rows;
    if (it == grids.end()) {
      ++bad;
      continue;
    }
    auto s = evaluation::aggregate(*it);
    const double dc = std::abs(round_tenths(s.c_wer) - round_tenths(std::stod(c[4]))) / 10.0;
    const double dn = std::abs(round_tenths(s.n_wer) - round_tenths(std::stod(c[5]))) / 10.0;
    worst = std::max({worst, dc, dn});
    if (dc > 0.1 + 1e-9 || dn > 0.1 + 1e-9) ++bad;
  }
  return {"aggregation", bad == 0 && rows > 0,
          std::to_string(rows) + " summary rows, max deviation " + num(worst)};
}

}  // namespace

std::vector<CheckOutcome> verify_suite(const std::string& fixtures_dir) {
  std::vector<std::function<CheckOutcome()>> checks = {
      check_gradients, check_snr, check_wer, check_kmeans,
      [&] { return check_aggregation(fixtures_dir); }};
  std::vector<CheckOutcome> out;
  for (auto& c : checks) out.push_back(c());
  return out;
}

}  // namespace avlab::runner
