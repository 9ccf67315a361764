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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/model/checkpoint.hpp"
#include "avlab/model/network.hpp"
#include "avlab/signal/noise.hpp"

namespace avlab::evaluation {

struct WerCount {
  size_t substitutions = 0;
  size_t insertions = 0;
  size_t deletions = 0;
  size_t ref_words = 0;

  size_t errors() const { return substitutions + insertions + deletions; }
  double wer() const;
  WerCount& operator+=(const WerCount& o);
};

// Minimum edit alignment; when backtracing, substitution (or match) is
// preferred over insertion, and insertion over deletion.
WerCount wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);
WerCount wer_text(const std::string& ref, const std::string& hyp);

inline const std::vector<double> kSnrGrid = {-10.0, -5.0, 0.0, 5.0, 10.0};
inline const std::vector<std::string> kNoiseTypes = {"babble", "speech", "music", "natural"};

struct GridMeta {
  std::string model = "toy";
  std::string pt = "None";
  std::string ft = "low";
  std::string mode = "AV";

  bool operator<(const GridMeta& o) const;
  bool operator==(const GridMeta& o) const = default;
};

struct EvalGrid {
  GridMeta meta;
  std::map<std::string, std::map<double, double>> cells;  // type -> snr -> WER %
  std::optional<double> clean;

  void set(const std::string& type, double snr, double value) { cells[type][snr] = value; }
  std::optional<double> get(const std::string& type, double snr) const;
};

struct Summary {
  std::map<std::string, double> per_type;  // mean over the five SNRs
  double n_wer = 0.0;                      // mean over 4 types x 5 SNRs
  double c_wer = 0.0;
};

// Unweighted means over the standard 4 x 5 grid plus the clean cell.
Summary aggregate(const EvalGrid& grid);
// Mean of one type's cells over the SNR grid (any type name).
double type_average(const EvalGrid& grid, const std::string& type);

double relative_reduction(double baseline, double ours);

// Groups CSV rows (model,pt,ft,mode,noise_type,snr_db,wer_percent) into
// grids in first-appearance order. '#' lines are comments; a
// `# corpus_hash=<h>` comment is returned through corpus_hash.
std::vector<EvalGrid> parse_grid_csv(const std::string& text, const std::string& origin,
                                     std::string* corpus_hash = nullptr);
std::vector<EvalGrid> read_grid_csv(const std::string& path, std::string* corpus_hash = nullptr);

enum class ReportFormat { Text, Csv };

// Text: one block per grid with SNR rows and B/S/M/N columns, then the
// clean row. CSV: 21 rows per grid.
std::string render_report(const std::vector<EvalGrid>& grids, ReportFormat format,
                          const std::string& corpus_hash = "");

// Audio-only / audio-visual x C-WER / N-WER summary, one row per
// (model, ft, pt).
std::string render_summary(const std::vector<EvalGrid>& grids);

// Bar chart of per-type averages grouped by noise type, one bar per grid.
std::string render_svg(const std::vector<EvalGrid>& grids);

struct EvalConfig {
  std::vector<double> snrs = kSnrGrid;
  std::vector<std::string> types = kNoiseTypes;
  uint64_t seed = 0;
  int max_len = 200;
  size_t max_utterances = 0;  // 0 = all

  std::string canonical() const;
};

// Maps (utterance, encoder audio input) to a hypothesis transcript.
using Recognizer = std::function<std::string(const corpus::Example&, const Mat& audio)>;

Recognizer greedy_recognizer(const model::Checkpoint& ckpt, model::ModalityMode mode, int max_len);

// Mixes each test utterance with a seeded test-partition clip per
// (type, snr), decodes, and pools counts over the corpus.
EvalGrid eval_grid(const Recognizer& recognize, const corpus::Dataset& test,
                   const signal::NoiseBank& bank, const EvalConfig& cfg, const GridMeta& meta);

}  // namespace avlab::evaluation
