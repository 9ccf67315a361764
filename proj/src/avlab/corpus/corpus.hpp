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
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/signal/noise.hpp"
#include "avlab/signal/waveform.hpp"

namespace avlab::corpus {

inline constexpr double kVideoRateHz = 25.0;
inline constexpr int kSamplesPerVideoFrame = 640;  // 16000 / 25
inline constexpr int kVideoDim = 8;
inline constexpr double kVideoJitter = 0.05;
inline constexpr double kTransitionFloor = 0.1;

// Markov chain over hidden symbols that drives both modalities. The acoustic
// and visual realization of each symbol is derived from inventory_seed.
struct SymbolProcess {
  int n_symbols = 12;
  Mat transition;        // [n x n], row-stochastic
  int min_duration = 3;  // video frames per symbol segment
  int max_duration = 6;
  int n_visemes = 4;     // symbols sharing a viseme look alike
  uint64_t inventory_seed = 0;

  // Each symbol moves to two preferred successors (2:1) with 90% of the mass
  // and to every other symbol with the remaining 10%; no self-transitions
  // except in a one-symbol process. Successors derive from inventory_seed.
  static SymbolProcess make_default(int n_symbols, uint64_t inventory_seed);
  void validate() const;
};

struct SymbolSegment {
  int symbol = 0;
  int frames = 0;
};

struct AVUtterance {
  std::string id;
  std::string speaker;
  signal::Waveform audio;
  Mat video;  // [T_v x 8] at 25 Hz
  std::string transcript;
  std::vector<int> symbols;  // one per video frame
  std::vector<SymbolSegment> segments;
};

char symbol_char(int symbol);
// One word per segment, each word the symbol's character.
std::string render_transcript(const std::vector<SymbolSegment>& segments);

AVUtterance gen_utterance(const SymbolProcess& proc, const std::string& speaker, double len_s,
                          uint64_t seed);

struct CorpusSpec {
  int n_speakers = 40;
  int utterances_per_speaker = 45;
  double min_len_s = 2.0;
  double max_len_s = 8.0;
  // Speaker fractions; unlabeled speakers appear only in the pretraining set.
  double frac_finetune = 0.1;
  double frac_validation = 0.1;
  double frac_test = 0.1;
  double label_fraction_low = 0.069;
  double label_fraction_mid = 1.0;
  int n_symbols = 12;
  int min_symbol_frames = 3;
  int max_symbol_frames = 6;
  uint64_t seed = 1;

  void validate() const;
  SymbolProcess process() const;
  std::string canonical() const;
};

struct UtteranceEntry {
  std::string id;
  std::string speaker;
  std::string wav_path;
  std::string video_path;
  std::string transcript;
  double duration_s = 0.0;  // not serialized; derived at load
};

struct Manifests {
  std::vector<UtteranceEntry> pretrain;
  std::vector<UtteranceEntry> finetune_low;
  std::vector<UtteranceEntry> finetune_mid;
  std::vector<UtteranceEntry> validation;
  std::vector<UtteranceEntry> test;
};

struct SpeakerPartition {
  std::vector<std::string> unlabeled, finetune, validation, test;
};

SpeakerPartition partition_speakers(const CorpusSpec& spec);

// Writes wav/, video/, the five manifests, and symbols.tsv under out_dir.
// Paths in manifests are relative to out_dir.
Manifests gen_corpus(const CorpusSpec& spec, const std::string& out_dir);

inline constexpr const char* kManifestNames[] = {"pretrain", "finetune_low", "finetune_mid",
                                                 "validation", "test"};

std::string format_utterance_manifest(const std::vector<UtteranceEntry>& entries);
std::vector<UtteranceEntry> read_utterance_manifest(const std::string& path);

// Per-category durations (seconds per reference hour) and clip sizes.
struct NoiseCorpusSpec {
  double seconds_per_hour = 10.0;
  double clip_len_s = 4.0;
  int speakers_per_pool = 40;
  uint64_t seed = 2;

  void validate() const;
  std::string canonical() const;
};

// Reference hours per (partition, category) in natural/music/babble/speech order.
double noise_hours(signal::Partition p, signal::NoiseCategory c);

struct NoiseCorpusResult {
  std::vector<signal::NoiseEntry> entries;
  // clip id -> source speakers, for speech and babble clips.
  std::vector<std::pair<std::string, std::vector<std::string>>> sources;
};

// Writes noise/<category>/<id>.wav, noise.tsv and noise_sources.tsv.
NoiseCorpusResult gen_noise_corpus(const CorpusSpec& corpus, const NoiseCorpusSpec& spec,
                                   const std::string& out_dir);

// Generators for the non-speech categories (unit-free amplitudes).
signal::Waveform gen_natural_noise(size_t n_samples, uint64_t seed);
signal::Waveform gen_music(size_t n_samples, uint64_t seed);

// Noise speakers are named per partition and never coincide with corpus
// speakers.
std::string noise_speaker_name(signal::Partition p, int index);

}  // namespace avlab::corpus
