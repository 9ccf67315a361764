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

#include <map>
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/corpus/corpus.hpp"
#include "avlab/signal/waveform.hpp"

namespace avlab::corpus {

// One manifest entry with its clean encoder inputs resident in memory.
// Audio is reloaded from wav_path when a noisy variant is needed.
struct Example {
  std::string id;
  std::string speaker;
  std::string transcript;
  std::string wav_path;  // absolute or relative to the working directory
  Mat clean_audio;       // normalized stacked MFCC, [T x 52]
  Mat video;             // [T x 8]
  std::vector<int> symbols;  // empty unless symbols.tsv was loaded
};

struct Dataset {
  std::string corpus_dir;
  std::string split;
  std::vector<Example> items;  // sorted by id

  size_t total_frames() const;
};

// Loads <corpus_dir>/<split>.tsv; features are computed in parallel and
// joined in id order.
Dataset load_split(const std::string& corpus_dir, const std::string& split,
                   bool with_symbols = false);

std::map<std::string, std::vector<int>> read_symbols(const std::string& path);

signal::Waveform load_audio(const Example& ex);

// Encoder audio input of an arbitrary waveform, checked against the video
// frame count.
Mat audio_features_for(const signal::Waveform& w, Eigen::Index video_frames,
                       const std::string& what);

// Digest of corpus.cfg and, when present, noise.cfg.
std::string corpus_hash(const std::string& corpus_dir);

}  // namespace avlab::corpus
