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

#include "avlab/corpus/dataset.hpp"

#include <algorithm>
#include <filesystem>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/text.hpp"
#include "avlab/features/features.hpp"

namespace fs = std::filesystem;

namespace avlab::corpus {

size_t Dataset::total_frames() const {
  size_t n = 0;
  for (const auto& e : items) n += static_cast<size_t>(e.video.rows());
  return n;
}

std::map<std::string, std::vector<int>> read_symbols(const std::string& path) {
  std::map<std::string, std::vector<int>> out;
  const std::string text = read_text_file(path);
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) fail(ErrorKind::Format, path + ": expected id<TAB>symbols");
    std::vector<int> syms;
    for (const auto& tok : split_whitespace(cols[1])) syms.push_back(std::stoi(tok));
    out.emplace(cols[0], std::move(syms));
  }
  return out;
}

signal::Waveform load_audio(const Example& ex) { return signal::read_wav(ex.wav_path); }

Mat audio_features_for(const signal::Waveform& w, Eigen::Index video_frames,
                       const std::string& what) {
  Mat a = features::audio_input_features(w).data;
  if (a.rows() != video_frames)
    fail(ErrorKind::ShapeMismatch, what + ": audio frames " + std::to_string(a.rows()) +
                                       " != video frames " + std::to_string(video_frames));
  return a;
}

Dataset load_split(const std::string& corpus_dir, const std::string& split_name,
                   bool with_symbols) {
  const fs::path root(corpus_dir);
  std::vector<UtteranceEntry> entries =
      read_utterance_manifest((root / (split_name + ".tsv")).string());
  if (entries.empty()) fail(ErrorKind::Config, "manifest " + split_name + " is empty");
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  Dataset ds;
  ds.corpus_dir = corpus_dir;
  ds.split = split_name;
  ds.items.resize(entries.size());
  parallel_for(entries.size(), [&](size_t i) {
    const UtteranceEntry& e = entries[i];
    Example& ex = ds.items[i];
    ex.id = e.id;
    ex.speaker = e.speaker;
    ex.transcript = e.transcript;
    ex.wav_path = (root / e.wav_path).string();
    ex.video = features::read_avf1((root / e.video_path).string()).data;
    ex.clean_audio = audio_features_for(signal::read_wav(ex.wav_path), ex.video.rows(), e.id);
  });

  if (with_symbols) {
    auto syms = read_symbols((root / "symbols.tsv").string());
    for (auto& ex : ds.items) {
      auto it = syms.find(ex.id);
      if (it == syms.end()) fail(ErrorKind::Format, "symbols.tsv lacks " + ex.id);
      if (static_cast<Eigen::Index>(it->second.size()) != ex.video.rows())
        fail(ErrorKind::ShapeMismatch, ex.id + ": symbol count != video frames");
      ex.symbols = it->second;
    }
  }
  return ds;
}

std::string corpus_hash(const std::string& corpus_dir) {
  const fs::path root(corpus_dir);
  std::string buf = read_text_file((root / "corpus.cfg").string());
  if (fs::exists(root / "noise.cfg")) buf += "\n--\n" + read_text_file((root / "noise.cfg").string());
  return short_hash(buf);
}

}  // namespace avlab::corpus
