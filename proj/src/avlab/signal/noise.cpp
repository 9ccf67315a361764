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

#include "avlab/signal/noise.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"

namespace avlab::signal {

const char* category_name(NoiseCategory c) {
  switch (c) {
    case NoiseCategory::Natural: return "natural";
    case NoiseCategory::Music: return "music";
    case NoiseCategory::Babble: return "babble";
    case NoiseCategory::Speech: return "speech";
  }
  return "?";
}

NoiseCategory parse_category(const std::string& s) {
  if (s == "natural") return NoiseCategory::Natural;
  if (s == "music") return NoiseCategory::Music;
  if (s == "babble") return NoiseCategory::Babble;
  if (s == "speech") return NoiseCategory::Speech;
  fail(ErrorKind::Format, "unknown noise category '" + s + "'");
}

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Validation: return "validation";
    case Partition::Test: return "test";
  }
  return "?";
}

Partition parse_partition(const std::string& s) {
  if (s == "train") return Partition::Train;
  if (s == "validation") return Partition::Validation;
  if (s == "test") return Partition::Test;
  fail(ErrorKind::Format, "unknown partition '" + s + "'");
}

void NoisePolicy::validate() const {
  if (!(apply_probability >= 0.0 && apply_probability <= 1.0))
    fail(ErrorKind::Config, "noise apply probability must lie in [0, 1]");
  if (categories.empty()) fail(ErrorKind::Config, "noise policy needs at least one category");
  if (sample_snr && snr_min_db > snr_max_db)
    fail(ErrorKind::Config, "noise snr_min_db exceeds snr_max_db");
}

MixResult mix_components(const Waveform& signal, const Waveform& noise, double snr_db,
                         uint64_t seed) {
  Waveform fitted = fit_noise_length(noise, signal.size(), seed);
  MixResult r;
  r.gain = mixing_gain(signal, fitted, snr_db);
  r.added = std::move(fitted);
  for (double& s : r.added.samples) s *= r.gain;
  r.mixed = signal;
  for (size_t i = 0; i < signal.size(); ++i) r.mixed.samples[i] += r.added.samples[i];
  return r;
}

Waveform mix_at_snr(const Waveform& signal, const NoiseClip& noise, double snr_db,
                    uint64_t seed) {
  return mix_components(signal, noise.waveform, snr_db, seed).mixed;
}

NoiseClip synth_babble(std::span<const Waveform> clips, size_t target_len, uint64_t seed) {
  if (clips.size() != kBabbleClipCount)
    fail(ErrorKind::WrongClipCount,
         "babble needs exactly 30 clips, got " + std::to_string(clips.size()));
  NoiseClip out;
  out.category = NoiseCategory::Babble;
  out.waveform.sample_rate_hz = clips[0].sample_rate_hz;
  out.waveform.samples.assign(target_len, 0.0);
  for (size_t c = 0; c < clips.size(); ++c) {
    if (rms_power(clips[c]) <= 0.0)
      fail(ErrorKind::ZeroPowerNoise, "babble source clip " + std::to_string(c) + " is silent");
    Waveform fitted = fit_noise_length(clips[c], target_len, derive_seed(seed, {c}));
    for (size_t i = 0; i < target_len; ++i) out.waveform.samples[i] += fitted.samples[i];
  }
  double p = rms_power(out.waveform);
  if (p <= 0.0) fail(ErrorKind::ZeroPowerNoise, "babble sum is silent");
  double scale = 1.0 / std::sqrt(p);
  for (double& s : out.waveform.samples) s *= scale;
  return out;
}

std::vector<NoiseEntry> read_noise_manifest(const std::string& path) {
  std::vector<NoiseEntry> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 5)
      fail(ErrorKind::Format, path + ":" + std::to_string(lineno) + ": expected 5 columns");
    NoiseEntry e;
    e.id = cols[0];
    e.path = cols[1];
    e.category = parse_category(cols[2]);
    e.partition = parse_partition(cols[3]);
    e.duration_s = std::stod(cols[4]);
    out.push_back(std::move(e));
  }
  return out;
}

std::string format_noise_manifest(const std::vector<NoiseEntry>& entries) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& e : entries)
    out << e.id << '\t' << e.path << '\t' << category_name(e.category) << '\t'
        << partition_name(e.partition) << '\t' << e.duration_s << '\n';
  return out.str();
}

NoiseBank NoiseBank::load(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  NoiseBank bank;
  fs::path root = fs::path(manifest_path).parent_path();
  for (auto& e : read_noise_manifest(manifest_path)) {
    NoiseClip clip;
    fs::path p(e.path);
    clip.waveform = read_wav((p.is_absolute() ? p : root / p).string());
    clip.category = e.category;
    clip.partition = e.partition;
    clip.id = e.id;
    bank.clips.push_back(std::move(clip));
  }
  return bank;
}

std::vector<const NoiseClip*> NoiseBank::select(NoiseCategory c, Partition p) const {
  std::vector<const NoiseClip*> out;
  for (const auto& clip : clips)
    if (clip.category == c && clip.partition == p) out.push_back(&clip);
  return out;
}

std::optional<NoiseDraw> sample_training_noise(const NoiseBank& bank, const NoisePolicy& policy,
                                               uint64_t draw) {
  policy.validate();
  Rng rng = make_rng(policy.seed, {tag("train-noise"), draw});
  if (!(uniform01(rng) < policy.apply_probability)) return std::nullopt;
  NoiseCategory cat = policy.categories[uniform_index(rng, policy.categories.size())];
  auto pool = bank.select(cat, Partition::Train);
  if (pool.empty())
    fail(ErrorKind::EmptyCategory,
         std::string("no train clips for category ") + category_name(cat));
  NoiseDraw out;
  out.clip = pool[uniform_index(rng, pool.size())];
  out.snr_db = policy.sample_snr
                   ? policy.snr_min_db + (policy.snr_max_db - policy.snr_min_db) * uniform01(rng)
                   : policy.snr_db;
  return out;
}

}  // namespace avlab::signal
