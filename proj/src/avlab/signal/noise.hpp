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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avlab/signal/waveform.hpp"

namespace avlab::signal {

enum class NoiseCategory { Natural, Music, Babble, Speech };
enum class Partition { Train, Validation, Test };

inline constexpr NoiseCategory kAllCategories[] = {
    NoiseCategory::Babble, NoiseCategory::Speech, NoiseCategory::Music, NoiseCategory::Natural};

const char* category_name(NoiseCategory c);
NoiseCategory parse_category(const std::string& s);
const char* partition_name(Partition p);
Partition parse_partition(const std::string& s);

struct NoiseClip {
  Waveform waveform;
  NoiseCategory category = NoiseCategory::Natural;
  std::string id;
  Partition partition = Partition::Train;
  // Source speakers for speech/babble clips; empty otherwise.
  std::vector<std::string> source_speakers;
};

struct NoisePolicy {
  double apply_probability = 0.25;
  double snr_db = 0.0;
  std::vector<NoiseCategory> categories = {NoiseCategory::Natural, NoiseCategory::Music,
                                           NoiseCategory::Babble, NoiseCategory::Speech};
  uint64_t seed = 0;
  // When set, SNR is drawn uniformly from [snr_min_db, snr_max_db] instead
  // of the fixed snr_db.
  bool sample_snr = false;
  double snr_min_db = -5.0;
  double snr_max_db = 5.0;

  void validate() const;
};

struct MixResult {
  Waveform mixed;
  Waveform added;  // g * fitted noise, the exact component added
  double gain = 0.0;
};

MixResult mix_components(const Waveform& signal, const Waveform& noise, double snr_db,
                         uint64_t seed);
Waveform mix_at_snr(const Waveform& signal, const NoiseClip& noise, double snr_db,
                    uint64_t seed);

inline constexpr size_t kBabbleClipCount = 30;

// Fits each clip to target_len, sums, and rescales the sum to unit power.
NoiseClip synth_babble(std::span<const Waveform> clips, size_t target_len, uint64_t seed);

// Noise manifest: one entry per clip, TSV columns
// id, path, category, partition, duration_s.
struct NoiseEntry {
  std::string id;
  std::string path;
  NoiseCategory category = NoiseCategory::Natural;
  Partition partition = Partition::Train;
  double duration_s = 0.0;
};

std::vector<NoiseEntry> read_noise_manifest(const std::string& path);
std::string format_noise_manifest(const std::vector<NoiseEntry>& entries);

// Clips loaded in memory alongside their manifest entries; paths in the
// manifest are resolved relative to the manifest's directory.
struct NoiseBank {
  std::vector<NoiseClip> clips;

  static NoiseBank load(const std::string& manifest_path);
  std::vector<const NoiseClip*> select(NoiseCategory c, Partition p) const;
};

struct NoiseDraw {
  const NoiseClip* clip = nullptr;
  double snr_db = 0.0;
};

// With probability policy.apply_probability (seeded by policy.seed and
// draw), picks a category uniformly from the policy, then a train clip
// uniformly within it.
std::optional<NoiseDraw> sample_training_noise(const NoiseBank& bank, const NoisePolicy& policy,
                                               uint64_t draw);

}  // namespace avlab::signal
