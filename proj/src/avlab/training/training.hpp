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
#include <string>
#include <vector>

#include "avlab/clustering/clustering.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/model/checkpoint.hpp"
#include "avlab/model/network.hpp"
#include "avlab/signal/noise.hpp"
#include "avlab/training/experiment_file.hpp"
#include "avlab/training/optimizer.hpp"

namespace avlab::training {

using Progress = std::function<void(const std::string&)>;

struct PretrainConfig {
  int iterations = 2;
  int steps = 2000;  // per iteration
  int batch_frames = 1000;
  bool pretrain_noise = true;
  signal::NoisePolicy noise;
  double mask_start_prob = 0.08;
  int mask_span = 10;
  model::ModalityDropout dropout;
  AdamConfig adam;
  std::string preset = "toy";
  std::string small_preset = "toy-small";  // all iterations but the last; empty = preset
  int n_clusters = 20;
  int feature_layer = -1;                  // -1 = middle encoder block
  clustering::KMeansOptions kmeans;
  uint64_t seed = 0;

  void validate() const;
  std::string canonical() const;
  std::string preset_for(int iteration) const;  // 1-based
  int layer_for(const model::ArchConfig& arch) const;
};

enum class InputMode { AV, A };
const char* input_mode_name(InputMode m);
InputMode parse_input_mode(const std::string& s);

struct FinetuneConfig {
  std::string name = "low";
  std::string manifest = "finetune_low";
  int steps = 3000;
  int freeze_steps = -1;  // -1 = 25% of steps
  int batch_frames = 1000;
  signal::NoisePolicy noise;
  InputMode mode = InputMode::AV;
  AdamConfig adam;
  std::string preset = "toy";  // architecture when training from scratch
  uint64_t seed = 0;

  void validate() const;
  int effective_freeze_steps() const;
  std::string canonical() const;
};

PretrainConfig pretrain_config_from(const ExperimentFile& f, uint64_t base_seed);
FinetuneConfig finetune_config_from(const ExperimentFile& f, const std::string& name,
                                    uint64_t base_seed);

// Utterance indices for a step: a seeded permutation per epoch, consumed in
// order until the frame cap would be exceeded (at least one utterance).
std::vector<size_t> batch_indices(const corpus::Dataset& ds, int batch_frames, uint64_t seed,
                                  long step);

struct NoiseApplied {
  bool applied = false;
  std::string clip_id;
  double snr_db = 0.0;
};

// Encoder audio input for one training example: clean features unless the
// policy draws a noise clip, in which case the waveform is mixed and
// re-featurized. Video is never corrupted.
Mat training_audio(const corpus::Example& ex, const signal::NoiseBank* bank,
                   const signal::NoisePolicy& policy, uint64_t draw, NoiseApplied* info = nullptr);

struct PretrainBatch {
  std::vector<model::PretrainExample> examples;
  std::vector<std::string> ids;
  std::vector<NoiseApplied> noise;
};

// Step `step` of pretraining iteration seed `iter_seed`. Targets come from
// `labels` (clean features); `bank` may be null when noise is off.
PretrainBatch build_pretrain_batch(const PretrainConfig& cfg, const corpus::Dataset& ds,
                                   const clustering::LabelMap& labels,
                                   const signal::NoiseBank* bank, uint64_t iter_seed, long step);

struct IterationRecord {
  clustering::Codebook codebook;
  double purity = -1.0;  // when symbols are loaded
  std::vector<double> losses;
  std::vector<double> accuracies;
  model::Checkpoint checkpoint;
};

struct PretrainResult {
  std::vector<IterationRecord> iterations;
  const model::Checkpoint& final() const { return iterations.back().checkpoint; }
};

// out_dir, when non-empty, receives iterN.avck, codebook, labels and
// pretrain_log.tsv.
PretrainResult pretrain(const PretrainConfig& cfg, const corpus::Dataset& ds,
                        const signal::NoiseBank* bank, const std::string& out_dir,
                        const Progress& progress = {});

struct FinetuneResult {
  model::Checkpoint checkpoint;
  std::vector<double> losses;
  std::string encoder_digest_before, encoder_digest_after_freeze;
};

FinetuneResult finetune(const FinetuneConfig& cfg, const corpus::Dataset& labeled,
                        const signal::NoiseBank* bank, const model::Checkpoint* pretrained,
                        const std::string& out_dir, const Progress& progress = {});

}  // namespace avlab::training
