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
#include <map>
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/corpus/dataset.hpp"
#include "avlab/model/checkpoint.hpp"

namespace avlab::clustering {

struct Codebook {
  Mat centroids;               // [k x D]
  std::string source = "mfcc"; // "mfcc" or "hidden(layer=L,iteration=I)"
  uint64_t seed = 0;

  int k() const { return static_cast<int>(centroids.rows()); }
  Eigen::Index dim() const { return centroids.cols(); }
};

struct KMeansOptions {
  int max_iters = 100;
  double tolerance = 1e-6;  // stop when no centroid moves farther than this
  int restarts = 8;         // best objective over independent k-means++ seeds
};

struct KMeansResult {
  Codebook codebook;
  double objective = 0.0;            // mean squared distance to the assigned centroid
  std::vector<double> history;       // objective after each assignment step (best restart)
  int iterations = 0;
};

KMeansResult kmeans_fit(const Mat& points, int k, uint64_t seed, const KMeansOptions& opt = {});

// Nearest centroid by squared Euclidean distance; ties go to the lowest id.
std::vector<int> assign(const Codebook& cb, const Mat& frames);

double mean_squared_distance(const Codebook& cb, const Mat& points);

using LabelMap = std::map<std::string, std::vector<int>>;

// Fraction of frames whose label's majority symbol equals their symbol.
double purity(const LabelMap& labels, const std::map<std::string, std::vector<int>>& symbols);

inline constexpr size_t kMaxFitFrames = 200000;

// Frames from utterances in the given (id-sorted) order; if more than
// max_frames, a seeded subset of frame indices is kept in original order.
Mat collect_frames(const std::vector<const Mat*>& sequences, size_t max_frames, uint64_t seed);

// Iteration-1 codebook on clean stacked MFCC.
Codebook fit_mfcc_codebook(const corpus::Dataset& ds, int k, uint64_t seed,
                           const KMeansOptions& opt = {});

// Encoder activations of clean, unmasked audio+video after block `layer`
// (0-based), one row per 25 Hz frame.
Mat encoder_features(const model::Checkpoint& ckpt, int layer, const Mat& audio, const Mat& video);

Codebook refit_from_encoder(const model::Checkpoint& ckpt, int layer, const corpus::Dataset& ds,
                            int k, uint64_t seed, int iteration, const KMeansOptions& opt = {});

// Labels for every utterance; features come from clean inputs only.
LabelMap label_mfcc(const Codebook& cb, const corpus::Dataset& ds);
LabelMap label_encoder(const Codebook& cb, const model::Checkpoint& ckpt, int layer,
                       const corpus::Dataset& ds);

std::string hidden_source(int layer, int iteration);

void write_codebook(const std::string& path, const Codebook& cb);
Codebook read_codebook(const std::string& path);
void write_labels(const std::string& path, const LabelMap& labels);
LabelMap read_labels(const std::string& path);

}  // namespace avlab::clustering
