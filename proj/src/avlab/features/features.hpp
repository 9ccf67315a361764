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

#include <span>
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/signal/waveform.hpp"

namespace avlab::features {

enum class FeatureKind : uint8_t { LogMel = 0, Mfcc = 1, StackedMfcc = 2, Hidden = 3 };

const char* kind_name(FeatureKind k);

struct FeatureSequence {
  Mat data;  // [T x D]
  double rate_hz = 100.0;
  FeatureKind kind = FeatureKind::LogMel;

  Eigen::Index frames() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

inline constexpr int kWindowSamples = 400;  // 25 ms at 16 kHz
inline constexpr int kHopSamples = 160;     // 10 ms
inline constexpr int kFftSize = 512;
inline constexpr int kMelFilters = 26;
inline constexpr int kMfccCoefficients = 13;
inline constexpr int kStackFactor = 4;
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kVarianceFloor = 1e-8;

// Number of full analysis windows in n samples (0 if shorter than a window).
size_t frame_count(size_t n_samples);

FeatureSequence logmel(const signal::Waveform& w);
FeatureSequence mfcc(const FeatureSequence& lm);
FeatureSequence stack(const FeatureSequence& f, int factor = kStackFactor);
FeatureSequence normalize(const FeatureSequence& f);

// The encoder's audio input: normalize(stack(mfcc(logmel(w)))).
FeatureSequence audio_input_features(const signal::Waveform& w);

// Orthonormal DCT-II of x keeping the first n_keep coefficients, and its
// inverse (DCT-III) for a full-length coefficient vector.
std::vector<double> dct_ortho(std::span<const double> x, size_t n_keep);
std::vector<double> idct_ortho(std::span<const double> c);

// Binary AVF1 file. Plain matrices (video features) carry no kind/rate;
// feature files append a kind byte and an f32 rate to the header.
void write_avf1(const std::string& path, const Mat& m);
void write_feature_file(const std::string& path, const FeatureSequence& f);
std::vector<unsigned char> encode_avf1(const Mat& m);
struct Avf1Contents {
  Mat data;
  bool has_kind = false;
  FeatureKind kind = FeatureKind::Hidden;
  double rate_hz = 0.0;
};
Avf1Contents read_avf1(const std::string& path);

}  // namespace avlab::features
