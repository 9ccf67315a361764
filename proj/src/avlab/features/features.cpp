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

#include "avlab/features/features.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"

namespace avlab::features {

const char* kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::LogMel: return "logmel";
    case FeatureKind::Mfcc: return "mfcc";
    case FeatureKind::StackedMfcc: return "stacked_mfcc";
    case FeatureKind::Hidden: return "hidden";
  }
  return "?";
}

size_t frame_count(size_t n) {
  if (n < static_cast<size_t>(kWindowSamples)) return 0;
  return (n - kWindowSamples) / kHopSamples + 1;
}

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct Frontend {
  std::vector<double> window;
  Mat filterbank;  // [kMelFilters x bins]
  fftw_plan plan = nullptr;

  Frontend() {
    window.resize(kWindowSamples);
    for (int n = 0; n < kWindowSamples; ++n)
      window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (kWindowSamples - 1));

    const int bins = kFftSize / 2 + 1;
    filterbank = Mat::Zero(kMelFilters, bins);
    double lo = hz_to_mel(0.0), hi = hz_to_mel(8000.0);
    std::vector<double> edges(kMelFilters + 2);
    for (int i = 0; i < kMelFilters + 2; ++i)
      edges[i] = mel_to_hz(lo + (hi - lo) * i / (kMelFilters + 1));
    for (int m = 0; m < kMelFilters; ++m) {
      for (int b = 0; b < bins; ++b) {
        double f = 16000.0 * b / kFftSize;
        double up = (f - edges[m]) / (edges[m + 1] - edges[m]);
        double down = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
        filterbank(m, b) = std::max(0.0, std::min(up, down));
      }
    }

    double* in = fftw_alloc_real(kFftSize);
    fftw_complex* out = fftw_alloc_complex(bins);
    plan = fftw_plan_dft_r2c_1d(kFftSize, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
};

const Frontend& frontend() {
  // fftw planning is not thread-safe; executing a finished plan is.
  static std::once_flag once;
  static Frontend* f = nullptr;
  std::call_once(once, [] { f = new Frontend(); });
  return *f;
}

}  // namespace

FeatureSequence logmel(const signal::Waveform& w) {
  if (w.sample_rate_hz != signal::kCorpusSampleRate)
    fail(ErrorKind::Format, "logmel expects 16 kHz audio");
  const size_t frames = frame_count(w.size());
  if (frames == 0) fail(ErrorKind::TooShort, "waveform shorter than one 25 ms window");
  const Frontend& fe = frontend();
  const int bins = kFftSize / 2 + 1;

  double* in = fftw_alloc_real(kFftSize);
  fftw_complex* out = fftw_alloc_complex(bins);
  RowVec power(bins);
  FeatureSequence result;
  result.rate_hz = 100.0;
  result.kind = FeatureKind::LogMel;
  result.data.resize(static_cast<Eigen::Index>(frames), kMelFilters);
  for (size_t t = 0; t < frames; ++t) {
    const double* src = w.samples.data() + t * kHopSamples;
    for (int n = 0; n < kWindowSamples; ++n) in[n] = src[n] * fe.window[n];
    for (int n = kWindowSamples; n < kFftSize; ++n) in[n] = 0.0;
    fftw_execute_dft_r2c(fe.plan, in, out);
    for (int b = 0; b < bins; ++b) power[b] = out[b][0] * out[b][0] + out[b][1] * out[b][1];
    for (int m = 0; m < kMelFilters; ++m) {
      double e = fe.filterbank.row(m).dot(power);
      result.data(static_cast<Eigen::Index>(t), m) = std::log(std::max(e, kLogFloor));
    }
  }
  fftw_free(in);
  fftw_free(out);
  return result;
}

std::vector<double> dct_ortho(std::span<const double> x, size_t n_keep) {
  const size_t n = x.size();
  std::vector<double> c(n_keep, 0.0);
  for (size_t k = 0; k < n_keep; ++k) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    c[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
  }
  return c;
}

std::vector<double> idct_ortho(std::span<const double> c) {
  const size_t n = c.size();
  std::vector<double> x(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < n; ++k)
      acc += c[k] * std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
             std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    x[i] = acc;
  }
  return x;
}

FeatureSequence mfcc(const FeatureSequence& lm) {
  if (lm.kind != FeatureKind::LogMel) fail(ErrorKind::KindMismatch, "mfcc expects logmel input");
  const Eigen::Index n = lm.dim();
  // DCT basis [n x 13]; mfcc = logmel * basis.
  Mat basis(n, kMfccCoefficients);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 0; k < kMfccCoefficients; ++k)
      basis(i, k) = std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
                    std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
  FeatureSequence out;
  out.data = lm.data * basis;
  out.rate_hz = lm.rate_hz;
  out.kind = FeatureKind::Mfcc;
  return out;
}

FeatureSequence stack(const FeatureSequence& f, int factor) {
  if (factor < 1) fail(ErrorKind::Config, "stack factor must be >= 1");
  if (f.rate_hz != 100.0) fail(ErrorKind::KindMismatch, "stack expects 100 Hz input");
  if (factor == 1) return f;
  const Eigen::Index t = f.frames(), d = f.dim();
  const Eigen::Index t_out = (t + factor - 1) / factor;
  FeatureSequence out;
  out.data = Mat::Zero(t_out, d * factor);
  for (Eigen::Index i = 0; i < t; ++i)
    out.data.block(i / factor, (i % factor) * d, 1, d) = f.data.row(i);
  out.rate_hz = f.rate_hz / factor;
  out.kind = f.kind == FeatureKind::Mfcc ? FeatureKind::StackedMfcc : f.kind;
  return out;
}

FeatureSequence normalize(const FeatureSequence& f) {
  if (f.frames() < 2) fail(ErrorKind::TooShort, "normalize needs at least two frames");
  FeatureSequence out = f;
  const double t = static_cast<double>(f.frames());
  for (Eigen::Index c = 0; c < f.dim(); ++c) {
    auto col = out.data.col(c);
    double mean = col.sum() / t;
    col.array() -= mean;
    double var = col.squaredNorm() / t;
    col /= std::sqrt(std::max(var, kVarianceFloor));
  }
  return out;
}

FeatureSequence audio_input_features(const signal::Waveform& w) {
  return normalize(stack(mfcc(logmel(w)), kStackFactor));
}

std::vector<unsigned char> encode_avf1(const Mat& m) {
  ByteWriter out;
  out.magic("AVF1");
  out.u32(static_cast<uint32_t>(m.rows()));
  out.u32(static_cast<uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.f32(static_cast<float>(m(r, c)));
  return std::move(out.data());
}

void write_avf1(const std::string& path, const Mat& m) { write_file_bytes(path, encode_avf1(m)); }

void write_feature_file(const std::string& path, const FeatureSequence& f) {
  ByteWriter out;
  out.magic("AVF1");
  out.u32(static_cast<uint32_t>(f.frames()));
  out.u32(static_cast<uint32_t>(f.dim()));
  out.u8(static_cast<uint8_t>(f.kind));
  out.f32(static_cast<float>(f.rate_hz));
  for (Eigen::Index r = 0; r < f.frames(); ++r)
    for (Eigen::Index c = 0; c < f.dim(); ++c) out.f32(static_cast<float>(f.data(r, c)));
  write_file_bytes(path, out.data());
}

Avf1Contents read_avf1(const std::string& path) {
  auto bytes = read_file_bytes(path);
  ByteReader in(bytes.data(), bytes.size(), path);
  in.expect_magic("AVF1");
  uint32_t rows = in.u32(), cols = in.u32();
  const size_t payload = static_cast<size_t>(rows) * cols * 4;
  Avf1Contents out;
  if (in.remaining() == payload + 5) {
    out.has_kind = true;
    uint8_t k = in.u8();
    if (k > static_cast<uint8_t>(FeatureKind::Hidden)) fail(ErrorKind::Format, path + ": bad kind");
    out.kind = static_cast<FeatureKind>(k);
    out.rate_hz = in.f32();
  } else if (in.remaining() != payload) {
    fail(ErrorKind::Format, path + ": size does not match header");
  }
  out.data.resize(rows, cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) out.data(r, c) = in.f32();
  return out;
}

}  // namespace avlab::features
