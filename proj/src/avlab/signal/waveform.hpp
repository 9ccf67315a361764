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
#include <span>
#include <string>
#include <vector>

namespace avlab::signal {

inline constexpr int kCorpusSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kCorpusSampleRate;

  size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

// Throws Format if empty or any sample is non-finite.
void validate(const Waveform& w);

// Mean of squared samples.
double rms_power(const Waveform& w);

// Gain g such that 10*log10(P_signal / P(g*noise)) == snr_db.
double mixing_gain(const Waveform& signal, const Waveform& noise, double snr_db);

// 10*log10(P_signal / P_added); the SNR realized by an added component.
double measured_snr_db(const Waveform& signal, const Waveform& added);

// Length-fit by seeded windowing (longer source) or cyclic tiling from a
// seeded start offset (shorter source). Output samples are always copies of
// source samples.
Waveform fit_noise_length(const Waveform& noise, size_t target_len, uint64_t seed);

// Round onto the PCM16 grid (k / 32768, k in [-32768, 32767]).
Waveform quantize_pcm16(const Waveform& w);

Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& w);
std::vector<unsigned char> encode_wav(const Waveform& w);
Waveform decode_wav(std::span<const unsigned char> bytes, const std::string& what);

}  // namespace avlab::signal
