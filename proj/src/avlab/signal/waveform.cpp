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

#include "avlab/signal/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"

namespace avlab::signal {

void validate(const Waveform& w) {
  if (w.samples.empty()) fail(ErrorKind::Format, "empty waveform");
  if (w.sample_rate_hz <= 0) fail(ErrorKind::Format, "non-positive sample rate");
  for (double s : w.samples)
    if (!std::isfinite(s)) fail(ErrorKind::Format, "non-finite sample");
}

double rms_power(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  return acc / static_cast<double>(w.samples.size());
}

double mixing_gain(const Waveform& signal, const Waveform& noise, double snr_db) {
  if (signal.size() != noise.size())
    fail(ErrorKind::ShapeMismatch, "signal and noise lengths differ");
  double ps = rms_power(signal);
  double pn = rms_power(noise);
  if (ps <= 0.0) fail(ErrorKind::ZeroPowerSignal, "signal has zero power");
  if (pn <= 0.0) fail(ErrorKind::ZeroPowerNoise, "noise has zero power");
  return std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
}

double measured_snr_db(const Waveform& signal, const Waveform& added) {
  return 10.0 * std::log10(rms_power(signal) / rms_power(added));
}

Waveform fit_noise_length(const Waveform& noise, size_t target_len, uint64_t seed) {
  if (noise.samples.empty()) fail(ErrorKind::Format, "empty noise clip");
  if (target_len == 0) fail(ErrorKind::Format, "target length must be positive");
  Rng rng = make_rng(seed, {tag("fit-noise")});
  const size_t n = noise.size();
  Waveform out;
  out.sample_rate_hz = noise.sample_rate_hz;
  out.samples.resize(target_len);
  if (n >= target_len) {
    size_t offset = n == target_len ? 0 : uniform_index(rng, n - target_len + 1);
    std::copy_n(noise.samples.begin() + static_cast<std::ptrdiff_t>(offset), target_len,
                out.samples.begin());
  } else {
    size_t offset = uniform_index(rng, n);
    for (size_t i = 0; i < target_len; ++i) out.samples[i] = noise.samples[(offset + i) % n];
  }
  return out;
}

Waveform quantize_pcm16(const Waveform& w) {
  Waveform out = w;
  for (double& s : out.samples) {
    double k = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
    s = k / 32768.0;
  }
  return out;
}

std::vector<unsigned char> encode_wav(const Waveform& w) {
  const uint32_t data_bytes = static_cast<uint32_t>(w.size() * 2);
  ByteWriter out;
  out.magic("RIFF");
  out.u32(36 + data_bytes);
  out.magic("WAVE");
  out.magic("fmt ");
  out.u32(16);
  out.u16(1);  // PCM
  out.u16(1);  // mono
  out.u32(static_cast<uint32_t>(w.sample_rate_hz));
  out.u32(static_cast<uint32_t>(w.sample_rate_hz) * 2);
  out.u16(2);
  out.u16(16);
  out.magic("data");
  out.u32(data_bytes);
  for (double s : w.samples) {
    double k = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
    out.u16(static_cast<uint16_t>(static_cast<int16_t>(k)));
  }
  return std::move(out.data());
}

Waveform decode_wav(std::span<const unsigned char> bytes, const std::string& what) {
  ByteReader in(bytes.data(), bytes.size(), what);
  in.expect_magic("RIFF");
  in.u32();
  in.expect_magic("WAVE");
  Waveform w;
  bool have_fmt = false;
  while (in.remaining() >= 8) {
    char id[4];
    in.bytes(id, 4);
    uint32_t size = in.u32();
    std::string chunk(id, 4);
    if (chunk == "fmt ") {
      uint16_t format = in.u16();
      uint16_t channels = in.u16();
      uint32_t rate = in.u32();
      in.u32();
      in.u16();
      uint16_t bits = in.u16();
      if (format != 1 || channels != 1 || bits != 16)
        fail(ErrorKind::Format, what + ": only PCM16 mono is supported");
      for (uint32_t i = 16; i < size; ++i) in.u8();
      w.sample_rate_hz = static_cast<int>(rate);
      have_fmt = true;
    } else if (chunk == "data") {
      if (!have_fmt) fail(ErrorKind::Format, what + ": data chunk before fmt");
      w.samples.resize(size / 2);
      for (auto& s : w.samples) s = static_cast<int16_t>(in.u16()) / 32768.0;
      return w;
    } else {
      for (uint32_t i = 0; i < size + (size & 1); ++i) in.u8();
    }
  }
  fail(ErrorKind::Format, what + ": no data chunk");
}

Waveform read_wav(const std::string& path) {
  auto bytes = read_file_bytes(path);
  return decode_wav(bytes, path);
}

void write_wav(const std::string& path, const Waveform& w) {
  write_file_bytes(path, encode_wav(w));
}

}  // namespace avlab::signal
