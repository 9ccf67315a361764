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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"
#include "avlab/signal/noise.hpp"
#include "avlab/signal/waveform.hpp"
#include "test_util.hpp"

using namespace avlab;
using namespace avlab::signal;

namespace {

Waveform constant(size_t n, double v) {
  Waveform w;
  w.samples.assign(n, v);
  return w;
}

Waveform white(size_t n, double stddev, uint64_t seed) {
  Rng rng = make_rng(seed, {tag("white")});
  Waveform w;
  w.samples.resize(n);
  for (auto& x : w.samples) x = gaussian(rng, stddev);
  return w;
}

double direct_power(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

NoiseClip clip_of(Waveform w, NoiseCategory c, Partition p, const std::string& id) {
  NoiseClip clip;
  clip.waveform = std::move(w);
  clip.category = c;
  clip.partition = p;
  clip.id = id;
  return clip;
}

}  // namespace

TEST(RmsPower, ConstantSignals) {
  EXPECT_EQ(rms_power(constant(100, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(rms_power(constant(100, 1.0)), 1.0);
}

TEST(RmsPower, SineWholePeriods) {
  Waveform w;
  const int period = 80;
  for (int i = 0; i < period * 25; ++i) w.samples.push_back(std::sin(2.0 * std::numbers::pi * i / period));
  EXPECT_NEAR(rms_power(w), 0.5, 1e-9);
  EXPECT_NEAR(rms_power(w), direct_power(w.samples), 1e-12);
}

TEST(MixingGain, EqualPowerAtZeroDb) {
  EXPECT_NEAR(mixing_gain(constant(50, 1.0), constant(50, -1.0), 0.0), 1.0, 1e-12);
}

TEST(MixingGain, PowerRatioOracle) {
  const Waveform s = constant(64, 2.0), n = constant(64, 1.0);  // powers 4 and 1
  const double g = mixing_gain(s, n, 10.0);
  EXPECT_NEAR(g, 0.63246, 1e-5);
  std::vector<double> scaled;
  for (double v : n.samples) scaled.push_back(g * v);
  EXPECT_NEAR(10.0 * std::log10(direct_power(s.samples) / direct_power(scaled)), 10.0, 1e-9);
}

TEST(MixingGain, ZeroPowerInputsAreErrors) {
  try {
    mixing_gain(constant(10, 0.0), constant(10, 1.0), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroPowerSignal);
  }
  try {
    mixing_gain(constant(10, 1.0), constant(10, 0.0), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroPowerNoise);
  }
}

TEST(FitNoiseLength, CyclicTiling) {
  Waveform n;
  n.samples = {1, 2, 3, 4, 5};
  // Find a seed whose offset is zero, then check the tiling pattern.
  bool found = false;
  for (uint64_t seed = 0; seed < 200 && !found; ++seed) {
    Waveform f = fit_noise_length(n, 12, seed);
    ASSERT_EQ(f.size(), 12u);
    if (f.samples[0] != 1.0) continue;
    found = true;
    const std::vector<double> want = {1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 1, 2};
    EXPECT_EQ(f.samples, want);
  }
  EXPECT_TRUE(found);
}

TEST(FitNoiseLength, EqualLengthIsIdentity) {
  Waveform n = white(300, 1.0, 4);
  EXPECT_EQ(fit_noise_length(n, 300, 9).samples, n.samples);
}

TEST(FitNoiseLength, DeterministicAndSourceOnly) {
  Waveform n = white(1000, 1.0, 5);
  const std::set<double> source(n.samples.begin(), n.samples.end());
  for (size_t len : {10u, 999u, 1000u, 2500u}) {
    Waveform a = fit_noise_length(n, len, 77), b = fit_noise_length(n, len, 77);
    EXPECT_EQ(a.samples, b.samples);
    ASSERT_EQ(a.size(), len);
    for (double v : a.samples) EXPECT_TRUE(source.count(v));
  }
  // A window of a longer source is contiguous.
  Waveform w = fit_noise_length(n, 100, 3);
  auto start = std::find(n.samples.begin(), n.samples.end(), w.samples[0]) - n.samples.begin();
  for (size_t i = 0; i < 100; ++i) EXPECT_EQ(w.samples[i], n.samples[start + i]);
}

TEST(MixAtSnr, EqualPowerZeroDbAddsFittedNoise) {
  Waveform s = white(800, 0.5, 1);
  Waveform n = white(500, 1.0, 2);
  const double ps = rms_power(s), pn = rms_power(n);
  for (auto& v : n.samples) v *= std::sqrt(ps / pn);
  auto r = mix_components(s, n, 0.0, 11);
  Waveform fitted = fit_noise_length(n, s.size(), 11);
  // The fitted window has its own power, so compare against the gain applied.
  for (size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(r.added.samples[i], r.gain * fitted.samples[i], 1e-15);
    EXPECT_EQ(r.mixed.samples[i], s.samples[i] + r.added.samples[i]);
  }
}

TEST(MixAtSnr, AdditivityAndPowerRatio) {
  Waveform s = white(1600, 0.3, 3);
  NoiseClip clip = clip_of(white(3000, 0.8, 4), NoiseCategory::Natural, Partition::Test, "n");
  Waveform out = mix_at_snr(s, clip, -10.0, 5);
  Waveform fitted = fit_noise_length(clip.waveform, s.size(), 5);
  const double g = mixing_gain(s, fitted, -10.0);
  std::vector<double> residual(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(out.samples[i] - g * fitted.samples[i], s.samples[i], 1e-12);
    residual[i] = out.samples[i] - s.samples[i];
  }
  EXPECT_NEAR(direct_power(residual) / direct_power(s.samples) / 10.0, 1.0, 1e-6);
}

TEST(MixAtSnr, NoClippingOrRenormalization) {
  Waveform s = constant(400, 0.9);
  NoiseClip clip = clip_of(constant(400, 0.9), NoiseCategory::Music, Partition::Test, "m");
  Waveform out = mix_at_snr(s, clip, -10.0, 1);
  for (double v : out.samples) EXPECT_GT(std::abs(v), 1.0);
}

TEST(SynthBabble, IdenticalClipsGiveOneClipAtUnitPower) {
  Waveform base = white(2000, 0.2, 8);
  std::vector<Waveform> clips(kBabbleClipCount, base);
  // Equal lengths make every fitted clip the source itself.
  NoiseClip b = synth_babble(clips, 2000, 3);
  EXPECT_EQ(b.category, NoiseCategory::Babble);
  const double scale = 1.0 / std::sqrt(direct_power(base.samples));
  for (size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(b.waveform.samples[i], scale * base.samples[i], 1e-12);
  EXPECT_NEAR(rms_power(b.waveform), 1.0, 1e-9);
}

TEST(SynthBabble, WhiteNoiseVarianceMonteCarlo) {
  double total = 0.0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    std::vector<Waveform> clips;
    for (size_t i = 0; i < kBabbleClipCount; ++i) clips.push_back(white(4000, 0.1 + 0.02 * i, 100 * t + i));
    NoiseClip b = synth_babble(clips, 4000, t);
    double mean = 0.0;
    for (double v : b.waveform.samples) mean += v;
    mean /= 4000.0;
    double var = 0.0;
    for (double v : b.waveform.samples) var += (v - mean) * (v - mean);
    total += var / 3999.0;
  }
  EXPECT_NEAR(total / trials, 1.0, 0.05);
}

TEST(SynthBabble, WrongClipCount) {
  std::vector<Waveform> clips(29, white(100, 1.0, 1));
  try {
    synth_babble(clips, 100, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WrongClipCount);
  }
}

class TrainingNoise : public ::testing::Test {
 protected:
  void SetUp() override {
    int i = 0;
    for (auto c : kAllCategories)
      for (auto p : {Partition::Train, Partition::Validation, Partition::Test})
        bank.clips.push_back(clip_of(white(200, 1.0, i++), c, p,
                                     std::string(category_name(c)) + "-" + partition_name(p)));
  }
  NoiseBank bank;
};

TEST_F(TrainingNoise, ZeroProbabilityNeverApplies) {
  NoisePolicy p;
  p.apply_probability = 0.0;
  for (uint64_t s = 0; s < 1000; ++s) EXPECT_FALSE(sample_training_noise(bank, p, s).has_value());
}

TEST_F(TrainingNoise, SingleClipAlwaysReturned) {
  NoiseBank one;
  one.clips.push_back(clip_of(white(100, 1.0, 1), NoiseCategory::Music, Partition::Train, "only"));
  NoisePolicy p;
  p.apply_probability = 1.0;
  p.categories = {NoiseCategory::Music};
  for (uint64_t s = 0; s < 200; ++s) {
    auto d = sample_training_noise(one, p, s);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->clip->id, "only");
    EXPECT_EQ(d->snr_db, 0.0);
  }
}

TEST_F(TrainingNoise, ApplicationRateAndPartitionHygiene) {
  NoisePolicy p;  // 0.25 over all categories
  size_t hits = 0;
  const size_t n = 100000;
  std::map<NoiseCategory, size_t> per_category;
  for (uint64_t s = 0; s < n; ++s) {
    auto d = sample_training_noise(bank, p, s);
    if (!d) continue;
    ++hits;
    EXPECT_EQ(d->clip->partition, Partition::Train);
    ++per_category[d->clip->category];
  }
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.25, 0.01);
  for (auto c : kAllCategories) EXPECT_NEAR(static_cast<double>(per_category[c]) / hits, 0.25, 0.02);
}

TEST_F(TrainingNoise, EmptyCategoryIsAnError) {
  NoiseBank only_music;
  only_music.clips.push_back(clip_of(white(100, 1.0, 1), NoiseCategory::Music, Partition::Train, "m"));
  NoisePolicy p;
  p.apply_probability = 1.0;
  p.categories = {NoiseCategory::Music, NoiseCategory::Speech};
  bool raised = false;
  for (uint64_t s = 0; s < 50 && !raised; ++s) {
    try {
      sample_training_noise(only_music, p, s);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EmptyCategory);
      raised = true;
    }
  }
  EXPECT_TRUE(raised);
}

TEST(Wav, Pcm16RoundTripIsExact) {
  testutil::TempDir dir;
  Waveform w = quantize_pcm16(white(1234, 0.3, 6));
  write_wav(dir.str("a.wav"), w);
  Waveform r = read_wav(dir.str("a.wav"));
  EXPECT_EQ(r.samples, w.samples);
  EXPECT_EQ(r.sample_rate_hz, kCorpusSampleRate);
}

TEST(Wav, TruncatedFileIsFormatError) {
  testutil::TempDir dir;
  write_wav(dir.str("a.wav"), quantize_pcm16(white(100, 0.3, 6)));
  std::filesystem::resize_file(dir.str("a.wav"), 30);
  try {
    read_wav(dir.str("a.wav"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Data);
  }
}

TEST(NoiseManifest, FormatParseRoundTrip) {
  std::vector<NoiseEntry> entries = {{"a", "noise/a.wav", NoiseCategory::Babble, Partition::Test, 4.0},
                                     {"b", "noise/b.wav", NoiseCategory::Natural, Partition::Train, 2.5}};
  testutil::TempDir dir;
  std::ofstream(dir.str("n.tsv")) << format_noise_manifest(entries);
  auto back = read_noise_manifest(dir.str("n.tsv"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, "a");
  EXPECT_EQ(back[0].category, NoiseCategory::Babble);
  EXPECT_EQ(back[1].partition, Partition::Train);
  EXPECT_DOUBLE_EQ(back[1].duration_s, 2.5);
}
