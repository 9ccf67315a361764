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

#include "avlab/corpus/corpus.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <sstream>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/features/features.hpp"

namespace avlab::corpus {

namespace fs = std::filesystem;
using signal::NoiseCategory;
using signal::Partition;
using signal::Waveform;

SymbolProcess SymbolProcess::make_default(int n_symbols, uint64_t inventory_seed) {
  SymbolProcess p;
  p.n_symbols = n_symbols;
  p.inventory_seed = inventory_seed;
  p.n_visemes = std::max(1, std::min(4, n_symbols));
  p.transition = Mat::Zero(n_symbols, n_symbols);
  if (n_symbols == 1) {
    p.transition(0, 0) = 1.0;
    return p;
  }
  Rng rng = make_rng(inventory_seed, {tag("transitions")});
  for (int i = 0; i < n_symbols; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n_symbols; ++j)
      if (j != i) others.push_back(j);
    for (size_t a = others.size(); a > 1; --a) std::swap(others[a - 1], others[uniform_index(rng, a)]);
    // Two preferred successors carry most of the mass; the rest share a floor.
    const size_t rest = others.size() > 2 ? others.size() - 2 : 0;
    const double floor_mass = rest > 0 ? kTransitionFloor : 0.0;
    for (size_t a = 0; a < others.size(); ++a) {
      double w;
      if (a == 0) w = others.size() == 1 ? 1.0 : (1.0 - floor_mass) * 2.0 / 3.0;
      else if (a == 1) w = (1.0 - floor_mass) / 3.0;
      else w = floor_mass / static_cast<double>(rest);
      p.transition(i, others[a]) = w;
    }
  }
  return p;
}

void SymbolProcess::validate() const {
  if (n_symbols < 1 || n_symbols > 26) fail(ErrorKind::Config, "n_symbols must be in [1, 26]");
  if (transition.rows() != n_symbols || transition.cols() != n_symbols)
    fail(ErrorKind::Config, "transition matrix shape does not match n_symbols");
  for (int i = 0; i < n_symbols; ++i) {
    if ((transition.row(i).array() < 0.0).any())
      fail(ErrorKind::Config, "negative transition probability");
    if (std::abs(transition.row(i).sum() - 1.0) > 1e-9)
      fail(ErrorKind::Config, "transition rows must sum to 1");
  }
  if (min_duration < 1 || max_duration < min_duration)
    fail(ErrorKind::Config, "symbol durations must satisfy 1 <= min <= max");
  if (n_visemes < 1 || n_visemes > n_symbols)
    fail(ErrorKind::Config, "n_visemes must be in [1, n_symbols]");
}

namespace {

constexpr int kHarmonics = 4;
constexpr int kFormants = 3;
constexpr int kPartials = kHarmonics + kFormants;

// Acoustic and visual realization of every symbol.
struct Inventory {
  std::vector<double> f0;
  std::vector<std::array<double, kFormants>> formants;
  Mat visual;  // [n x 8]
};

double mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double inv_mel(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

Inventory make_inventory(const SymbolProcess& proc) {
  const int n = proc.n_symbols;
  Rng rng = make_rng(proc.inventory_seed, {tag("inventory"), static_cast<uint64_t>(n)});
  Inventory inv;
  inv.f0.resize(n);
  inv.formants.resize(n);
  // Distinct (F1, F2) grid cells keep every pair of symbols spectrally apart.
  const int f1_levels = 3;
  const int f2_levels = (n + f1_levels - 1) / f1_levels;
  std::vector<int> cells(static_cast<size_t>(f1_levels * f2_levels));
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  for (int s = 0; s < n; ++s) {
    int c = cells[static_cast<size_t>(s)];
    int l1 = c % f1_levels, l2 = c / f1_levels;
    double f1 = inv_mel(mel(300.0) + (mel(850.0) - mel(300.0)) * (l1 + 0.5) / f1_levels);
    double f2 = inv_mel(mel(1000.0) + (mel(2500.0) - mel(1000.0)) * (l2 + 0.5) / f2_levels);
    double f3 = 2600.0 + 1400.0 * uniform01(rng);
    inv.formants[s] = {f1, f2, f3};
    inv.f0[s] = 100.0 + 160.0 * uniform01(rng);
  }
  // Symbols in the same viseme group share a mouth shape up to a small
  // symbol-specific offset.
  Mat centers(proc.n_visemes, kVideoDim);
  for (int g = 0; g < proc.n_visemes; ++g)
    for (int d = 0; d < kVideoDim; ++d) centers(g, d) = gaussian(rng);
  std::vector<int> group(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) group[static_cast<size_t>(s)] = s % proc.n_visemes;
  std::shuffle(group.begin(), group.end(), rng);
  inv.visual.resize(n, kVideoDim);
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < kVideoDim; ++d)
      inv.visual(s, d) = centers(group[static_cast<size_t>(s)], d) + gaussian(rng, 0.15);
  return inv;
}

constexpr double kSpeakerPitchSpread = 0.15;  // log pitch scale, uniform in +-
constexpr double kSpeakerGainSigma = 0.5;

struct SpeakerTraits {
  double pitch_scale = 1.0;
  std::array<double, kPartials> gains{};
  double loudness = 0.1;
  RowVec video_offset;
};

SpeakerTraits make_speaker(const SymbolProcess& proc, const std::string& speaker) {
  Rng rng = make_rng(proc.inventory_seed, {tag("speaker"), tag(speaker)});
  SpeakerTraits t;
  t.pitch_scale = std::exp(kSpeakerPitchSpread * (2.0 * uniform01(rng) - 1.0));
  for (int h = 0; h < kHarmonics; ++h) t.gains[h] = std::exp(gaussian(rng, kSpeakerGainSigma)) / (h + 1);
  for (int j = 0; j < kFormants; ++j)
    t.gains[kHarmonics + j] = 0.7 * std::exp(gaussian(rng, kSpeakerGainSigma));
  t.loudness = 0.05 + 0.07 * uniform01(rng);
  t.video_offset.resize(kVideoDim);
  for (int d = 0; d < kVideoDim; ++d) t.video_offset[d] = gaussian(rng, 0.3);
  return t;
}

double segment_envelope(size_t i, size_t len) {
  constexpr size_t ramp = 160;
  double e = 1.0;
  if (i < ramp) e = std::min(e, 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp));
  if (len - i <= ramp) e = std::min(e, 0.5 - 0.5 * std::cos(std::numbers::pi * (len - i) / ramp));
  return 0.3 + 0.7 * e;
}

}  // namespace

char symbol_char(int symbol) { return static_cast<char>('a' + symbol); }

std::string render_transcript(const std::vector<SymbolSegment>& segments) {
  std::string out;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(symbol_char(segments[i].symbol));
  }
  return out;
}

AVUtterance gen_utterance(const SymbolProcess& proc, const std::string& speaker, double len_s,
                          uint64_t seed) {
  proc.validate();
  const int t_v = std::max(1, static_cast<int>(std::floor(len_s * kVideoRateHz)));
  Rng rng = make_rng(seed, {tag("utterance")});
  const Inventory inv = make_inventory(proc);
  const SpeakerTraits spk = make_speaker(proc, speaker);

  AVUtterance u;
  u.speaker = speaker;
  int remaining = t_v;
  int symbol = static_cast<int>(uniform_index(rng, static_cast<size_t>(proc.n_symbols)));
  while (remaining > 0) {
    int d;
    if (remaining <= proc.max_duration) {
      d = remaining;
    } else {
      int hi = std::min(proc.max_duration, remaining - proc.min_duration);
      d = std::uniform_int_distribution<int>(proc.min_duration, std::max(proc.min_duration, hi))(rng);
    }
    u.segments.push_back({symbol, d});
    remaining -= d;
    double r = uniform01(rng), acc = 0.0;
    int next = proc.n_symbols - 1;
    for (int j = 0; j < proc.n_symbols; ++j) {
      acc += proc.transition(symbol, j);
      if (r < acc) {
        next = j;
        break;
      }
    }
    symbol = next;
  }
  for (const auto& seg : u.segments) u.symbols.insert(u.symbols.end(), seg.frames, seg.symbol);
  u.transcript = render_transcript(u.segments);

  // Audio: phase-continuous sinusoid bank per segment.
  const size_t n = static_cast<size_t>(t_v) * kSamplesPerVideoFrame;
  u.audio.sample_rate_hz = signal::kCorpusSampleRate;
  u.audio.samples.assign(n, 0.0);
  std::array<double, kPartials> phase{};
  for (int k = 0; k < kPartials; ++k) phase[k] = 2.0 * std::numbers::pi * uniform01(rng);
  size_t pos = 0;
  for (const auto& seg : u.segments) {
    std::array<double, kPartials> freq{};
    for (int h = 0; h < kHarmonics; ++h) freq[h] = (h + 1) * inv.f0[seg.symbol] * spk.pitch_scale;
    for (int j = 0; j < kFormants; ++j) freq[kHarmonics + j] = inv.formants[seg.symbol][j] * spk.pitch_scale;
    const size_t len = static_cast<size_t>(seg.frames) * kSamplesPerVideoFrame;
    for (size_t i = 0; i < len; ++i) {
      double x = 0.0;
      for (int k = 0; k < kPartials; ++k) {
        x += spk.gains[k] * std::sin(phase[k]);
        phase[k] += 2.0 * std::numbers::pi * freq[k] / signal::kCorpusSampleRate;
      }
      u.audio.samples[pos + i] = x * segment_envelope(i, len);
    }
    for (auto& p : phase) p = std::fmod(p, 2.0 * std::numbers::pi);
    pos += len;
  }
  double p = signal::rms_power(u.audio);
  double scale = spk.loudness / std::sqrt(p);
  double floor_sigma = spk.loudness * std::sqrt(1e-3);  // -30 dB
  for (double& s : u.audio.samples) s = s * scale + gaussian(rng, floor_sigma);
  u.audio = signal::quantize_pcm16(u.audio);

  u.video.resize(t_v, kVideoDim);
  for (int t = 0; t < t_v; ++t)
    for (int d = 0; d < kVideoDim; ++d)
      u.video(t, d) = inv.visual(u.symbols[static_cast<size_t>(t)], d) + spk.video_offset[d] +
                      gaussian(rng, kVideoJitter);
  return u;
}

void CorpusSpec::validate() const {
  if (n_speakers < 4) fail(ErrorKind::InsufficientSpeakers, "need at least 4 speakers");
  if (utterances_per_speaker < 1) fail(ErrorKind::Config, "utterances_per_speaker must be >= 1");
  if (!(min_len_s > 0.04 && max_len_s >= min_len_s))
    fail(ErrorKind::Config, "utterance length bounds invalid");
  for (double f : {frac_finetune, frac_validation, frac_test})
    if (!(f > 0.0 && f < 1.0)) fail(ErrorKind::Config, "partition fractions must lie in (0, 1)");
  for (double f : {label_fraction_low, label_fraction_mid})
    if (!(f > 0.0 && f <= 1.0)) fail(ErrorKind::Config, "label fractions must lie in (0, 1]");
}

SymbolProcess CorpusSpec::process() const {
  SymbolProcess p = SymbolProcess::make_default(n_symbols, derive_seed(seed, {tag("process")}));
  p.min_duration = min_symbol_frames;
  p.max_duration = max_symbol_frames;
  return p;
}

std::string CorpusSpec::canonical() const {
  std::ostringstream o;
  o.precision(17);
  o << "n_speakers=" << n_speakers << "\nutterances_per_speaker=" << utterances_per_speaker
    << "\nmin_len_s=" << min_len_s << "\nmax_len_s=" << max_len_s
    << "\nfrac_finetune=" << frac_finetune << "\nfrac_validation=" << frac_validation
    << "\nfrac_test=" << frac_test << "\nlabel_fraction_low=" << label_fraction_low
    << "\nlabel_fraction_mid=" << label_fraction_mid << "\nn_symbols=" << n_symbols
    << "\nmin_symbol_frames=" << min_symbol_frames << "\nmax_symbol_frames=" << max_symbol_frames
    << "\nseed=" << seed << "\n";
  return o.str();
}

SpeakerPartition partition_speakers(const CorpusSpec& spec) {
  spec.validate();
  std::vector<std::string> names;
  for (int i = 0; i < spec.n_speakers; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "spk%03d", i);
    names.emplace_back(buf);
  }
  Rng rng = make_rng(spec.seed, {tag("speaker-partition")});
  std::shuffle(names.begin(), names.end(), rng);
  auto count = [&](double f) {
    return std::max(1, static_cast<int>(std::lround(f * spec.n_speakers)));
  };
  int n_ft = count(spec.frac_finetune), n_val = count(spec.frac_validation),
      n_test = count(spec.frac_test);
  int n_unl = spec.n_speakers - n_ft - n_val - n_test;
  if (n_unl < 1)
    fail(ErrorKind::InsufficientSpeakers, "partitions cannot be speaker-disjoint with " +
                                              std::to_string(spec.n_speakers) + " speakers");
  SpeakerPartition out;
  auto take = [&](std::vector<std::string>& dst, int k, size_t& at) {
    dst.assign(names.begin() + static_cast<std::ptrdiff_t>(at),
               names.begin() + static_cast<std::ptrdiff_t>(at + static_cast<size_t>(k)));
    std::sort(dst.begin(), dst.end());
    at += static_cast<size_t>(k);
  };
  size_t at = 0;
  take(out.finetune, n_ft, at);
  take(out.validation, n_val, at);
  take(out.test, n_test, at);
  take(out.unlabeled, n_unl, at);
  return out;
}

namespace {

// Seeded subset whose duration is closest to fraction * total.
std::vector<UtteranceEntry> duration_subset(const std::vector<UtteranceEntry>& pool,
                                            double fraction, uint64_t seed) {
  if (fraction >= 1.0) return pool;
  std::vector<size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, {tag("duration-subset")});
  std::shuffle(order.begin(), order.end(), rng);
  double total = 0.0;
  for (const auto& e : pool) total += e.duration_s;
  const double target = fraction * total;
  double acc = 0.0, best_err = 1e300;
  size_t best_len = 1;
  for (size_t k = 0; k < order.size(); ++k) {
    acc += pool[order[k]].duration_s;
    double err = std::abs(acc - target);
    if (err < best_err) {
      best_err = err;
      best_len = k + 1;
    }
    if (acc > target) break;
  }
  std::vector<UtteranceEntry> out;
  for (size_t k = 0; k < best_len; ++k) out.push_back(pool[order[k]]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace

std::string format_utterance_manifest(const std::vector<UtteranceEntry>& entries) {
  std::string out;
  for (const auto& e : entries)
    out += e.id + '\t' + e.speaker + '\t' + e.wav_path + '\t' + e.video_path + '\t' +
           e.transcript + '\n';
  return out;
}

std::vector<UtteranceEntry> read_utterance_manifest(const std::string& path) {
  std::vector<UtteranceEntry> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 5)
      fail(ErrorKind::Format, path + ":" + std::to_string(lineno) + ": expected 5 columns");
    out.push_back({cols[0], cols[1], cols[2], cols[3], cols[4], 0.0});
  }
  return out;
}

Manifests gen_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  const SpeakerPartition parts = partition_speakers(spec);
  const SymbolProcess proc = spec.process();
  std::vector<std::string> all_speakers;
  for (const auto* group : {&parts.unlabeled, &parts.finetune, &parts.validation, &parts.test})
    all_speakers.insert(all_speakers.end(), group->begin(), group->end());
  std::sort(all_speakers.begin(), all_speakers.end());

  std::map<std::string, std::vector<UtteranceEntry>> by_speaker;
  std::string symbols_text;
  for (const auto& spk : all_speakers) {
    for (int u = 0; u < spec.utterances_per_speaker; ++u) {
      Rng rng = make_rng(spec.seed, {tag("utt-len"), tag(spk), static_cast<uint64_t>(u)});
      double len = spec.min_len_s + (spec.max_len_s - spec.min_len_s) * uniform01(rng);
      char id[64];
      std::snprintf(id, sizeof id, "%s_u%03d", spk.c_str(), u);
      AVUtterance utt =
          gen_utterance(proc, spk, len, derive_seed(spec.seed, {tag("utt"), tag(spk), static_cast<uint64_t>(u)}));
      utt.id = id;
      UtteranceEntry e{utt.id, spk, "wav/" + utt.id + ".wav", "video/" + utt.id + ".avf",
                       utt.transcript, utt.audio.duration_s()};
      signal::write_wav((fs::path(out_dir) / e.wav_path).string(), utt.audio);
      features::write_avf1((fs::path(out_dir) / e.video_path).string(), utt.video);
      symbols_text += utt.id + '\t';
      for (size_t i = 0; i < utt.symbols.size(); ++i) {
        if (i) symbols_text += ' ';
        symbols_text += std::to_string(utt.symbols[i]);
      }
      symbols_text += '\n';
      by_speaker[spk].push_back(std::move(e));
    }
  }
  auto collect = [&](std::initializer_list<const std::vector<std::string>*> groups) {
    std::vector<UtteranceEntry> out;
    for (const auto* g : groups)
      for (const auto& s : *g) out.insert(out.end(), by_speaker[s].begin(), by_speaker[s].end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
  };
  Manifests m;
  m.pretrain = collect({&parts.unlabeled, &parts.finetune});
  m.finetune_mid = duration_subset(collect({&parts.finetune}), spec.label_fraction_mid,
                                   derive_seed(spec.seed, {tag("mid")}));
  m.finetune_low = duration_subset(m.finetune_mid, spec.label_fraction_low,
                                   derive_seed(spec.seed, {tag("low")}));
  m.validation = collect({&parts.validation});
  m.test = collect({&parts.test});

  const std::vector<UtteranceEntry>* lists[] = {&m.pretrain, &m.finetune_low, &m.finetune_mid,
                                                &m.validation, &m.test};
  for (size_t i = 0; i < 5; ++i)
    write_text_file((fs::path(out_dir) / (std::string(kManifestNames[i]) + ".tsv")).string(),
                    format_utterance_manifest(*lists[i]));
  write_text_file((fs::path(out_dir) / "symbols.tsv").string(), symbols_text);
  write_text_file((fs::path(out_dir) / "corpus.cfg").string(), spec.canonical());
  return m;
}

void NoiseCorpusSpec::validate() const {
  if (!(seconds_per_hour > 0.0)) fail(ErrorKind::Config, "seconds_per_hour must be positive");
  if (!(clip_len_s >= 0.5)) fail(ErrorKind::Config, "noise clip_len_s must be >= 0.5");
  if (speakers_per_pool < static_cast<int>(signal::kBabbleClipCount))
    fail(ErrorKind::Config, "speakers_per_pool must be >= 30 for babble synthesis");
}

std::string NoiseCorpusSpec::canonical() const {
  std::ostringstream o;
  o.precision(17);
  o << "seconds_per_hour=" << seconds_per_hour << "\nclip_len_s=" << clip_len_s
    << "\nspeakers_per_pool=" << speakers_per_pool << "\nseed=" << seed << "\n";
  return o.str();
}

double noise_hours(Partition p, NoiseCategory c) {
  // natural, music, babble, speech
  static const double train[] = {6, 35, 20, 50};
  static const double heldout[] = {1, 4, 2, 6};
  const double* row = p == Partition::Train ? train : heldout;
  switch (c) {
    case NoiseCategory::Natural: return row[0];
    case NoiseCategory::Music: return row[1];
    case NoiseCategory::Babble: return row[2];
    case NoiseCategory::Speech: return row[3];
  }
  return 0.0;
}

std::string noise_speaker_name(Partition p, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "noise-%s-spk%03d", signal::partition_name(p), index);
  return buf;
}

namespace {

Waveform scale_to_rms(Waveform w, double rms) {
  double p = signal::rms_power(w);
  if (p > 0.0)
    for (double& s : w.samples) s *= rms / std::sqrt(p);
  return w;
}

}  // namespace

Waveform gen_natural_noise(size_t n_samples, uint64_t seed) {
  Rng rng = make_rng(seed, {tag("natural")});
  // Band-limited white noise (one-pole high-pass then low-pass) under a slow
  // amplitude modulation.
  double fc_lo = 50.0 + 450.0 * uniform01(rng);
  double fc_hi = 800.0 + 5000.0 * uniform01(rng);
  double a_lo = std::exp(-2.0 * std::numbers::pi * fc_lo / signal::kCorpusSampleRate);
  double a_hi = std::exp(-2.0 * std::numbers::pi * fc_hi / signal::kCorpusSampleRate);
  double mod_hz = 0.3 + 2.7 * uniform01(rng), depth = 0.6 * uniform01(rng);
  double mod_phase = 2.0 * std::numbers::pi * uniform01(rng);
  Waveform w;
  w.samples.resize(n_samples);
  double lp_for_hp = 0.0, lp = 0.0;
  for (size_t i = 0; i < n_samples; ++i) {
    double x = gaussian(rng);
    lp_for_hp = a_lo * lp_for_hp + (1.0 - a_lo) * x;
    double hp = x - lp_for_hp;
    lp = a_hi * lp + (1.0 - a_hi) * hp;
    double m = 1.0 + depth * std::sin(2.0 * std::numbers::pi * mod_hz * i / signal::kCorpusSampleRate + mod_phase);
    w.samples[i] = lp * m;
  }
  return scale_to_rms(std::move(w), 0.1);
}

Waveform gen_music(size_t n_samples, uint64_t seed) {
  Rng rng = make_rng(seed, {tag("music")});
  static const int pentatonic[] = {0, 2, 4, 7, 9};
  Waveform w;
  w.samples.assign(n_samples, 0.0);
  size_t pos = 0;
  while (pos < n_samples) {
    size_t len = static_cast<size_t>((0.25 + 0.35 * uniform01(rng)) * signal::kCorpusSampleRate);
    len = std::min(len, n_samples - pos);
    double notes[3];
    for (double& f : notes) {
      int octave = 4 + static_cast<int>(uniform_index(rng, 3));
      int midi = 12 * octave + pentatonic[uniform_index(rng, 5)];
      f = 440.0 * std::pow(2.0, (midi - 69) / 12.0);
    }
    double decay = 2.0 + 4.0 * uniform01(rng);
    for (size_t i = 0; i < len; ++i) {
      double t = static_cast<double>(i) / signal::kCorpusSampleRate;
      double env = std::min(1.0, t / 0.01) * std::exp(-decay * t);
      double x = 0.0;
      for (double f : notes)
        for (int h = 1; h <= 3; ++h)
          x += std::sin(2.0 * std::numbers::pi * f * h * t) / (h * h);
      w.samples[pos + i] = x * env;
    }
    pos += len;
  }
  return scale_to_rms(std::move(w), 0.1);
}

NoiseCorpusResult gen_noise_corpus(const CorpusSpec& corpus, const NoiseCorpusSpec& spec,
                                   const std::string& out_dir) {
  corpus.validate();
  spec.validate();
  const SymbolProcess proc = corpus.process();
  const size_t clip_samples =
      static_cast<size_t>(std::lround(spec.clip_len_s * signal::kCorpusSampleRate));
  NoiseCorpusResult result;

  auto emit = [&](const std::string& id, NoiseCategory cat, Partition part, const Waveform& w,
                  std::vector<std::string> sources) {
    Waveform q = signal::quantize_pcm16(w);
    std::string rel = std::string("noise/") + signal::category_name(cat) + "/" + id + ".wav";
    signal::write_wav((fs::path(out_dir) / rel).string(), q);
    result.entries.push_back({id, rel, cat, part, q.duration_s()});
    if (!sources.empty()) result.sources.emplace_back(id, std::move(sources));
  };

  for (Partition part : {Partition::Train, Partition::Validation, Partition::Test}) {
    const std::string pname = signal::partition_name(part);
    auto pool_speaker = [&](Rng& rng) {
      return noise_speaker_name(part, static_cast<int>(uniform_index(
                                          rng, static_cast<size_t>(spec.speakers_per_pool))));
    };
    for (NoiseCategory cat : {NoiseCategory::Natural, NoiseCategory::Music, NoiseCategory::Babble,
                              NoiseCategory::Speech}) {
      const std::string cname = signal::category_name(cat);
      const double target_s = noise_hours(part, cat) * spec.seconds_per_hour;
      Rng rng = make_rng(spec.seed, {tag("noise-corpus"), tag(pname), tag(cname)});
      if (cat == NoiseCategory::Speech) {
        double acc = 0.0;
        for (int k = 0; acc < target_s; ++k) {
          std::string spk = pool_speaker(rng);
          double len = corpus.min_len_s + (corpus.max_len_s - corpus.min_len_s) * uniform01(rng);
          AVUtterance u = gen_utterance(proc, spk, len, derive_seed(spec.seed, {tag("speech-noise"), tag(pname), static_cast<uint64_t>(k)}));
          char id[64];
          std::snprintf(id, sizeof id, "speech_%s_%04d", pname.c_str(), k);
          acc += u.audio.duration_s();
          emit(id, cat, part, u.audio, {spk});
        }
        continue;
      }
      const int n_clips = std::max(1, static_cast<int>(std::lround(target_s / spec.clip_len_s)));
      for (int k = 0; k < n_clips; ++k) {
        char id[64];
        std::snprintf(id, sizeof id, "%s_%s_%04d", cname.c_str(), pname.c_str(), k);
        uint64_t clip_seed = derive_seed(spec.seed, {tag(cname), tag(pname), static_cast<uint64_t>(k)});
        if (cat == NoiseCategory::Natural) {
          emit(id, cat, part, gen_natural_noise(clip_samples, clip_seed), {});
        } else if (cat == NoiseCategory::Music) {
          emit(id, cat, part, gen_music(clip_samples, clip_seed), {});
        } else {
          // 30 distinct pool speakers, one clip-length utterance each.
          std::vector<int> idx(static_cast<size_t>(spec.speakers_per_pool));
          std::iota(idx.begin(), idx.end(), 0);
          std::shuffle(idx.begin(), idx.end(), rng);
          std::vector<Waveform> sources;
          std::vector<std::string> names;
          for (size_t c = 0; c < signal::kBabbleClipCount; ++c) {
            std::string spk = noise_speaker_name(part, idx[c]);
            AVUtterance u = gen_utterance(proc, spk, spec.clip_len_s, derive_seed(clip_seed, {c}));
            sources.push_back(std::move(u.audio));
            names.push_back(spk);
          }
          signal::NoiseClip babble = signal::synth_babble(sources, clip_samples, clip_seed);
          emit(id, cat, part, scale_to_rms(babble.waveform, 0.1), names);
        }
      }
    }
  }
  write_text_file((fs::path(out_dir) / "noise.tsv").string(),
                  signal::format_noise_manifest(result.entries));
  std::string src;
  for (const auto& [id, names] : result.sources) src += id + '\t' + join(names, ",") + '\n';
  write_text_file((fs::path(out_dir) / "noise_sources.tsv").string(), src);
  write_text_file((fs::path(out_dir) / "noise.cfg").string(), spec.canonical());
  return result;
}

}  // namespace avlab::corpus
