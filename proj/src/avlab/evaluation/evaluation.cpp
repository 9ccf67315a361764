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

#include "avlab/evaluation/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"

namespace avlab::evaluation {

double WerCount::wer() const {
  if (ref_words == 0) fail(ErrorKind::EmptyReference, "WER of an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(ref_words);
}

WerCount& WerCount::operator+=(const WerCount& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  ref_words += o.ref_words;
  return *this;
}

WerCount wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  if (ref.empty()) fail(ErrorKind::EmptyReference, "reference has no words");
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<size_t>> d(n + 1, std::vector<size_t>(m + 1));
  for (size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1), d[i][j - 1] + 1,
                          d[i - 1][j] + 1});
  WerCount c;
  c.ref_words = n;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const size_t diag = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (d[i][j] == d[i - 1][j - 1] + diag) {
        c.substitutions += diag;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

WerCount wer_text(const std::string& ref, const std::string& hyp) {
  return wer(split_whitespace(ref), split_whitespace(hyp));
}

bool GridMeta::operator<(const GridMeta& o) const {
  return std::tie(model, pt, ft, mode) < std::tie(o.model, o.pt, o.ft, o.mode);
}

std::optional<double> EvalGrid::get(const std::string& type, double snr) const {
  auto it = cells.find(type);
  if (it == cells.end()) return std::nullopt;
  auto jt = it->second.find(snr);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

namespace {

std::string describe(const GridMeta& m) {
  return m.model + "/" + m.pt + "/" + m.ft + "/" + m.mode;
}

std::string snr_label(double snr) {
  std::ostringstream o;
  o << snr;
  return o.str();
}

}  // namespace

double type_average(const EvalGrid& grid, const std::string& type) {
  double acc = 0.0;
  for (double snr : kSnrGrid) {
    auto v = grid.get(type, snr);
    if (!v)
      fail(ErrorKind::IncompleteGrid, describe(grid.meta) + ": missing " + type + " @ " +
                                          snr_label(snr) + " dB");
    acc += *v;
  }
  return acc / static_cast<double>(kSnrGrid.size());
}

Summary aggregate(const EvalGrid& grid) {
  Summary s;
  double acc = 0.0;
  for (const auto& type : kNoiseTypes) {
    s.per_type[type] = type_average(grid, type);
    acc += s.per_type[type];
  }
  if (!grid.clean) fail(ErrorKind::IncompleteGrid, describe(grid.meta) + ": missing clean cell");
  s.n_wer = acc / static_cast<double>(kNoiseTypes.size());
  s.c_wer = *grid.clean;
  return s;
}

double relative_reduction(double baseline, double ours) {
  if (!(baseline > 0.0))
    fail(ErrorKind::NonpositiveBaseline, "relative reduction needs a positive baseline");
  return 100.0 * (baseline - ours) / baseline;
}

std::vector<EvalGrid> parse_grid_csv(const std::string& text, const std::string& origin,
                                     std::string* corpus_hash) {
  std::vector<EvalGrid> grids;
  int lineno = 0;
  bool header_seen = false;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# corpus_hash=";
      if (corpus_hash && line.rfind(key, 0) == 0) *corpus_hash = trim(line.substr(key.size()));
      continue;
    }
    const std::string where = origin + ":" + std::to_string(lineno);
    auto cols = split(line, ',');
    if (!header_seen) {
      if (line != "model,pt,ft,mode,noise_type,snr_db,wer_percent")
        fail(ErrorKind::Format, where + ": unexpected CSV header");
      header_seen = true;
      continue;
    }
    if (cols.size() != 7) fail(ErrorKind::Format, where + ": expected 7 columns");
    GridMeta meta{cols[0], cols[1], cols[2], cols[3]};
    auto it = std::find_if(grids.begin(), grids.end(), [&](const EvalGrid& g) { return g.meta == meta; });
    if (it == grids.end()) {
      grids.push_back(EvalGrid{meta, {}, std::nullopt});
      it = grids.end() - 1;
    }
    double value;
    try {
      value = std::stod(cols[6]);
    } catch (const std::logic_error&) {
      fail(ErrorKind::Format, where + ": bad WER value '" + cols[6] + "'");
    }
    if (cols[4] == "clean") {
      it->clean = value;
    } else {
      try {
        it->set(cols[4], std::stod(cols[5]), value);
      } catch (const std::logic_error&) {
        fail(ErrorKind::Format, where + ": bad SNR '" + cols[5] + "'");
      }
    }
  }
  return grids;
}

std::vector<EvalGrid> read_grid_csv(const std::string& path, std::string* corpus_hash) {
  return parse_grid_csv(read_text_file(path), path, corpus_hash);
}

namespace {

std::vector<std::string> ordered_types(const EvalGrid& g) {
  std::vector<std::string> out;
  for (const auto& t : kNoiseTypes)
    if (g.cells.count(t)) out.push_back(t);
  for (const auto& [t, v] : g.cells)
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  return out;
}

std::string type_letter(const std::string& t) {
  if (t == "babble") return "B";
  if (t == "speech") return "S";
  if (t == "music") return "M";
  if (t == "natural") return "N";
  return t;
}

std::string pad_left(const std::string& s, size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

std::string render_report(const std::vector<EvalGrid>& grids, ReportFormat format,
                          const std::string& corpus_hash) {
  std::string out;
  if (format == ReportFormat::Csv) {
    if (!corpus_hash.empty()) out += "# corpus_hash=" + corpus_hash + "\n";
    out += "model,pt,ft,mode,noise_type,snr_db,wer_percent\n";
    for (const auto& g : grids) {
      const std::string prefix = g.meta.model + "," + g.meta.pt + "," + g.meta.ft + "," + g.meta.mode + ",";
      for (const auto& t : ordered_types(g))
        for (const auto& [snr, v] : g.cells.at(t))
          out += prefix + t + "," + snr_label(snr) + "," + format_one_decimal(v) + "\n";
      if (g.clean) out += prefix + "clean,clean," + format_one_decimal(*g.clean) + "\n";
    }
    return out;
  }
  out += "WER (%) by noise type and SNR. B: babble, S: speech, M: music, N: natural noise\n";
  if (!corpus_hash.empty()) out += "corpus " + corpus_hash + "\n";
  for (const auto& g : grids) {
    out += "\n[" + g.meta.model + "] PT: " + g.meta.pt + "  FT: " + g.meta.ft +
           "  input: " + g.meta.mode + "\n";
    const auto types = ordered_types(g);
    std::string header = pad_right("SNR (dB)", 10);
    for (const auto& t : types) header += pad_left(type_letter(t), 8);
    out += header + "\n";
    std::vector<double> snrs;
    for (const auto& t : types)
      for (const auto& [snr, v] : g.cells.at(t))
        if (std::find(snrs.begin(), snrs.end(), snr) == snrs.end()) snrs.push_back(snr);
    std::sort(snrs.begin(), snrs.end());
    for (double snr : snrs) {
      std::string row = pad_right(snr_label(snr), 10);
      for (const auto& t : types) {
        auto v = g.get(t, snr);
        row += pad_left(v ? format_one_decimal(*v) : "-", 8);
      }
      out += row + "\n";
    }
    if (g.clean) out += pad_right("clean", 10) + pad_left(format_one_decimal(*g.clean), 8) + "\n";
  }
  return out;
}

std::string render_summary(const std::vector<EvalGrid>& grids) {
  struct Row {
    std::optional<Summary> a, av;
  };
  std::vector<std::tuple<std::string, std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string>, Row> rows;
  for (const auto& g : grids) {
    auto key = std::make_tuple(g.meta.model, g.meta.ft, g.meta.pt);
    if (!rows.count(key)) keys.push_back(key);
    Row& r = rows[key];
    Summary s = aggregate(g);
    if (g.meta.mode == "A")
      r.a = s;
    else
      r.av = s;
  }
  std::string out = pad_right("model", 8) + pad_right("FT", 14) + pad_right("PT", 8) +
                    pad_left("A C-WER", 10) + pad_left("A N-WER", 10) + pad_left("AV C-WER", 10) +
                    pad_left("AV N-WER", 10) + "\n";
  auto cell = [](const std::optional<Summary>& s, bool clean) {
    return pad_left(s ? format_one_decimal(clean ? s->c_wer : s->n_wer) : "-", 10);
  };
  for (const auto& key : keys) {
    const Row& r = rows[key];
    out += pad_right(std::get<0>(key), 8) + pad_right(std::get<1>(key), 14) +
           pad_right(std::get<2>(key), 8) + cell(r.a, true) + cell(r.a, false) + cell(r.av, true) +
           cell(r.av, false) + "\n";
  }
  return out;
}

std::string render_svg(const std::vector<EvalGrid>& grids) {
  const double width = 760, height = 360, left = 60, right = 170, top = 30, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  std::vector<std::vector<double>> values;
  double vmax = 1.0;
  for (const auto& g : grids) {
    std::vector<double> row;
    for (const auto& t : kNoiseTypes) {
      double v = type_average(g, t);
      row.push_back(v);
      vmax = std::max(vmax, v);
    }
    values.push_back(row);
  }
  vmax = std::ceil(vmax / 10.0) * 10.0;
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                  "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(1);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left << "\" y=\"18\">Mean WER (%) over SNRs by noise type</text>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    double v = vmax * tick / 5.0, y = top + plot_h - plot_h * tick / 5.0;
    o << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  const size_t n_types = kNoiseTypes.size(), n_bars = grids.size();
  const double group_w = plot_w / static_cast<double>(n_types);
  const double bar_w = n_bars ? (group_w * 0.8) / static_cast<double>(n_bars) : 0.0;
  for (size_t t = 0; t < n_types; ++t) {
    double gx = left + group_w * static_cast<double>(t) + group_w * 0.1;
    for (size_t b = 0; b < n_bars; ++b) {
      double h = plot_h * values[b][t] / vmax;
      o << "<rect x=\"" << gx + bar_w * static_cast<double>(b) << "\" y=\"" << top + plot_h - h
        << "\" width=\"" << bar_w * 0.9 << "\" height=\"" << h << "\" fill=\"" << palette[b % 8]
        << "\"/>\n";
    }
    o << "<text x=\"" << gx + group_w * 0.4 << "\" y=\"" << top + plot_h + 18
      << "\" text-anchor=\"middle\">" << kNoiseTypes[t] << "</text>\n";
  }
  for (size_t b = 0; b < n_bars; ++b) {
    double y = top + 14.0 * static_cast<double>(b);
    o << "<rect x=\"" << width - right + 10 << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
      << palette[b % 8] << "\"/>\n";
    o << "<text x=\"" << width - right + 25 << "\" y=\"" << y + 9 << "\">" << grids[b].meta.mode
      << ", PT: " << grids[b].meta.pt << " (" << grids[b].meta.ft << ")</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string EvalConfig::canonical() const {
  std::string out = "snrs=";
  for (double s : snrs) out += snr_label(s) + ",";
  out += "\ntypes=" + join(types, ",") + "\nseed=" + std::to_string(seed) +
         "\nmax_len=" + std::to_string(max_len) + "\nmax_utts=" + std::to_string(max_utterances) + "\n";
  return out;
}

Recognizer greedy_recognizer(const model::Checkpoint& ckpt, model::ModalityMode mode, int max_len) {
  return [&ckpt, mode, max_len](const corpus::Example& ex, const Mat& audio) {
    return model::greedy_decode(ckpt.params, ckpt.arch, audio, ex.video, mode, max_len);
  };
}

EvalGrid eval_grid(const Recognizer& recognize, const corpus::Dataset& test,
                   const signal::NoiseBank& bank, const EvalConfig& cfg, const GridMeta& meta) {
  size_t n = test.items.size();
  if (cfg.max_utterances > 0) n = std::min(n, cfg.max_utterances);
  if (n == 0) fail(ErrorKind::Config, "evaluation set is empty");

  auto score = [&](const std::function<Mat(size_t)>& input) {
    std::vector<WerCount> counts(n);
    parallel_for(n, [&](size_t i) {
      counts[i] = wer_text(test.items[i].transcript, recognize(test.items[i], input(i)));
    });
    WerCount total;
    for (const auto& c : counts) total += c;
    return 100.0 * total.wer();
  };

  EvalGrid grid;
  grid.meta = meta;
  for (const auto& type : cfg.types) {
    const signal::NoiseCategory cat = signal::parse_category(type);
    const auto clips = bank.select(cat, signal::Partition::Test);
    if (clips.empty())
      fail(ErrorKind::MissingNoiseType, "no test-partition clips of type " + type);
    for (double snr : cfg.snrs) {
      grid.set(type, snr, score([&](size_t i) {
        const corpus::Example& ex = test.items[i];
        const uint64_t s = derive_seed(cfg.seed, {tag(ex.id), tag(type), tag(snr_label(snr))});
        Rng rng = make_rng(s, {tag("clip")});
        const signal::NoiseClip& clip = *clips[uniform_index(rng, clips.size())];
        signal::Waveform mixed = signal::mix_at_snr(corpus::load_audio(ex), clip, snr, s);
        return corpus::audio_features_for(mixed, ex.video.rows(), ex.id);
      }));
    }
  }
  grid.clean = score([&](size_t i) { return test.items[i].clean_audio; });
  return grid;
}

}  // namespace avlab::evaluation
