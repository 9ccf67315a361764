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

#include "avlab/clustering/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "avlab/model/network.hpp"

namespace avlab::clustering {

namespace {

double sqdist(const Mat& a, Eigen::Index i, const Mat& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < a.cols(); ++d) {
    double diff = a(i, d) - b(j, d);
    s += diff * diff;
  }
  return s;
}

struct Assignment {
  std::vector<int> label;
  std::vector<double> dist;
  double objective = 0.0;
};

Assignment assign_points(const Mat& points, const Mat& centroids) {
  const size_t n = static_cast<size_t>(points.rows());
  Assignment a;
  a.label.resize(n);
  a.dist.resize(n);
  const size_t chunk = 4096;
  const size_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, [&](size_t c) {
    for (size_t i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i) {
      int best = 0;
      double bd = sqdist(points, static_cast<Eigen::Index>(i), centroids, 0);
      for (Eigen::Index j = 1; j < centroids.rows(); ++j) {
        double d = sqdist(points, static_cast<Eigen::Index>(i), centroids, j);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(j);
        }
      }
      a.label[i] = best;
      a.dist[i] = bd;
    }
  });
  for (double d : a.dist) a.objective += d;
  a.objective /= static_cast<double>(n);
  return a;
}

void require_distinct(const Mat& points, int k) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < points.rows() && static_cast<int>(seen.size()) < k; ++i)
    seen.insert(std::vector<double>(points.row(i).data(), points.row(i).data() + points.cols()));
  if (static_cast<int>(seen.size()) < k)
    fail(ErrorKind::TooFewPoints, "k-means needs at least " + std::to_string(k) +
                                      " distinct points, got " + std::to_string(seen.size()));
}

Mat kmeanspp_init(const Mat& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Mat c(k, points.cols());
  c.row(0) = points.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<size_t>(n))));
  std::vector<double> d2(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<size_t>(i)] = sqdist(points, i, c, 0);
  for (int j = 1; j < k; ++j) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      double u = uniform01(rng) * total, acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<size_t>(i)];
        if (u < acc && d2[static_cast<size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave u beyond the last positive weight.
      if (d2[static_cast<size_t>(pick)] == 0.0)
        for (Eigen::Index i = n - 1; i >= 0; --i)
          if (d2[static_cast<size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
    }
    c.row(j) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<size_t>(i)] = std::min(d2[static_cast<size_t>(i)], sqdist(points, i, c, j));
  }
  return c;
}

KMeansResult lloyd(const Mat& points, Mat centroids, const KMeansOptions& opt) {
  const Eigen::Index n = points.rows(), k = centroids.rows(), dim = points.cols();
  KMeansResult r;
  Assignment a = assign_points(points, centroids);
  r.history.push_back(a.objective);
  for (int it = 0; it < opt.max_iters; ++it) {
    Mat sums = Mat::Zero(k, dim);
    std::vector<size_t> counts(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(a.label[static_cast<size_t>(i)]) += points.row(i);
      ++counts[static_cast<size_t>(a.label[static_cast<size_t>(i)])];
    }
    Mat next = centroids;
    std::vector<Eigen::Index> empty;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (counts[static_cast<size_t>(j)] > 0)
        next.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<size_t>(j)]);
      else
        empty.push_back(j);
    }
    // Empty clusters take the points farthest from their current centroid.
    if (!empty.empty()) {
      std::vector<Eigen::Index> order(static_cast<size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return a.dist[static_cast<size_t>(x)] > a.dist[static_cast<size_t>(y)];
      });
      size_t next_pick = 0;
      for (Eigen::Index j : empty) {
        next.row(j) = points.row(order[next_pick]);
        ++next_pick;
      }
    }
    double moved = 0.0;
    for (Eigen::Index j = 0; j < k; ++j)
      moved = std::max(moved, std::sqrt(sqdist(next, j, centroids, j)));
    centroids = next;
    Assignment b = assign_points(points, centroids);
    const double prev = r.history.back();
    if (b.objective > prev + 1e-12 * std::max(1.0, prev))
      fail(ErrorKind::Numerical, "k-means objective increased (" + std::to_string(prev) + " -> " +
                                     std::to_string(b.objective) + ")");
    r.history.push_back(b.objective);
    a = std::move(b);
    r.iterations = it + 1;
    if (moved < opt.tolerance) break;
  }
  r.codebook.centroids = centroids;
  r.objective = a.objective;
  return r;
}

}  // namespace

KMeansResult kmeans_fit(const Mat& points, int k, uint64_t seed, const KMeansOptions& opt) {
  if (k < 1) fail(ErrorKind::Config, "k must be >= 1");
  if (points.rows() < k)
    fail(ErrorKind::TooFewPoints, "k-means needs at least k points");
  if (!points.allFinite()) fail(ErrorKind::Numerical, "non-finite k-means input");
  require_distinct(points, k);
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Rng rng = make_rng(seed, {tag("kmeans++"), static_cast<uint64_t>(r)});
    KMeansResult cand = lloyd(points, kmeanspp_init(points, k, rng), opt);
    if (!have || cand.objective < best.objective) {
      best = std::move(cand);
      have = true;
    }
  }
  best.codebook.seed = seed;
  return best;
}

std::vector<int> assign(const Codebook& cb, const Mat& frames) {
  if (frames.cols() != cb.dim())
    fail(ErrorKind::DimMismatch, "feature dimension " + std::to_string(frames.cols()) +
                                     " != codebook dimension " + std::to_string(cb.dim()));
  if (frames.rows() == 0) return {};
  return assign_points(frames, cb.centroids).label;
}

double mean_squared_distance(const Codebook& cb, const Mat& points) {
  if (points.cols() != cb.dim()) fail(ErrorKind::DimMismatch, "dimension mismatch");
  return assign_points(points, cb.centroids).objective;
}

double purity(const LabelMap& labels, const std::map<std::string, std::vector<int>>& symbols) {
  std::map<int, std::map<int, size_t>> table;
  size_t total = 0;
  for (const auto& [id, lab] : labels) {
    auto it = symbols.find(id);
    if (it == symbols.end()) fail(ErrorKind::Format, "no symbols for " + id);
    if (it->second.size() != lab.size()) fail(ErrorKind::ShapeMismatch, id + ": length mismatch");
    for (size_t t = 0; t < lab.size(); ++t) ++table[lab[t]][it->second[t]];
    total += lab.size();
  }
  if (total == 0) return 0.0;
  size_t hits = 0;
  for (const auto& [cluster, counts] : table) {
    size_t best = 0;
    for (const auto& [sym, c] : counts) best = std::max(best, c);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

Mat collect_frames(const std::vector<const Mat*>& sequences, size_t max_frames, uint64_t seed) {
  size_t total = 0;
  Eigen::Index dim = 0;
  for (const Mat* m : sequences) {
    total += static_cast<size_t>(m->rows());
    dim = m->cols();
  }
  std::vector<size_t> keep;
  if (total > max_frames) {
    std::vector<size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = make_rng(seed, {tag("subsample")});
    // Partial Fisher-Yates picks max_frames distinct indices.
    for (size_t i = 0; i < max_frames; ++i)
      std::swap(idx[i], idx[i + uniform_index(rng, total - i)]);
    keep.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(max_frames));
    std::sort(keep.begin(), keep.end());
  }
  const size_t out_rows = keep.empty() ? total : keep.size();
  Mat out(static_cast<Eigen::Index>(out_rows), dim);
  size_t global = 0, row = 0, kp = 0;
  for (const Mat* m : sequences) {
    for (Eigen::Index t = 0; t < m->rows(); ++t, ++global) {
      if (!keep.empty()) {
        if (kp >= keep.size() || keep[kp] != global) continue;
        ++kp;
      }
      out.row(static_cast<Eigen::Index>(row++)) = m->row(t);
    }
  }
  return out;
}

Codebook fit_mfcc_codebook(const corpus::Dataset& ds, int k, uint64_t seed,
                           const KMeansOptions& opt) {
  std::vector<const Mat*> seqs;
  for (const auto& ex : ds.items) seqs.push_back(&ex.clean_audio);
  Mat frames = collect_frames(seqs, kMaxFitFrames, seed);
  Codebook cb = kmeans_fit(frames, k, seed, opt).codebook;
  cb.source = "mfcc";
  return cb;
}

Mat encoder_features(const model::Checkpoint& ckpt, int layer, const Mat& audio,
                     const Mat& video) {
  if (layer < 0 || layer >= ckpt.arch.n_enc_layers)
    fail(ErrorKind::Config, "feature layer " + std::to_string(layer) + " outside encoder depth " +
                                std::to_string(ckpt.arch.n_enc_layers));
  model::EncoderTrace tr =
      model::encode(ckpt.params, ckpt.arch, audio, video, nullptr, model::ModalityMode::Both);
  return tr.hidden[static_cast<size_t>(layer) + 1];
}

std::string hidden_source(int layer, int iteration) {
  return "hidden(layer=" + std::to_string(layer) + ",iteration=" + std::to_string(iteration) + ")";
}

Codebook refit_from_encoder(const model::Checkpoint& ckpt, int layer, const corpus::Dataset& ds,
                            int k, uint64_t seed, int iteration, const KMeansOptions& opt) {
  if (ds.items.empty()) fail(ErrorKind::Config, "refit needs a non-empty manifest");
  std::vector<Mat> feats(ds.items.size());
  parallel_for(ds.items.size(), [&](size_t i) {
    feats[i] = encoder_features(ckpt, layer, ds.items[i].clean_audio, ds.items[i].video);
  });
  std::vector<const Mat*> seqs;
  for (const auto& f : feats) seqs.push_back(&f);
  Mat frames = collect_frames(seqs, kMaxFitFrames, seed);
  Codebook cb = kmeans_fit(frames, k, seed, opt).codebook;
  cb.source = hidden_source(layer, iteration);
  return cb;
}

LabelMap label_mfcc(const Codebook& cb, const corpus::Dataset& ds) {
  std::vector<std::vector<int>> out(ds.items.size());
  parallel_for(ds.items.size(), [&](size_t i) { out[i] = assign(cb, ds.items[i].clean_audio); });
  LabelMap m;
  for (size_t i = 0; i < out.size(); ++i) m.emplace(ds.items[i].id, std::move(out[i]));
  return m;
}

LabelMap label_encoder(const Codebook& cb, const model::Checkpoint& ckpt, int layer,
                       const corpus::Dataset& ds) {
  std::vector<std::vector<int>> out(ds.items.size());
  parallel_for(ds.items.size(), [&](size_t i) {
    out[i] = assign(cb, encoder_features(ckpt, layer, ds.items[i].clean_audio, ds.items[i].video));
  });
  LabelMap m;
  for (size_t i = 0; i < out.size(); ++i) m.emplace(ds.items[i].id, std::move(out[i]));
  return m;
}

void write_codebook(const std::string& path, const Codebook& cb) {
  ByteWriter w;
  w.magic("KMC1");
  w.u32(static_cast<uint32_t>(cb.k()));
  w.u32(static_cast<uint32_t>(cb.dim()));
  for (Eigen::Index i = 0; i < cb.centroids.size(); ++i)
    w.f32(static_cast<float>(cb.centroids.data()[i]));
  w.str(cb.source + ";seed=" + std::to_string(cb.seed));
  write_file_bytes(path, w.data());
}

Codebook read_codebook(const std::string& path) {
  std::vector<unsigned char> bytes = read_file_bytes(path);
  ByteReader r(bytes.data(), bytes.size(), path);
  r.expect_magic("KMC1");
  uint32_t k = r.u32(), d = r.u32();
  if (static_cast<size_t>(k) * d * 4 > r.remaining()) fail(ErrorKind::Format, path + ": truncated");
  Codebook cb;
  cb.centroids.resize(k, d);
  for (Eigen::Index i = 0; i < cb.centroids.size(); ++i) cb.centroids.data()[i] = r.f32();
  std::string desc = r.str();
  size_t semi = desc.rfind(";seed=");
  if (semi == std::string::npos) fail(ErrorKind::Format, path + ": bad source descriptor");
  cb.source = desc.substr(0, semi);
  cb.seed = std::stoull(desc.substr(semi + 6));
  return cb;
}

void write_labels(const std::string& path, const LabelMap& labels) {
  std::string out;
  for (const auto& [id, lab] : labels) {
    out += id + '\t';
    for (size_t i = 0; i < lab.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(lab[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

LabelMap read_labels(const std::string& path) { return corpus::read_symbols(path); }

}  // namespace avlab::clustering
