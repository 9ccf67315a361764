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

#include "avlab/model/params.hpp"

#include <cmath>

#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/random.hpp"

namespace avlab::model {

Mat& ParamStore::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  auto [it, inserted] = tensors_.emplace(name, Mat::Zero(rows, cols));
  if (!inserted) fail(ErrorKind::ShapeMismatch, "duplicate parameter " + name);
  return it->second;
}

Mat& ParamStore::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) fail(ErrorKind::ShapeMismatch, "missing parameter " + name);
  return it->second;
}

const Mat& ParamStore::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) fail(ErrorKind::ShapeMismatch, "missing parameter " + name);
  return it->second;
}

void ParamStore::erase_prefix(const std::string& prefix) {
  for (auto it = tensors_.begin(); it != tensors_.end();) {
    if (it->first.rfind(prefix, 0) == 0)
      it = tensors_.erase(it);
    else
      ++it;
  }
}

size_t ParamStore::scalar_count() const {
  size_t n = 0;
  for (const auto& [name, t] : tensors_) n += static_cast<size_t>(t.size());
  return n;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore out;
  for (const auto& [name, t] : tensors_) out.tensors_.emplace(name, Mat::Zero(t.rows(), t.cols()));
  return out;
}

void ParamStore::set_zero() {
  for (auto& [name, t] : tensors_) t.setZero();
}

void ParamStore::add_scaled(const ParamStore& other, double scale) {
  for (auto& [name, t] : tensors_) {
    auto it = other.tensors_.find(name);
    if (it == other.tensors_.end()) continue;
    t += scale * it->second;
  }
}

double ParamStore::squared_norm() const {
  double acc = 0.0;
  for (const auto& [name, t] : tensors_) acc += t.squaredNorm();
  return acc;
}

bool ParamStore::all_finite() const {
  for (const auto& [name, t] : tensors_)
    if (!t.allFinite()) return false;
  return true;
}

void ParamStore::round_to_f32() {
  for (auto& [name, t] : tensors_)
    t = t.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
}

std::string ParamStore::digest(const std::string& prefix) const {
  std::string buf;
  for (const auto& [name, t] : tensors_) {
    if (name.rfind(prefix, 0) != 0) continue;
    buf += name;
    buf += std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + ";";
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      float f = static_cast<float>(t.data()[i]);
      buf.append(reinterpret_cast<const char*>(&f), sizeof f);
    }
  }
  return short_hash(buf);
}

namespace {

constexpr double kInitStd = 0.02;

void gaussian_fill(Mat& m, uint64_t seed, const std::string& name, double stddev) {
  Rng rng = make_rng(seed, {tag("init"), tag(name)});
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gaussian(rng, stddev);
}

void add_weight(ParamStore& s, uint64_t seed, const std::string& name, Eigen::Index r,
                Eigen::Index c, double stddev = kInitStd) {
  gaussian_fill(s.add(name, r, c), seed, name, stddev);
}

void add_layernorm(ParamStore& s, const std::string& p, int d) {
  s.add(p + ".g", 1, d).setOnes();
  s.add(p + ".b", 1, d);
}

void add_attention(ParamStore& s, uint64_t seed, const std::string& p, int d) {
  for (const char* m : {"q", "k", "v", "o"}) {
    add_weight(s, seed, p + ".w" + m, d, d);
    s.add(p + ".b" + m, 1, d);
  }
}

void add_ffn(ParamStore& s, uint64_t seed, const std::string& p, int d, int ff) {
  add_weight(s, seed, p + ".w1", d, ff);
  s.add(p + ".b1", 1, ff);
  add_weight(s, seed, p + ".w2", ff, d);
  s.add(p + ".b2", 1, d);
}

}  // namespace

void init_parts(ParamStore& s, const ArchConfig& cfg, uint64_t seed, InitParts parts) {
  cfg.validate();
  const int d = cfg.d_model;
  if (parts.encoder) {
    // Frontends and embeddings start at unit output scale, level with the
    // sinusoidal positions.
    add_weight(s, seed, "enc.audio_proj.w", cfg.audio_in_dim, d / 2,
               1.0 / std::sqrt(static_cast<double>(cfg.audio_in_dim)));
    add_weight(s, seed, "enc.video_proj.w", cfg.video_in_dim, d / 2,
               1.0 / std::sqrt(static_cast<double>(cfg.video_in_dim)));
    add_weight(s, seed, "enc.mask_emb", 1, d, 1.0);
    for (int l = 0; l < cfg.n_enc_layers; ++l) {
      std::string p = "enc.layer" + std::to_string(l);
      add_layernorm(s, p + ".ln1", d);
      add_attention(s, seed, p + ".attn", d);
      add_layernorm(s, p + ".ln2", d);
      add_ffn(s, seed, p + ".ffn", d, cfg.d_ff);
    }
    add_layernorm(s, "enc.ln_f", d);
  }
  if (parts.cluster_head) {
    s.add("head.cluster.w", d, cfg.n_clusters);
    s.add("head.cluster.b", 1, cfg.n_clusters);
  }
  if (parts.decoder) {
    add_weight(s, seed, "dec.tok_emb", cfg.vocab_size, d, 1.0);
    for (int l = 0; l < cfg.n_dec_layers; ++l) {
      std::string p = "dec.layer" + std::to_string(l);
      add_layernorm(s, p + ".ln1", d);
      add_attention(s, seed, p + ".self_attn", d);
      add_layernorm(s, p + ".ln2", d);
      add_attention(s, seed, p + ".cross_attn", d);
      add_layernorm(s, p + ".ln3", d);
      add_ffn(s, seed, p + ".ffn", d, cfg.d_ff);
    }
    add_layernorm(s, "dec.ln_f", d);
    s.add("dec.out.w", d, cfg.vocab_size);
    s.add("dec.out.b", 1, cfg.vocab_size);
  }
}

ParamStore init_params(const ArchConfig& cfg, uint64_t seed, InitParts parts) {
  ParamStore s;
  init_parts(s, cfg, seed, parts);
  return s;
}

bool is_encoder_param(const std::string& name) { return name.rfind("enc.", 0) == 0; }

}  // namespace avlab::model
