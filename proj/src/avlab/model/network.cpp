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

#include "avlab/model/network.hpp"

#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/random.hpp"

namespace avlab::model {

const char* modality_name(ModalityMode m) {
  switch (m) {
    case ModalityMode::Both: return "both";
    case ModalityMode::AudioOnly: return "audio_only";
    case ModalityMode::VideoOnly: return "video_only";
  }
  return "?";
}

MaskSpec MaskSpec::none(int frames) {
  MaskSpec m;
  m.masked.assign(static_cast<size_t>(frames), 0);
  return m;
}

size_t MaskSpec::count() const {
  return static_cast<size_t>(std::count(masked.begin(), masked.end(), uint8_t{1}));
}

MaskSpec sample_mask(int frames, double start_prob, int span_len, uint64_t seed) {
  if (frames < 1) fail(ErrorKind::ShapeMismatch, "mask needs at least one frame");
  Rng rng = make_rng(seed, {tag("mask")});
  MaskSpec m = MaskSpec::none(frames);
  for (int t = 0; t < frames; ++t) {
    if (!(uniform01(rng) < start_prob)) continue;
    int end = std::min(frames, t + span_len);
    if (!m.spans.empty() && t <= m.spans.back().second)
      m.spans.back().second = std::max(m.spans.back().second, end);
    else
      m.spans.emplace_back(t, end);
  }
  for (auto [s, e] : m.spans)
    for (int t = s; t < e; ++t) m.masked[static_cast<size_t>(t)] = 1;
  return m;
}

void ModalityDropout::validate() const {
  if (!(p_both >= 0.0 && p_both <= 1.0))
    fail(ErrorKind::Config, "modality dropout p_both must lie in [0, 1]");
}

ModalityMode sample_modality(const ModalityDropout& cfg, uint64_t seed, uint64_t step) {
  cfg.validate();
  Rng rng = make_rng(seed, {tag("modality"), step});
  double u = uniform01(rng);
  if (u < cfg.p_both) return ModalityMode::Both;
  double half = 0.5 * (1.0 - cfg.p_both);
  return u < cfg.p_both + half ? ModalityMode::AudioOnly : ModalityMode::VideoOnly;
}

namespace {

std::string enc_layer(int l) { return "enc.layer" + std::to_string(l); }
std::string dec_layer(int l) { return "dec.layer" + std::to_string(l); }

}  // namespace

EncoderTrace encode(const ParamStore& p, const ArchConfig& cfg, const Mat& audio, const Mat& video,
                    const MaskSpec* mask, ModalityMode mode, Eigen::Index valid_frames) {
  const Eigen::Index t = audio.rows();
  if (video.rows() != t)
    fail(ErrorKind::ShapeMismatch, "audio and video frame counts differ (" +
                                       std::to_string(t) + " vs " + std::to_string(video.rows()) + ")");
  if (audio.cols() != cfg.audio_in_dim || video.cols() != cfg.video_in_dim)
    fail(ErrorKind::ShapeMismatch, "input feature dimensions do not match the architecture");
  if (mask && static_cast<Eigen::Index>(mask->masked.size()) != t)
    fail(ErrorKind::ShapeMismatch, "mask length does not match frame count");
  if (t < 1) fail(ErrorKind::ShapeMismatch, "empty input");

  EncoderTrace tr;
  tr.mode = mode;
  tr.audio_in = mode == ModalityMode::VideoOnly ? Mat::Zero(t, audio.cols()) : audio;
  tr.video_in = mode == ModalityMode::AudioOnly ? Mat::Zero(t, video.cols()) : video;
  tr.masked = mask ? mask->masked : std::vector<uint8_t>(static_cast<size_t>(t), 0);

  const int d = cfg.d_model;
  Mat x(t, d);
  x.leftCols(d / 2).noalias() = tr.audio_in * p.at("enc.audio_proj.w");
  x.rightCols(d / 2).noalias() = tr.video_in * p.at("enc.video_proj.w");
  const Mat& mask_emb = p.at("enc.mask_emb");
  for (Eigen::Index r = 0; r < t; ++r)
    if (tr.masked[static_cast<size_t>(r)]) x.row(r) = mask_emb.row(0);
  x += sinusoidal_positions(t, d);
  tr.hidden.push_back(x);

  const AttentionMask amask{false, valid_frames};
  const size_t layers = static_cast<size_t>(cfg.n_enc_layers);
  tr.ln1.resize(layers);
  tr.ln2.resize(layers);
  tr.attn.resize(layers);
  tr.ffn.resize(layers);
  for (int l = 0; l < cfg.n_enc_layers; ++l) {
    const std::string pre = enc_layer(l);
    const size_t li = static_cast<size_t>(l);
    Mat a = layernorm_forward(x, p.at(pre + ".ln1.g"), p.at(pre + ".ln1.b"), &tr.ln1[li]);
    x += attention_forward(p, pre + ".attn", a, a, amask, cfg.n_heads, &tr.attn[li]);
    Mat f = layernorm_forward(x, p.at(pre + ".ln2.g"), p.at(pre + ".ln2.b"), &tr.ln2[li]);
    x += ffn_forward(p, pre + ".ffn", f, &tr.ffn[li]);
    tr.hidden.push_back(x);
  }
  tr.final = layernorm_forward(x, p.at("enc.ln_f.g"), p.at("enc.ln_f.b"), &tr.ln_f);
  if (p.contains("head.cluster.w")) {
    tr.logits.noalias() = tr.final * p.at("head.cluster.w");
    tr.logits.rowwise() += p.at("head.cluster.b").row(0);
  }
  return tr;
}

void encode_backward(const ParamStore& p, const ArchConfig& cfg, const EncoderTrace& tr,
                     const Mat* dlogits, const Mat* dfinal, GradStore& g) {
  const Eigen::Index t = tr.final.rows();
  const int d = cfg.d_model;
  Mat dfin = Mat::Zero(t, d);
  if (dfinal) dfin += *dfinal;
  if (dlogits) {
    g.at("head.cluster.w").noalias() += tr.final.transpose() * (*dlogits);
    g.at("head.cluster.b").row(0) += dlogits->colwise().sum();
    dfin.noalias() += (*dlogits) * p.at("head.cluster.w").transpose();
  }
  Mat dx = layernorm_backward(dfin, tr.ln_f, p.at("enc.ln_f.g"), g.at("enc.ln_f.g"),
                              g.at("enc.ln_f.b"));
  Mat dq, dkv;
  for (int l = cfg.n_enc_layers - 1; l >= 0; --l) {
    const std::string pre = enc_layer(l);
    const size_t li = static_cast<size_t>(l);
    Mat df = ffn_backward(p, pre + ".ffn", tr.ffn[li], dx, g);
    dx += layernorm_backward(df, tr.ln2[li], p.at(pre + ".ln2.g"), g.at(pre + ".ln2.g"),
                             g.at(pre + ".ln2.b"));
    attention_backward(p, pre + ".attn", tr.attn[li], dx, cfg.n_heads, g, dq, dkv);
    dq += dkv;
    dx += layernorm_backward(dq, tr.ln1[li], p.at(pre + ".ln1.g"), g.at(pre + ".ln1.g"),
                             g.at(pre + ".ln1.b"));
  }
  // Positions are constants; masked rows route to the mask embedding.
  Mat& dmask = g.at("enc.mask_emb");
  for (Eigen::Index r = 0; r < t; ++r) {
    if (tr.masked[static_cast<size_t>(r)]) {
      dmask.row(0) += dx.row(r);
      dx.row(r).setZero();
    }
  }
  g.at("enc.audio_proj.w").noalias() += tr.audio_in.transpose() * dx.leftCols(d / 2);
  g.at("enc.video_proj.w").noalias() += tr.video_in.transpose() * dx.rightCols(d / 2);
}

namespace {

// Cross-attention reads the encoder output with the sinusoidal positions
// added back, so repeated units stay distinguishable by location.
Mat positioned_memory(const Mat& memory) {
  return memory + sinusoidal_positions(memory.rows(), static_cast<int>(memory.cols()));
}

}  // namespace

std::vector<KeyValue> cross_keyvalues(const ParamStore& p, const ArchConfig& cfg,
                                      const Mat& memory) {
  const Mat m = positioned_memory(memory);
  std::vector<KeyValue> out;
  for (int l = 0; l < cfg.n_dec_layers; ++l)
    out.push_back(attention_project_kv(p, dec_layer(l) + ".cross_attn", m));
  return out;
}

DecoderTrace decode_forward(const ParamStore& p, const ArchConfig& cfg, const Mat& memory,
                            std::span<const int> inputs, const std::vector<KeyValue>* cross_kv) {
  const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
  const int d = cfg.d_model;
  DecoderTrace tr;
  tr.inputs.assign(inputs.begin(), inputs.end());
  const Mat& emb = p.at("dec.tok_emb");
  Mat y(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    int tok = inputs[static_cast<size_t>(i)];
    if (tok < 0 || tok >= cfg.vocab_size) fail(ErrorKind::OOVCharacter, "token out of range");
    y.row(i) = emb.row(tok);
  }
  y += sinusoidal_positions(n, d);

  const size_t layers = static_cast<size_t>(cfg.n_dec_layers);
  tr.ln1.resize(layers);
  tr.ln2.resize(layers);
  tr.ln3.resize(layers);
  tr.self_attn.resize(layers);
  tr.cross_attn.resize(layers);
  tr.ffn.resize(layers);
  const AttentionMask causal{true, -1}, open{false, -1};
  const Mat m = cross_kv ? Mat() : positioned_memory(memory);
  for (int l = 0; l < cfg.n_dec_layers; ++l) {
    const std::string pre = dec_layer(l);
    const size_t li = static_cast<size_t>(l);
    Mat a = layernorm_forward(y, p.at(pre + ".ln1.g"), p.at(pre + ".ln1.b"), &tr.ln1[li]);
    y += attention_forward(p, pre + ".self_attn", a, a, causal, cfg.n_heads, &tr.self_attn[li]);
    Mat c = layernorm_forward(y, p.at(pre + ".ln2.g"), p.at(pre + ".ln2.b"), &tr.ln2[li]);
    if (cross_kv)
      y += attention_forward_kv(p, pre + ".cross_attn", c, (*cross_kv)[li], open, cfg.n_heads,
                                &tr.cross_attn[li]);
    else
      y += attention_forward(p, pre + ".cross_attn", c, m, open, cfg.n_heads,
                             &tr.cross_attn[li]);
    Mat f = layernorm_forward(y, p.at(pre + ".ln3.g"), p.at(pre + ".ln3.b"), &tr.ln3[li]);
    y += ffn_forward(p, pre + ".ffn", f, &tr.ffn[li]);
  }
  tr.final = layernorm_forward(y, p.at("dec.ln_f.g"), p.at("dec.ln_f.b"), &tr.ln_f);
  tr.logits.noalias() = tr.final * p.at("dec.out.w");
  tr.logits.rowwise() += p.at("dec.out.b").row(0);
  return tr;
}

Mat decode_backward(const ParamStore& p, const ArchConfig& cfg, const DecoderTrace& tr,
                    const Mat& dlogits, GradStore& g) {
  g.at("dec.out.w").noalias() += tr.final.transpose() * dlogits;
  g.at("dec.out.b").row(0) += dlogits.colwise().sum();
  Mat dfin = dlogits * p.at("dec.out.w").transpose();
  Mat dy = layernorm_backward(dfin, tr.ln_f, p.at("dec.ln_f.g"), g.at("dec.ln_f.g"),
                              g.at("dec.ln_f.b"));
  Mat dmemory;
  Mat dq, dkv;
  for (int l = cfg.n_dec_layers - 1; l >= 0; --l) {
    const std::string pre = dec_layer(l);
    const size_t li = static_cast<size_t>(l);
    Mat df = ffn_backward(p, pre + ".ffn", tr.ffn[li], dy, g);
    dy += layernorm_backward(df, tr.ln3[li], p.at(pre + ".ln3.g"), g.at(pre + ".ln3.g"),
                             g.at(pre + ".ln3.b"));
    attention_backward(p, pre + ".cross_attn", tr.cross_attn[li], dy, cfg.n_heads, g, dq, dkv);
    if (dmemory.size() == 0)
      dmemory = dkv;
    else
      dmemory += dkv;
    dy += layernorm_backward(dq, tr.ln2[li], p.at(pre + ".ln2.g"), g.at(pre + ".ln2.g"),
                             g.at(pre + ".ln2.b"));
    attention_backward(p, pre + ".self_attn", tr.self_attn[li], dy, cfg.n_heads, g, dq, dkv);
    dq += dkv;
    dy += layernorm_backward(dq, tr.ln1[li], p.at(pre + ".ln1.g"), g.at(pre + ".ln1.g"),
                             g.at(pre + ".ln1.b"));
  }
  Mat& demb = g.at("dec.tok_emb");
  for (size_t i = 0; i < tr.inputs.size(); ++i)
    demb.row(tr.inputs[i]) += dy.row(static_cast<Eigen::Index>(i));
  return dmemory;
}

namespace {

CrossEntropy rows_ce(const Mat& logits, std::span<const int> targets,
                     const std::vector<uint8_t>& counted) {
  CrossEntropy out;
  out.counted = counted;
  out.dlogits = Mat::Zero(logits.rows(), logits.cols());
  for (uint8_t c : counted) out.count += c;
  if (out.count == 0) return out;
  const double inv = 1.0 / static_cast<double>(out.count);
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    if (!counted[static_cast<size_t>(r)]) continue;
    const int y = targets[static_cast<size_t>(r)];
    if (y < 0 || y >= logits.cols()) fail(ErrorKind::ShapeMismatch, "target out of range");
    Eigen::Index arg;
    double m = logits.row(r).maxCoeff(&arg);
    RowVec e = (logits.row(r).array() - m).exp();
    double z = e.sum();
    out.loss += (std::log(z) + m - logits(r, y)) * inv;
    out.dlogits.row(r) = e * (inv / z);
    out.dlogits(r, y) -= inv;
    if (arg == y) ++out.correct;
  }
  return out;
}

}  // namespace

CrossEntropy masked_ce_loss(const Mat& logits, std::span<const int> targets, const MaskSpec& mask) {
  if (targets.size() != static_cast<size_t>(logits.rows()) ||
      mask.masked.size() != targets.size())
    fail(ErrorKind::ShapeMismatch, "logits, targets and mask lengths differ");
  return rows_ce(logits, targets, mask.masked);
}

CrossEntropy sequence_ce_loss(const Mat& logits, std::span<const int> targets) {
  if (targets.size() != static_cast<size_t>(logits.rows()))
    fail(ErrorKind::ShapeMismatch, "logits and targets lengths differ");
  return rows_ce(logits, targets, std::vector<uint8_t>(targets.size(), 1));
}

TokenSequences tokenize(const std::string& transcript) {
  if (transcript.empty()) fail(ErrorKind::OOVCharacter, "empty transcript");
  TokenSequences s;
  s.inputs.push_back(kBos);
  for (char c : transcript) {
    int tok = char_to_token(c);
    s.inputs.push_back(tok);
    s.targets.push_back(tok);
  }
  s.targets.push_back(kEos);
  return s;
}

double decode_loss(const ParamStore& p, const ArchConfig& cfg, const Mat& memory,
                   const std::string& transcript) {
  TokenSequences toks = tokenize(transcript);
  DecoderTrace tr = decode_forward(p, cfg, memory, toks.inputs);
  return sequence_ce_loss(tr.logits, toks.targets).loss;
}

namespace {

// Per-example gradients are computed into separate stores and summed in
// example order, so the result is independent of the worker count.
template <typename Fn>
BatchResult reduce_batch(const ParamStore& p, size_t n, GradStore& grads, Fn&& per_example) {
  std::vector<GradStore> local(n);
  std::vector<BatchResult> results(n);
  parallel_for(n, [&](size_t i) {
    local[i] = p.zeros_like();
    results[i] = per_example(i, local[i]);
  });
  size_t total = 0;
  for (const auto& r : results) total += r.count;
  BatchResult out;
  out.count = total;
  if (grads.size() == 0) grads = p.zeros_like();
  if (total == 0) return out;
  for (size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(results[i].count) / static_cast<double>(total);
    out.loss += w * results[i].loss;
    out.correct += results[i].correct;
    if (results[i].count > 0) grads.add_scaled(local[i], w);
  }
  return out;
}

}  // namespace

BatchResult pretrain_backward(const ParamStore& p, const ArchConfig& cfg,
                              std::span<const PretrainExample> batch, GradStore& grads) {
  return reduce_batch(p, batch.size(), grads, [&](size_t i, GradStore& g) {
    const PretrainExample& ex = batch[i];
    EncoderTrace tr = encode(p, cfg, ex.audio, ex.video, &ex.mask, ex.mode);
    CrossEntropy ce = masked_ce_loss(tr.logits, ex.targets, ex.mask);
    if (ce.count > 0) encode_backward(p, cfg, tr, &ce.dlogits, nullptr, g);
    return BatchResult{ce.loss, ce.count, ce.correct};
  });
}

BatchResult finetune_backward(const ParamStore& p, const ArchConfig& cfg,
                              std::span<const FinetuneExample> batch, GradStore& grads,
                              bool encoder_grads) {
  return reduce_batch(p, batch.size(), grads, [&](size_t i, GradStore& g) {
    const FinetuneExample& ex = batch[i];
    EncoderTrace tr = encode(p, cfg, ex.audio, ex.video, nullptr, ex.mode);
    TokenSequences toks = tokenize(ex.transcript);
    DecoderTrace dt = decode_forward(p, cfg, tr.final, toks.inputs);
    CrossEntropy ce = sequence_ce_loss(dt.logits, toks.targets);
    Mat dmem = decode_backward(p, cfg, dt, ce.dlogits, g);
    if (encoder_grads) encode_backward(p, cfg, tr, nullptr, &dmem, g);
    return BatchResult{ce.loss, ce.count, ce.correct};
  });
}

std::string greedy_decode(const ParamStore& p, const ArchConfig& cfg, const Mat& audio,
                          const Mat& video, ModalityMode mode, int max_len) {
  if (max_len < 1) fail(ErrorKind::Config, "max_len must be >= 1");
  EncoderTrace tr = encode(p, cfg, audio, video, nullptr, mode);
  std::vector<KeyValue> kv = cross_keyvalues(p, cfg, tr.final);
  std::vector<int> tokens{kBos};
  std::string out;
  for (int step = 0; step < max_len; ++step) {
    DecoderTrace dt = decode_forward(p, cfg, tr.final, tokens, &kv);
    auto last = dt.logits.row(dt.logits.rows() - 1);
    int best = kEos;
    for (int v = 1; v < cfg.vocab_size; ++v)
      if (last[v] > last[best]) best = v;
    if (best == kEos) break;
    tokens.push_back(best);
    out.push_back(token_to_char(best));
  }
  return out;
}

}  // namespace avlab::model
