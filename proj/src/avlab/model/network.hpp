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
#include <utility>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/model/arch.hpp"
#include "avlab/model/layers.hpp"
#include "avlab/model/params.hpp"

namespace avlab::model {

enum class ModalityMode { Both, AudioOnly, VideoOnly };
const char* modality_name(ModalityMode m);

struct MaskSpec {
  std::vector<uint8_t> masked;               // one flag per 25 Hz frame
  std::vector<std::pair<int, int>> spans;    // merged [start, end)

  static MaskSpec none(int frames);
  size_t count() const;
  bool empty() const { return count() == 0; }
};

// Every frame independently starts a span of span_len frames with
// probability start_prob; spans are clipped at the end and merged.
MaskSpec sample_mask(int frames, double start_prob, int span_len, uint64_t seed);

struct ModalityDropout {
  double p_both = 0.5;  // the remainder is split evenly between audio-only and video-only
  void validate() const;
};

ModalityMode sample_modality(const ModalityDropout& cfg, uint64_t seed, uint64_t step);

struct EncoderTrace {
  ModalityMode mode = ModalityMode::Both;
  Mat audio_in, video_in;  // after modality zeroing
  std::vector<uint8_t> masked;
  std::vector<Mat> hidden;  // [n_enc_layers + 1], hidden[0] is the fused input
  std::vector<LayerNormCache> ln1, ln2;
  std::vector<AttentionCache> attn;
  std::vector<FfnCache> ffn;
  LayerNormCache ln_f;
  Mat final;   // layer-normed top layer, consumed by heads and the decoder
  Mat logits;  // cluster logits; empty when the store has no cluster head
};

// Frontends are bias-free linear maps, so zeroing a modality's features is
// the same as dropping its frontend output. Frames at or beyond valid_frames
// are padding and masked out of attention keys.
EncoderTrace encode(const ParamStore& p, const ArchConfig& cfg, const Mat& audio, const Mat& video,
                    const MaskSpec* mask, ModalityMode mode, Eigen::Index valid_frames = -1);

void encode_backward(const ParamStore& p, const ArchConfig& cfg, const EncoderTrace& trace,
                     const Mat* dlogits, const Mat* dfinal, GradStore& g);

struct DecoderTrace {
  std::vector<int> inputs;
  std::vector<LayerNormCache> ln1, ln2, ln3;
  std::vector<AttentionCache> self_attn, cross_attn;
  std::vector<FfnCache> ffn;
  LayerNormCache ln_f;
  Mat final;
  Mat logits;  // [inputs x vocab]
};

std::vector<KeyValue> cross_keyvalues(const ParamStore& p, const ArchConfig& cfg,
                                      const Mat& memory);

DecoderTrace decode_forward(const ParamStore& p, const ArchConfig& cfg, const Mat& memory,
                            std::span<const int> inputs,
                            const std::vector<KeyValue>* cross_kv = nullptr);

// Returns the gradient with respect to the memory.
Mat decode_backward(const ParamStore& p, const ArchConfig& cfg, const DecoderTrace& trace,
                    const Mat& dlogits, GradStore& g);

struct CrossEntropy {
  double loss = 0.0;         // mean over counted rows
  size_t count = 0;
  Mat dlogits;               // gradient of the mean loss
  std::vector<uint8_t> counted;
  size_t correct = 0;        // argmax hits among counted rows
};

// Mean cross-entropy over masked frames only. An empty mask gives zero loss
// and an all-zero gradient.
CrossEntropy masked_ce_loss(const Mat& logits, std::span<const int> targets, const MaskSpec& mask);
CrossEntropy sequence_ce_loss(const Mat& logits, std::span<const int> targets);

struct TokenSequences {
  std::vector<int> inputs;   // <s> c1 .. cL
  std::vector<int> targets;  // c1 .. cL </s>
};
TokenSequences tokenize(const std::string& transcript);

// Teacher-forced decoder loss for one utterance given encoder states.
double decode_loss(const ParamStore& p, const ArchConfig& cfg, const Mat& memory,
                   const std::string& transcript);

struct PretrainExample {
  Mat audio, video;
  std::vector<int> targets;
  MaskSpec mask;
  ModalityMode mode = ModalityMode::Both;
};

struct FinetuneExample {
  Mat audio, video;
  ModalityMode mode = ModalityMode::Both;
  std::string transcript;
};

struct BatchResult {
  double loss = 0.0;   // pooled mean over counted frames / tokens
  size_t count = 0;
  size_t correct = 0;
};

// Pooled masked-prediction loss over the batch and its exact gradient.
BatchResult pretrain_backward(const ParamStore& p, const ArchConfig& cfg,
                              std::span<const PretrainExample> batch, GradStore& grads);

// Pooled token-level decoder loss and gradient. With encoder_grads false,
// the encoder is treated as a constant and its gradients are left at zero.
BatchResult finetune_backward(const ParamStore& p, const ArchConfig& cfg,
                              std::span<const FinetuneExample> batch, GradStore& grads,
                              bool encoder_grads = true);

std::string greedy_decode(const ParamStore& p, const ArchConfig& cfg, const Mat& audio,
                          const Mat& video, ModalityMode mode, int max_len);

}  // namespace avlab::model
