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

#include <cmath>

#include "avlab/common/error.hpp"
#include "avlab/common/random.hpp"
#include "avlab/model/checkpoint.hpp"
#include "avlab/model/gradcheck.hpp"
#include "avlab/model/network.hpp"
#include "avlab/model/params.hpp"
#include "avlab/training/optimizer.hpp"
#include "test_util.hpp"

using namespace avlab;
using namespace avlab::model;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, uint64_t seed, double stddev = 1.0) {
  Rng rng = make_rng(seed, {tag("model-test")});
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gaussian(rng, stddev);
  return m;
}

// Randomizes every tensor so all paths carry signal.
void perturb(ParamStore& p, uint64_t seed) {
  for (auto& [name, m] : p) {
    Rng rng = make_rng(seed, {tag(name)});
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] += gaussian(rng, 0.1);
  }
}

long closed_form_count(const ArchConfig& c, bool head, bool decoder) {
  const long d = c.d_model, ff = c.d_ff, k = c.n_clusters, v = c.vocab_size;
  const long ln = 2 * d, attn = 4 * (d * d + d), ffn = d * ff + ff + ff * d + d;
  long n = c.audio_in_dim * (d / 2) + c.video_in_dim * (d / 2) + d;
  n += c.n_enc_layers * (2 * ln + attn + ffn) + ln;
  if (head) n += d * k + k;
  if (decoder) n += v * d + c.n_dec_layers * (3 * ln + 2 * attn + ffn) + ln + d * v + v;
  return n;
}

}  // namespace

TEST(Params, CountMatchesShapeArithmetic) {
  for (const char* name : {"toy", "toy-small", "base", "large"}) {
    ArchConfig c = preset(name);
    EXPECT_EQ(static_cast<long>(init_params(c, 1).scalar_count()), closed_form_count(c, true, false)) << name;
    EXPECT_EQ(static_cast<long>(init_params(c, 1, {true, false, true}).scalar_count()),
              closed_form_count(c, false, true))
        << name;
  }
}

TEST(Params, InitIsDeterministicAndIndependentOfParts) {
  ArchConfig c = preset("toy");
  ParamStore a = init_params(c, 7), b = init_params(c, 7);
  EXPECT_EQ(a.digest(), b.digest());
  ParamStore with_dec = init_params(c, 7, {true, true, true});
  EXPECT_EQ(with_dec.digest("enc."), a.digest("enc."));
  EXPECT_NE(init_params(c, 8).digest(), a.digest());
}

TEST(Encode, ZeroHeadGivesUniformLogits) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  EncoderTrace t = encode(p, c, Mat::Zero(1, 52), Mat::Zero(1, 8), nullptr, ModalityMode::Both);
  ASSERT_EQ(t.logits.cols(), c.n_clusters);
  for (int j = 1; j < c.n_clusters; ++j) EXPECT_EQ(t.logits(0, j), t.logits(0, 0));
}

TEST(Encode, AudioOnlyEqualsZeroedVideo) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  perturb(p, 1);
  Mat a = random_mat(15, 52, 1), v = random_mat(15, 8, 2);
  MaskSpec m = sample_mask(15, 0.2, 3, 4);
  EncoderTrace t1 = encode(p, c, a, v, &m, ModalityMode::AudioOnly);
  EncoderTrace t2 = encode(p, c, a, Mat::Zero(15, 8), &m, ModalityMode::Both);
  EXPECT_EQ(t1.logits, t2.logits);
  EncoderTrace t3 = encode(p, c, a, v, &m, ModalityMode::VideoOnly);
  EncoderTrace t4 = encode(p, c, Mat::Zero(15, 52), v, &m, ModalityMode::Both);
  EXPECT_EQ(t3.logits, t4.logits);
}

TEST(Encode, AttentionRowsSumToOne) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  perturb(p, 2);
  EncoderTrace t = encode(p, c, random_mat(11, 52, 3), random_mat(11, 8, 4), nullptr, ModalityMode::Both);
  for (const auto& layer : t.attn) {
    ASSERT_EQ(layer.probs.size(), static_cast<size_t>(c.n_heads));
    for (const Mat& pr : layer.probs)
      for (Eigen::Index r = 0; r < pr.rows(); ++r) EXPECT_NEAR(pr.row(r).sum(), 1.0, 1e-6);
  }
}

TEST(Encode, ShapeMismatch) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  try {
    encode(p, c, Mat::Zero(5, 52), Mat::Zero(6, 8), nullptr, ModalityMode::Both);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Mask, Extremes) {
  EXPECT_TRUE(sample_mask(40, 0.0, 10, 1).empty());
  MaskSpec all = sample_mask(40, 1.0, 10, 1);
  EXPECT_EQ(all.count(), 40u);
  ASSERT_EQ(all.spans.size(), 1u);
  EXPECT_EQ(all.spans[0], std::make_pair(0, 40));
}

TEST(Mask, ExpectedFractionMonteCarlo) {
  // Interior frames are covered with probability 1 - (1 - p)^span; use long
  // sequences so the edge effect stays well below the tolerance.
  const int T = 2000;
  double total = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    MaskSpec m = sample_mask(T, 0.08, 10, static_cast<uint64_t>(s));
    total += static_cast<double>(m.count()) / T;
  }
  const double expected = 1.0 - std::pow(1.0 - 0.08, 10);
  EXPECT_NEAR(total / draws, expected, 0.01);
}

TEST(Mask, SpansAreMergedAndConsistent) {
  MaskSpec m = sample_mask(200, 0.15, 7, 9);
  size_t covered = 0;
  for (size_t i = 0; i < m.spans.size(); ++i) {
    EXPECT_LT(m.spans[i].first, m.spans[i].second);
    if (i) EXPECT_LT(m.spans[i - 1].second, m.spans[i].first);
    covered += static_cast<size_t>(m.spans[i].second - m.spans[i].first);
  }
  EXPECT_EQ(covered, m.count());
}

TEST(Modality, Frequencies) {
  ModalityDropout always;
  always.p_both = 1.0;
  for (uint64_t s = 0; s < 500; ++s) EXPECT_EQ(sample_modality(always, 3, s), ModalityMode::Both);

  ModalityDropout d;
  std::map<ModalityMode, int> n;
  const int draws = 10000;
  for (uint64_t s = 0; s < draws; ++s) ++n[sample_modality(d, 5, s)];
  EXPECT_NEAR(n[ModalityMode::Both] / double(draws), 0.5, 0.02);
  EXPECT_NEAR(n[ModalityMode::AudioOnly] / double(draws), 0.25, 0.02);
  EXPECT_NEAR(n[ModalityMode::VideoOnly] / double(draws), 0.25, 0.02);
  EXPECT_EQ(sample_modality(d, 5, 17), sample_modality(d, 5, 17));
}

TEST(MaskedLoss, UniformLogitsAndEmptyMask) {
  const int k = 20;
  Mat logits = Mat::Zero(12, k);
  std::vector<int> targets(12);
  for (int i = 0; i < 12; ++i) targets[i] = (i * 7) % k;
  MaskSpec m = sample_mask(12, 0.3, 3, 2);
  ASSERT_FALSE(m.empty());
  CrossEntropy ce = masked_ce_loss(logits, targets, m);
  EXPECT_NEAR(ce.loss, std::log(double(k)), 1e-6);
  CrossEntropy none = masked_ce_loss(logits, targets, MaskSpec::none(12));
  EXPECT_EQ(none.loss, 0.0);
  EXPECT_EQ(none.count, 0u);
}

TEST(MaskedLoss, UnmaskedGradientIsExactlyZero) {
  Mat logits = random_mat(30, 20, 7);
  std::vector<int> targets(30, 3);
  MaskSpec m = sample_mask(30, 0.1, 4, 3);
  CrossEntropy ce = masked_ce_loss(logits, targets, m);
  for (int t = 0; t < 30; ++t) {
    if (m.masked[t]) continue;
    for (int j = 0; j < 20; ++j) EXPECT_EQ(ce.dlogits(t, j), 0.0);
  }
}

TEST(DecodeLoss, ZeroHeadGivesLogVocab) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3, {true, false, true});
  EXPECT_NEAR(decode_loss(p, c, random_mat(9, c.d_model, 1), "ab cd"), std::log(double(kVocabSize)), 1e-6);
}

TEST(DecodeLoss, CausalPerturbation) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3, {true, false, true});
  perturb(p, 5);
  Mat memory = random_mat(9, c.d_model, 2);
  const std::string base = "abcdef";
  TokenSequences tok = tokenize(base);
  DecoderTrace t0 = decode_forward(p, c, memory, tok.inputs);
  for (size_t j = 1; j < tok.inputs.size(); ++j) {
    std::vector<int> changed = tok.inputs;
    changed[j] = changed[j] == 5 ? 6 : 5;
    DecoderTrace t1 = decode_forward(p, c, memory, changed);
    for (size_t i = 0; i < j; ++i)
      for (int v = 0; v < kVocabSize; ++v) EXPECT_EQ(t1.logits(i, v), t0.logits(i, v)) << j << "," << i;
  }
  EXPECT_NE(decode_loss(p, c, memory, "abcdef"), decode_loss(p, c, memory, "fedcba"));
}

TEST(Tokenize, AddsBoundaryTokens) {
  TokenSequences t = tokenize("a b");
  EXPECT_EQ(t.inputs, (std::vector<int>{kBos, 3, kSpace, 4}));
  EXPECT_EQ(t.targets, (std::vector<int>{3, kSpace, 4, kEos}));
  try {
    tokenize("A");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OOVCharacter);
  }
}

TEST(GreedyDecode, EosHeadGivesEmptyTranscript) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3, {true, false, true});
  p.at("dec.out.b")(0, kEos) = 5.0;
  Mat a = random_mat(10, 52, 1), v = random_mat(10, 8, 2);
  EXPECT_EQ(greedy_decode(p, c, a, v, ModalityMode::Both, 50), "");
  perturb(p, 3);
  EXPECT_EQ(greedy_decode(p, c, a, v, ModalityMode::Both, 50), greedy_decode(p, c, a, v, ModalityMode::Both, 50));
}

TEST(GreedyDecode, OverfitsOneUtterance) {
  ArchConfig c = preset("toy-small");
  ParamStore p = init_params(c, 4, {true, false, true});
  FinetuneExample ex{random_mat(12, 52, 5), random_mat(12, 8, 6), ModalityMode::Both, "bad cab"};
  training::AdamConfig adam{3e-3, 10};
  training::AdamState st = training::make_adam_state(p);
  for (long step = 1; step <= 300; ++step) {
    GradStore g;
    finetune_backward(p, c, std::span<const FinetuneExample>(&ex, 1), g);
    training::adam_step(p, g, st, adam, adam.lr_at(step));
  }
  EXPECT_EQ(greedy_decode(p, c, ex.audio, ex.video, ModalityMode::Both, 30), "bad cab");
}

TEST(Backward, FiniteDifferences) {
  GradCheckResult r = gradient_check(preset("toy"), 13, 200);
  EXPECT_GE(r.checked, 200u);
  EXPECT_EQ(r.failed, 0u) << r.worst;
  EXPECT_LE(r.max_rel_error, 1e-4);
  EXPECT_EQ(r.unmasked_grad_max, 0.0);
}

TEST(Backward, DroppedFrontendGetsNoGradient) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  perturb(p, 6);
  std::vector<PretrainExample> batch;
  for (int i = 0; i < 3; ++i) {
    PretrainExample ex;
    ex.audio = random_mat(14, 52, 10 + i);
    ex.video = random_mat(14, 8, 20 + i);
    ex.targets.assign(14, i + 1);
    ex.mask = sample_mask(14, 0.3, 4, static_cast<uint64_t>(i));
    ex.mode = ModalityMode::AudioOnly;
    batch.push_back(ex);
  }
  GradStore g;
  pretrain_backward(p, c, batch, g);
  EXPECT_EQ(g.at("enc.video_proj.w").cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(g.at("enc.audio_proj.w").cwiseAbs().maxCoeff(), 0.0);
  for (auto& ex : batch) ex.mode = ModalityMode::VideoOnly;
  GradStore g2;
  pretrain_backward(p, c, batch, g2);
  EXPECT_EQ(g2.at("enc.audio_proj.w").cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, GradientsScaleWithTheLoss) {
  ArchConfig c = preset("toy");
  ParamStore p = init_params(c, 3);
  perturb(p, 7);
  MaskSpec m = sample_mask(10, 0.3, 3, 1);
  EncoderTrace t = encode(p, c, random_mat(10, 52, 1), random_mat(10, 8, 2), &m, ModalityMode::Both);
  std::vector<int> targets(10, 4);
  CrossEntropy ce = masked_ce_loss(t.logits, targets, m);
  GradStore g1 = p.zeros_like(), g2 = p.zeros_like();
  encode_backward(p, c, t, &ce.dlogits, nullptr, g1);
  Mat scaled = 3.5 * ce.dlogits;
  encode_backward(p, c, t, &scaled, nullptr, g2);
  for (const auto& [name, m1] : g1) {
    const Mat& m2 = g2.at(name);
    for (Eigen::Index i = 0; i < m1.size(); ++i) EXPECT_NEAR(m2.data()[i], 3.5 * m1.data()[i], 1e-9) << name;
  }
}

TEST(Checkpoint, RoundTripAndCorruption) {
  testutil::TempDir dir;
  Checkpoint ck;
  ck.arch = preset("toy-small");
  ck.params = init_params(ck.arch, 9, {true, true, true});
  perturb(ck.params, 1);
  ck.params.round_to_f32();
  ck.meta = {{"kind", "finetune"}, {"mode", "AV"}};
  save_checkpoint(dir.str("m.avck"), ck);
  Checkpoint back = load_checkpoint(dir.str("m.avck"));
  EXPECT_EQ(back.params.digest(), ck.params.digest());
  EXPECT_EQ(back.meta, ck.meta);
  EXPECT_EQ(back.arch.d_model, ck.arch.d_model);
  EXPECT_EQ(back.arch.preset, "toy-small");
  for (const auto& [name, m] : ck.params) EXPECT_EQ(back.params.at(name), m) << name;

  auto bytes = encode_checkpoint(ck);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  try {
    decode_checkpoint(flipped, "flipped");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Checksum);
  }
  auto truncated = bytes;
  truncated.resize(10);
  try {
    decode_checkpoint(truncated, "truncated");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Data);
  }
  ck.meta["arch.bad"] = "x";
  EXPECT_THROW(encode_checkpoint(ck), Error);
}
