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

#include "avlab/model/arch.hpp"

#include "avlab/common/error.hpp"

namespace avlab::model {

void ArchConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0)
    fail(ErrorKind::Config, "d_model must be a positive multiple of n_heads");
  if (d_model % 2 != 0) fail(ErrorKind::Config, "d_model must be even (half-width frontends)");
  if (n_enc_layers < 1 || n_dec_layers < 1 || d_ff < 1)
    fail(ErrorKind::Config, "layer counts and d_ff must be positive");
  if (audio_in_dim < 1 || video_in_dim < 1 || n_clusters < 1 || vocab_size < 4)
    fail(ErrorKind::Config, "input dims, cluster count and vocabulary must be positive");
}

std::map<std::string, std::string> ArchConfig::to_kv() const {
  return {{"arch.preset", preset},
          {"arch.d_model", std::to_string(d_model)},
          {"arch.n_heads", std::to_string(n_heads)},
          {"arch.n_enc_layers", std::to_string(n_enc_layers)},
          {"arch.n_dec_layers", std::to_string(n_dec_layers)},
          {"arch.d_ff", std::to_string(d_ff)},
          {"arch.audio_in_dim", std::to_string(audio_in_dim)},
          {"arch.video_in_dim", std::to_string(video_in_dim)},
          {"arch.n_clusters", std::to_string(n_clusters)},
          {"arch.vocab_size", std::to_string(vocab_size)}};
}

ArchConfig ArchConfig::from_kv(const std::map<std::string, std::string>& kv) {
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) fail(ErrorKind::Format, "checkpoint is missing " + k);
    return it->second;
  };
  ArchConfig c;
  c.preset = get("arch.preset");
  c.d_model = std::stoi(get("arch.d_model"));
  c.n_heads = std::stoi(get("arch.n_heads"));
  c.n_enc_layers = std::stoi(get("arch.n_enc_layers"));
  c.n_dec_layers = std::stoi(get("arch.n_dec_layers"));
  c.d_ff = std::stoi(get("arch.d_ff"));
  c.audio_in_dim = std::stoi(get("arch.audio_in_dim"));
  c.video_in_dim = std::stoi(get("arch.video_in_dim"));
  c.n_clusters = std::stoi(get("arch.n_clusters"));
  c.vocab_size = std::stoi(get("arch.vocab_size"));
  c.validate();
  return c;
}

ArchConfig preset(const std::string& name) {
  ArchConfig c;
  c.preset = name;
  if (name == "toy") {
    c.d_model = 64; c.n_heads = 4; c.n_enc_layers = 3; c.n_dec_layers = 2; c.d_ff = 256;
  } else if (name == "toy-small") {
    c.d_model = 32; c.n_heads = 4; c.n_enc_layers = 2; c.n_dec_layers = 1; c.d_ff = 128;
  } else if (name == "base") {
    c.d_model = 768; c.n_heads = 12; c.n_enc_layers = 12; c.n_dec_layers = 6; c.d_ff = 3072;
  } else if (name == "large") {
    c.d_model = 1024; c.n_heads = 16; c.n_enc_layers = 24; c.n_dec_layers = 9; c.d_ff = 4096;
  } else {
    fail(ErrorKind::Config, "unknown architecture preset '" + name + "'");
  }
  c.vocab_size = kVocabSize;
  return c;
}

int char_to_token(char c) {
  if (c == ' ') return kSpace;
  if (c >= 'a' && c <= 'z') return 3 + (c - 'a');
  fail(ErrorKind::OOVCharacter, std::string("character '") + c + "' is not in the vocabulary");
}

char token_to_char(int token) {
  if (token == kSpace) return ' ';
  if (token >= 3 && token < kVocabSize) return static_cast<char>('a' + token - 3);
  return '?';
}

}  // namespace avlab::model
