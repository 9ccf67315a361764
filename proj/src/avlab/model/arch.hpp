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

#include <map>
#include <string>

namespace avlab::model {

struct ArchConfig {
  std::string preset = "toy";
  int d_model = 64;
  int n_heads = 4;
  int n_enc_layers = 3;
  int n_dec_layers = 2;
  int d_ff = 256;
  int audio_in_dim = 52;
  int video_in_dim = 8;
  int n_clusters = 20;
  int vocab_size = 29;

  void validate() const;
  int head_dim() const { return d_model / n_heads; }

  std::map<std::string, std::string> to_kv() const;
  static ArchConfig from_kv(const std::map<std::string, std::string>& kv);
};

// "toy" and "toy-small" are trainable at desk scale; "base" and "large"
// record the reference shapes and are not meant to be trained here.
ArchConfig preset(const std::string& name);

// Character vocabulary: <s>, </s>, space, then 'a'..'z'.
inline constexpr int kBos = 0;
inline constexpr int kEos = 1;
inline constexpr int kSpace = 2;
inline constexpr int kVocabSize = 29;

int char_to_token(char c);  // throws OOVCharacter
char token_to_char(int token);

}  // namespace avlab::model
