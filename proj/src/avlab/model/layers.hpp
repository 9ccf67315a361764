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

#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/model/params.hpp"

namespace avlab::model {

Mat sinusoidal_positions(Eigen::Index length, int d_model);

// Row-wise softmax.
Mat softmax_rows(const Mat& logits);

struct LayerNormCache {
  Mat xhat;
  Eigen::VectorXd rstd;
};

Mat layernorm_forward(const Mat& x, const Mat& gain, const Mat& bias, LayerNormCache* cache);
Mat layernorm_backward(const Mat& dy, const LayerNormCache& cache, const Mat& gain, Mat& dgain,
                       Mat& dbias);

struct AttentionMask {
  bool causal = false;
  Eigen::Index key_valid = -1;  // keys at or beyond this index are masked; -1 = none
};

struct KeyValue {
  Mat k, v;
};

struct AttentionCache {
  Mat xq, xkv;
  Mat q;
  KeyValue kv;
  std::vector<Mat> probs;  // per head, [Tq x Tk]
  Mat context;             // concatenated head outputs, [Tq x d]
};

KeyValue attention_project_kv(const ParamStore& p, const std::string& prefix, const Mat& xkv);

Mat attention_forward(const ParamStore& p, const std::string& prefix, const Mat& xq,
                      const Mat& xkv, const AttentionMask& mask, int n_heads,
                      AttentionCache* cache);
Mat attention_forward_kv(const ParamStore& p, const std::string& prefix, const Mat& xq,
                         const KeyValue& kv, const AttentionMask& mask, int n_heads,
                         AttentionCache* cache);

// Accumulates parameter gradients into g; dxq and dxkv are overwritten.
void attention_backward(const ParamStore& p, const std::string& prefix, const AttentionCache& c,
                        const Mat& dy, int n_heads, GradStore& g, Mat& dxq, Mat& dxkv);

struct FfnCache {
  Mat x, pre, act;
};

Mat ffn_forward(const ParamStore& p, const std::string& prefix, const Mat& x, FfnCache* cache);
Mat ffn_backward(const ParamStore& p, const std::string& prefix, const FfnCache& c, const Mat& dy,
                 GradStore& g);

double gelu(double x);
double gelu_derivative(double x);

}  // namespace avlab::model
