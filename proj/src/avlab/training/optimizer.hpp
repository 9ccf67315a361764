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

#include <functional>
#include <string>

#include "avlab/model/params.hpp"

namespace avlab::training {

struct AdamConfig {
  double lr = 1e-3;  // peak learning rate
  int warmup = 100;  // steps of linear warmup before inverse-sqrt decay
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double clip_norm = 1.0;

  void validate() const;
  // lr * min(t / warmup, sqrt(warmup / t)) for 1-based step t.
  double lr_at(long step) const;
};

struct AdamState {
  model::ParamStore m, v;
  long step = 0;  // completed updates
};

AdamState make_adam_state(const model::ParamStore& params);

// Scales grads in place so their global L2 norm is at most max_norm.
// Returns the applied factor (1 when no clipping happened).
double clip_global_norm(model::GradStore& grads, double max_norm);

// Clips, then applies one bias-corrected Adam update at learning rate lr.
// Parameters for which frozen(name) is true keep their values and moments.
void adam_step(model::ParamStore& params, model::GradStore& grads, AdamState& state,
               const AdamConfig& cfg, double lr,
               const std::function<bool(const std::string&)>& frozen = {});

}  // namespace avlab::training
