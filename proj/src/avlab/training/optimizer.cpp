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

#include "avlab/training/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "avlab/common/error.hpp"

namespace avlab::training {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) fail(ErrorKind::Config, "lr must be positive");
  if (warmup < 1) fail(ErrorKind::Config, "warmup must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    fail(ErrorKind::Config, "Adam betas must lie in [0, 1)");
  if (!(eps > 0.0) || !(clip_norm > 0.0)) fail(ErrorKind::Config, "eps and clip_norm must be positive");
}

double AdamConfig::lr_at(long step) const {
  const double t = static_cast<double>(std::max(1L, step));
  const double w = static_cast<double>(warmup);
  return lr * std::min(t / w, std::sqrt(w / t));
}

AdamState make_adam_state(const model::ParamStore& params) {
  return AdamState{params.zeros_like(), params.zeros_like(), 0};
}

double clip_global_norm(model::GradStore& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) fail(ErrorKind::NaNLoss, "non-finite gradient norm");
  if (norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (auto& [name, g] : grads) g *= scale;
  return scale;
}

void adam_step(model::ParamStore& params, model::GradStore& grads, AdamState& state,
               const AdamConfig& cfg, double lr,
               const std::function<bool(const std::string&)>& frozen) {
  clip_global_norm(grads, cfg.clip_norm);
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (auto& [name, p] : params) {
    if (frozen && frozen(name)) continue;
    const Mat& g = grads.at(name);
    Mat& m = state.m.at(name);
    Mat& v = state.v.at(name);
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  }
}

}  // namespace avlab::training
