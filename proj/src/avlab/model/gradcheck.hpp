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
#include <string>

#include "avlab/model/arch.hpp"

namespace avlab::model {

struct GradCheckResult {
  size_t checked = 0;
  size_t failed = 0;
  double max_rel_error = 0.0;
  std::string worst;       // coordinate with the largest relative error
  double unmasked_grad_max = 0.0;  // max |dL/dlogit| over unmasked frames
};

// Central finite differences on the combined masked-prediction + decoder
// loss of one random example, for n_coords coordinates (at least one per
// tensor). Heads are given random weights so every path carries gradient.
// rel = |analytic - numeric| / max(|analytic|, |numeric|, floor).
GradCheckResult gradient_check(const ArchConfig& arch, uint64_t seed, size_t n_coords,
                               double h = 1e-4, double tol = 1e-4, double floor = 1e-6);

}  // namespace avlab::model
