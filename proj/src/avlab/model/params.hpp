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
#include <map>
#include <string>
#include <vector>

#include "avlab/common/matrix.hpp"
#include "avlab/model/arch.hpp"

namespace avlab::model {

// Named tensors. Iteration order (and therefore serialization order) is the
// lexicographic order of names.
class ParamStore {
 public:
  Mat& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  void erase_prefix(const std::string& prefix);
  void set(const std::string& name, Mat value) { tensors_[name] = std::move(value); }

  size_t size() const { return tensors_.size(); }
  size_t scalar_count() const;
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }
  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }

  // Same names and shapes, all zeros.
  ParamStore zeros_like() const;
  void set_zero();
  void add_scaled(const ParamStore& other, double scale);
  double squared_norm() const;
  bool all_finite() const;
  // Rounds every value to float precision (the checkpoint storage type).
  void round_to_f32();
  // Digest over names, shapes and f32-rounded values.
  std::string digest(const std::string& prefix = "") const;

 private:
  std::map<std::string, Mat> tensors_;
};

using GradStore = ParamStore;

struct InitParts {
  bool encoder = true;
  bool cluster_head = true;
  bool decoder = false;
};

// Gaussian(0, 0.02) weights, unit layer-norm scales, zero offsets/biases,
// zero cluster-head and output-head weights. Each tensor draws from its own
// stream keyed by name, so adding parts never shifts other tensors.
ParamStore init_params(const ArchConfig& cfg, uint64_t seed, InitParts parts = {});

// Adds the named parts to an existing store.
void init_parts(ParamStore& store, const ArchConfig& cfg, uint64_t seed, InitParts parts);

bool is_encoder_param(const std::string& name);

}  // namespace avlab::model
