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

#include "avlab/model/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "avlab/common/random.hpp"
#include "avlab/model/network.hpp"
#include "avlab/model/params.hpp"

namespace avlab::model {

namespace {

struct Problem {
  ArchConfig arch;
  PretrainExample pre;
  FinetuneExample fin;
};

double total_loss(const ParamStore& p, const Problem& pb) {
  EncoderTrace tr = encode(p, pb.arch, pb.pre.audio, pb.pre.video, &pb.pre.mask, pb.pre.mode);
  double l = masked_ce_loss(tr.logits, pb.pre.targets, pb.pre.mask).loss;
  EncoderTrace tf = encode(p, pb.arch, pb.fin.audio, pb.fin.video, nullptr, pb.fin.mode);
  return l + decode_loss(p, pb.arch, tf.final, pb.fin.transcript);
}

}  // namespace

GradCheckResult gradient_check(const ArchConfig& arch, uint64_t seed, size_t n_coords, double h,
                               double tol, double floor) {
  Problem pb{arch, {}, {}};
  ParamStore p = init_params(arch, seed, {true, true, true});
  Rng rng = make_rng(seed, {tag("gradcheck")});
  // Perturb every tensor so heads, biases and layer-norm offsets are active.
  for (auto& [name, t] : p) {
    const bool head = name.rfind("head.", 0) == 0 || name.rfind("dec.out.", 0) == 0;
    const bool ln = name.find(".ln") != std::string::npos;
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t.data()[i] += gaussian(rng, head ? 0.2 : ln ? 0.1 : 0.02);
  }
  const int frames = 12;
  auto random_mat = [&](Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gaussian(rng);
    return m;
  };
  pb.pre.audio = random_mat(frames, arch.audio_in_dim);
  pb.pre.video = random_mat(frames, arch.video_in_dim);
  pb.pre.mask = MaskSpec::none(frames);
  for (int t = 2; t < 7; ++t) pb.pre.mask.masked[static_cast<size_t>(t)] = 1;
  pb.pre.mask.spans = {{2, 7}};
  for (int t = 0; t < frames; ++t)
    pb.pre.targets.push_back(static_cast<int>(uniform_index(rng, static_cast<size_t>(arch.n_clusters))));
  pb.pre.mode = ModalityMode::Both;
  pb.fin.audio = random_mat(frames, arch.audio_in_dim);
  pb.fin.video = random_mat(frames, arch.video_in_dim);
  pb.fin.mode = ModalityMode::Both;
  pb.fin.transcript = "a b c";

  GradStore g;
  pretrain_backward(p, arch, std::span<const PretrainExample>(&pb.pre, 1), g);
  finetune_backward(p, arch, std::span<const FinetuneExample>(&pb.fin, 1), g);

  GradCheckResult res;
  {
    EncoderTrace tr = encode(p, arch, pb.pre.audio, pb.pre.video, &pb.pre.mask, pb.pre.mode);
    CrossEntropy ce = masked_ce_loss(tr.logits, pb.pre.targets, pb.pre.mask);
    for (int t = 0; t < frames; ++t)
      if (!pb.pre.mask.masked[static_cast<size_t>(t)])
        res.unmasked_grad_max = std::max(res.unmasked_grad_max, ce.dlogits.row(t).cwiseAbs().maxCoeff());
  }

  // One coordinate per tensor, then uniform over all scalars.
  std::vector<std::pair<std::string, Eigen::Index>> coords;
  std::vector<std::pair<std::string, Eigen::Index>> all_tensors;
  size_t total = 0;
  for (const auto& [name, t] : p) {
    coords.emplace_back(name, static_cast<Eigen::Index>(uniform_index(rng, static_cast<size_t>(t.size()))));
    all_tensors.emplace_back(name, t.size());
    total += static_cast<size_t>(t.size());
  }
  while (coords.size() < n_coords) {
    size_t k = uniform_index(rng, total);
    for (const auto& [name, size] : all_tensors) {
      if (k < static_cast<size_t>(size)) {
        coords.emplace_back(name, static_cast<Eigen::Index>(k));
        break;
      }
      k -= static_cast<size_t>(size);
    }
  }

  for (const auto& [name, idx] : coords) {
    double& x = p.at(name).data()[idx];
    const double saved = x;
    x = saved + h;
    const double up = total_loss(p, pb);
    x = saved - h;
    const double down = total_loss(p, pb);
    x = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double analytic = g.at(name).data()[idx];
    const double rel =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    ++res.checked;
    if (rel > tol) ++res.failed;
    if (rel >= res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst = name + "[" + std::to_string(idx) + "] analytic " + std::to_string(analytic) +
                  " numeric " + std::to_string(numeric);
    }
  }
  return res;
}

}  // namespace avlab::model
