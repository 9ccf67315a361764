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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avlab/corpus/corpus.hpp"
#include "avlab/evaluation/evaluation.hpp"
#include "avlab/training/experiment_file.hpp"
#include "avlab/training/training.hpp"

namespace avlab::runner {

inline const std::vector<std::string> kCommands = {"gen-data", "gen-noise", "pretrain", "cluster",
                                                   "finetune", "eval",      "report",   "verify",
                                                   "experiment"};

struct Options {
  std::string command;
  std::string config;  // empty: built-in defaults
  std::optional<uint64_t> seed;
  std::string out;     // empty: avlab-out, and no header for read-only commands
  std::string fixtures;
  bool dry_run = false;
  bool plot = false;
};

struct Sinks {
  std::function<void(const std::string&)> out;  // results, one call per line
  std::function<void(const std::string&)> log;  // progress and diagnostics
};

// Fully resolved configuration of one run.
struct Plan {
  training::ExperimentFile file;
  uint64_t seed = 0;
  corpus::CorpusSpec corpus;
  corpus::NoiseCorpusSpec noise;
  std::string data_dir;
  training::PretrainConfig pretrain;
  std::vector<std::string> pts;             // subset of none, clean, noisy
  std::vector<training::InputMode> modes;
  std::vector<training::FinetuneConfig> finetunes;
  evaluation::EvalConfig eval;
  std::string eval_split = "test";

  std::string canonical() const;
  std::string hash() const;
  std::string data_key() const;
};

Plan load_plan(const Options& opt);

// PT label used in reports ("None", "Clean", "Noisy").
std::string pt_label(const std::string& pt);

struct ExperimentStats {
  int pretrain_runs = 0;
  int finetune_runs = 0;
  int eval_runs = 0;
  long training_steps = 0;
};

struct ExperimentResult {
  std::vector<evaluation::EvalGrid> grids;
  std::string corpus_hash;
  ExperimentStats stats;
};

// Runs or reuses every (PT, FT, mode) cell; writes report files under out.
ExperimentResult run_experiment(const Plan& plan, const std::string& out, bool plot,
                                const Sinks& sinks);

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Invariant suite behind `verify`.
std::vector<CheckOutcome> verify_suite(const std::string& fixtures_dir);

// Executes one command. Throws avlab::Error on failure.
void run(const Options& opt, const Sinks& sinks);

std::string version_string();

}  // namespace avlab::runner
