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

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avlab.h"

#ifndef AVLAB_FIXTURES_DIR
#define AVLAB_FIXTURES_DIR ""
#endif

namespace {

void print_line(void* stream, const char* line) {
  std::fputs(line, static_cast<FILE*>(stream));
  std::fputc('\n', static_cast<FILE*>(stream));
  std::fflush(static_cast<FILE*>(stream));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> commands = {"gen-data", "gen-noise", "pretrain", "cluster", "finetune",
                                             "eval",     "report",    "verify",   "experiment"};
  CLI::App app{"Noise-augmented audio-visual speech recognition lab"};
  app.set_version_flag("--version", avlab_version());
  std::string command, config, out, fixtures;
  uint64_t seed = 0;
  bool dry_run = false, plot = false;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(commands));
  app.add_option("--config", config, "Experiment file");
  auto* seed_opt = app.add_option("--seed", seed, "Base seed, overrides the experiment file");
  app.add_option("--out", out, "Output directory (default avlab-out)");
  app.add_option("--fixtures", fixtures, "Report source, or verify fixture directory");
  app.add_flag("--dry-run", dry_run, "Validate and print the plan without writing anything");
  app.add_flag("--plot", plot, "Write an SVG chart next to the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "avlab: %s\n", e.what());
    return AVLAB_ERR_USAGE;
  }

  if (command == "verify" && fixtures.empty()) fixtures = AVLAB_FIXTURES_DIR;

  avlab_context* ctx = nullptr;
  if (avlab_context_create(&ctx) != AVLAB_OK) return AVLAB_ERR_INTERNAL;
  avlab_set_output(ctx, print_line, stdout);
  avlab_set_log(ctx, print_line, stderr);

  avlab_run_options opt{};
  opt.command = command.c_str();
  opt.config = config.empty() ? nullptr : config.c_str();
  opt.has_seed = seed_opt->count() > 0;
  opt.seed = seed;
  opt.out = out.empty() ? nullptr : out.c_str();
  opt.fixtures = fixtures.empty() ? nullptr : fixtures.c_str();
  opt.dry_run = dry_run;
  opt.plot = plot;

  const avlab_status st = avlab_run(ctx, &opt);
  if (st != AVLAB_OK) std::fprintf(stderr, "avlab: %s\n", avlab_last_error(ctx));
  avlab_context_destroy(ctx);
  return st;
}
