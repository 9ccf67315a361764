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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args) {
  const std::string cmd = std::string(AVLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kFixtures = AVLAB_FIXTURES_DIR;

}  // namespace

TEST(Cli, ReportPrintsSummaryFromFixtures) {
  Result r = run_cli("report --fixtures " + kFixtures + "/reference_grids/large_grids.csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("N-WER"), std::string::npos);
  bool found = false;
  size_t pos = 0;
  while ((pos = r.out.find("LARGE", pos)) != std::string::npos) {
    const size_t end = r.out.find('\n', pos);
    const std::string line = r.out.substr(pos, end - pos);
    if (line.find("433h") != std::string::npos && line.find("Noisy") != std::string::npos)
      found = found || line.substr(line.size() - 3) == "5.8";
    pos = end;
  }
  EXPECT_TRUE(found);
}

TEST(Cli, DryRunWritesNothing) {
  const auto out = std::filesystem::temp_directory_path() / "avlab-cli-dry-run";
  std::filesystem::remove_all(out);
  Result r = run_cli("pretrain --config " + kFixtures + "/experiments/micro.cfg --dry-run --out " + out.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("config_hash"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("report --no-such-flag").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("pretrain --config /nonexistent.cfg").code, 2);
  EXPECT_EQ(run_cli("report --fixtures /nonexistent-dir").code, 2);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, VerifyPasses) {
  Result r = run_cli("verify");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
