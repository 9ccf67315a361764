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

#include <cmath>
#include <string>
#include <vector>

#include "avlab.h"

namespace {

struct Lines {
  std::vector<std::string> v;
  static void push(void* self, const char* line) { static_cast<Lines*>(self)->v.emplace_back(line); }
};

class CApi : public ::testing::Test {
 protected:
  void SetUp() override { ASSERT_EQ(avlab_context_create(&ctx), AVLAB_OK); }
  void TearDown() override { avlab_context_destroy(ctx); }
  avlab_context* ctx = nullptr;
};

}  // namespace

TEST_F(CApi, Wer) {
  double w = 0.0;
  size_t errors = 0, words = 0;
  ASSERT_EQ(avlab_wer(ctx, "the cat sat", "the bat sat on", &w, &errors, &words), AVLAB_OK);
  EXPECT_NEAR(w, 200.0 / 3.0, 1e-9);
  EXPECT_EQ(errors, 2u);
  EXPECT_EQ(words, 3u);
  EXPECT_STREQ(avlab_last_error(ctx), "");
  EXPECT_EQ(avlab_wer(ctx, "", "a", &w, nullptr, nullptr), AVLAB_ERR_DATA);
  EXPECT_STREQ(avlab_last_error_kind(ctx), "EmptyReference");
  EXPECT_EQ(avlab_wer(ctx, nullptr, "a", &w, nullptr, nullptr), AVLAB_ERR_USAGE);
}

TEST_F(CApi, MixingPrimitives) {
  std::vector<double> s(320), n(100);
  for (size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.1 * i);
  for (size_t i = 0; i < n.size(); ++i) n[i] = std::cos(0.37 * i) * 0.2;
  double g = 0.0;
  ASSERT_EQ(avlab_mixing_gain(ctx, s.data(), n.size(), n.data(), n.size(), 5.0, &g), AVLAB_OK);
  EXPECT_GT(g, 0.0);
  EXPECT_EQ(avlab_mixing_gain(ctx, s.data(), s.size(), n.data(), n.size(), 5.0, &g), AVLAB_ERR_DATA);
  EXPECT_STREQ(avlab_last_error_kind(ctx), "ShapeMismatch");
  std::vector<double> out(s.size());
  ASSERT_EQ(avlab_mix_at_snr(ctx, s.data(), s.size(), n.data(), n.size(), -5.0, 3, out.data()), AVLAB_OK);
  double ps = 0.0, pn = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    ps += s[i] * s[i];
    pn += (out[i] - s[i]) * (out[i] - s[i]);
  }
  EXPECT_NEAR(10.0 * std::log10(ps / pn), -5.0, 1e-9);
  std::vector<double> zeros(10, 0.0);
  EXPECT_EQ(avlab_mixing_gain(ctx, zeros.data(), zeros.size(), n.data(), zeros.size(), 0.0, &g), AVLAB_ERR_DATA);
  EXPECT_STREQ(avlab_last_error_kind(ctx), "ZeroPowerSignal");
}

TEST_F(CApi, RelativeReductionAndVersion) {
  double r = 0.0;
  ASSERT_EQ(avlab_relative_reduction(ctx, 28.0, 14.1, &r), AVLAB_OK);
  EXPECT_NEAR(r, 49.642857, 1e-6);
  EXPECT_EQ(avlab_relative_reduction(ctx, 0.0, 1.0, &r), AVLAB_ERR_DATA);
  EXPECT_NE(std::string(avlab_version()), "");
}

TEST_F(CApi, RunReportsThroughSinks) {
  Lines out;
  avlab_set_output(ctx, &Lines::push, &out);
  avlab_run_options opt{};
  opt.command = "report";
  const std::string fixtures = std::string(AVLAB_FIXTURES_DIR) + "/reference_grids/large_grids.csv";
  opt.fixtures = fixtures.c_str();
  ASSERT_EQ(avlab_run(ctx, &opt), AVLAB_OK) << avlab_last_error(ctx);
  bool found = false;
  for (const auto& l : out.v)
    if (l.find("LARGE") == 0 && l.find("433h") != std::string::npos && l.find("Noisy") != std::string::npos)
      found = l.size() >= 3 && l.substr(l.size() - 3) == "5.8";
  EXPECT_TRUE(found);
}

TEST_F(CApi, RunErrors) {
  avlab_run_options opt{};
  EXPECT_EQ(avlab_run(ctx, &opt), AVLAB_ERR_USAGE);
  opt.command = "bogus";
  EXPECT_EQ(avlab_run(ctx, &opt), AVLAB_ERR_USAGE);
  opt.command = "pretrain";
  opt.config = "/nonexistent/exp.cfg";
  EXPECT_EQ(avlab_run(ctx, &opt), AVLAB_ERR_DATA);
  EXPECT_STREQ(avlab_last_error_kind(ctx), "Config");
  EXPECT_EQ(avlab_run(nullptr, &opt), AVLAB_ERR_USAGE);
}
