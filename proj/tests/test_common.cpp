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

#include <cstdlib>

#include "avlab/common/binary_io.hpp"
#include "avlab/common/error.hpp"
#include "avlab/common/hashing.hpp"
#include "avlab/common/parallel.hpp"
#include "avlab/common/random.hpp"
#include "avlab/common/text.hpp"
#include "test_util.hpp"

using namespace avlab;

TEST(Text, OneDecimalIsHalfUp) {
  EXPECT_EQ(format_one_decimal(5.75), "5.8");
  EXPECT_EQ(format_one_decimal(5.85), "5.9");
  EXPECT_EQ(format_one_decimal(14.05), "14.1");
  EXPECT_EQ(format_one_decimal(0.04), "0.0");
  EXPECT_EQ(format_one_decimal(103.1), "103.1");
  EXPECT_EQ(round_tenths(80.47), 805);
  EXPECT_EQ(round_tenths(49.64), 496);
}

TEST(Text, SplitTrimJoin) {
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split_whitespace("  a \t b\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(trim("  x y \n"), "x y");
  EXPECT_EQ(join({"a", "b"}, "-"), "a-b");
}

TEST(Hashing, KnownDigests) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const std::string s = "123456789";
  EXPECT_EQ(crc32({reinterpret_cast<const unsigned char*>(s.data()), s.size()}), 0xCBF43926u);
  EXPECT_EQ(short_hash("abc"), short_hash("abc"));
  EXPECT_NE(short_hash("abc"), short_hash("abd"));
}

TEST(Random, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, {tag("a"), 2}), derive_seed(1, {tag("a"), 2}));
  EXPECT_NE(derive_seed(1, {tag("a"), 2}), derive_seed(1, {tag("a"), 3}));
  EXPECT_NE(derive_seed(1, {tag("a")}), derive_seed(2, {tag("a")}));
  EXPECT_NE(tag("ab"), tag("ba"));
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  auto run = [] {
    std::vector<double> out(1000);
    parallel_for(out.size(), [&](size_t i) {
      Rng rng = make_rng(9, {i});
      out[i] = gaussian(rng);
    });
    return out;
  };
  setenv("AVLAB_THREADS", "1", 1);
  auto a = run();
  EXPECT_EQ(thread_count(), 1);
  setenv("AVLAB_THREADS", "4", 1);
  auto b = run();
  EXPECT_EQ(thread_count(), 4);
  unsetenv("AVLAB_THREADS");
  EXPECT_EQ(a, b);
}

TEST(Parallel, RethrowsWorkerErrors) {
  EXPECT_THROW(parallel_for(50, [](size_t i) {
                 if (i == 17) fail(ErrorKind::Numerical, "boom");
               }),
               Error);
}

TEST(Errors, CategoriesMapToExitCodes) {
  EXPECT_EQ(error_category(ErrorKind::UnknownFlag), ErrorCategory::Usage);
  EXPECT_EQ(error_category(ErrorKind::CacheCorruption), ErrorCategory::Data);
  EXPECT_EQ(error_category(ErrorKind::HashMismatch), ErrorCategory::Data);
  EXPECT_EQ(error_category(ErrorKind::NaNLoss), ErrorCategory::Numerical);
  EXPECT_EQ(static_cast<int>(ErrorCategory::Numerical), 3);
  Error e(ErrorKind::Checksum, "x");
  EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
}

TEST(BinaryIo, ReaderDetectsTruncation) {
  ByteWriter w;
  w.magic("TEST");
  w.u32(7);
  w.str("hello");
  w.f32(1.5f);
  ByteReader r(w.data().data(), w.data().size(), "mem");
  r.expect_magic("TEST");
  EXPECT_EQ(r.u32(), 7u);
  EXPECT_EQ(r.str(), "hello");
  EXPECT_EQ(r.f32(), 1.5f);
  EXPECT_EQ(r.remaining(), 0u);
  EXPECT_THROW(r.u8(), Error);
  ByteReader bad(w.data().data(), w.data().size(), "mem");
  EXPECT_THROW(bad.expect_magic("NOPE"), Error);
  testutil::TempDir dir;
  write_file_bytes(dir.str("b"), w.data());
  EXPECT_EQ(read_file_bytes(dir.str("b")), w.data());
  EXPECT_THROW(read_file_bytes(dir.str("missing")), Error);
}
