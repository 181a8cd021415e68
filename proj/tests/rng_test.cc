// Copyright 2026 The mgope Authors.
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

#include "mgope/rng.h"

#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace mgope {
namespace {

using Block = std::array<std::uint32_t, 4>;

TEST(PhiloxTest, KnownAnswers) {
  EXPECT_EQ(Philox4x32({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRngTest, SameSeedAndStreamReproduce) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(CounterRngTest, StreamsAreIndependentOfDrawOrder) {
  CounterRng a(42, 1);
  CounterRng other(42, 2);
  for (int i = 0; i < 17; ++i) other.NextU64();
  CounterRng b(42, 1);
  EXPECT_EQ(a.NextU64(), b.NextU64());
  EXPECT_NE(CounterRng(42, 1).NextU64(), CounterRng(42, 2).NextU64());
  EXPECT_NE(CounterRng(42, 1).NextU64(), CounterRng(43, 1).NextU64());
}

TEST(CounterRngTest, UniformMoments) {
  CounterRng rng(5, 0);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(CounterRngTest, NormalMoments) {
  CounterRng rng(6, 0);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(CounterRngTest, CategoricalFrequencies) {
  CounterRng rng(8, 3);
  const std::vector<double> p = {0.2, 0.0, 0.5, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.Categorical(p)];
  EXPECT_EQ(counts[1], 0);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(counts[k] / static_cast<double>(n), p[k], 0.01);
  }
}

TEST(CounterRngTest, CategoricalRoundOffLandsOnLastPositive) {
  CounterRng rng(9, 0);
  const std::vector<double> p = {0.3, 0.3, 0.3999999999, 0.0};
  for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.Categorical(p), 3);
}

TEST(CounterRngTest, BelowStaysInRange) {
  CounterRng rng(10, 0);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.Below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(StreamIdTest, PacksFields) {
  EXPECT_EQ(StreamId(1, 2, 3), (std::uint64_t{1} << 32) | (2u << 16) | 3u);
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_EQ(DeriveSeed(1, 5), DeriveSeed(1, 5));
}

}  // namespace
}  // namespace mgope
