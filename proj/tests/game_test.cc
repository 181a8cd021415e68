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

#include "mgope/game.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "mgope/environments.h"
#include "mgope/error.h"
#include "test_util.h"

namespace mgope {
namespace {

using ::mgope::testing::ForEachDeterministicPolicy;
using ::mgope::testing::CodeOf;
using ::mgope::testing::RandomGame;
using ::mgope::testing::RandomPolicy;
using ::mgope::testing::RandomProfile;

GameSpec TwoStateSpec() {
  const std::vector<double> transition = {
      // s = 0
      0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.3, 0.7,
      // s = 1
      1.0, 0.0, 0.0, 1.0, 0.5, 0.5, 0.2, 0.8};
  const std::vector<double> reward = {1, 0, -1, 0.5, 0, 0.2, -0.5, 1};
  return MakeDenseGameSpec(2, 2, 2, 3, 0.9, {0.6, 0.4}, transition, reward,
                           RewardNoise{}, 1.0);
}

PolicyProfile Rbrps1TargetProfile() {
  return PolicyProfile(
      MarkovPolicy::FromTable(Player::kP1, 1, 1, 3, {0.4, 0.3, 0.3}),
      MarkovPolicy::FromTable(Player::kP2, 1, 1, 3,
                              {1.0 / 6, 2.0 / 3, 1.0 / 6}));
}

TEST(ValidateGameTest, AcceptsWellFormedGame) {
  const Game game = ValidateGame(TwoStateSpec());
  EXPECT_EQ(game.num_states(), 2);
  EXPECT_EQ(game.num_cells(), 8);
  EXPECT_DOUBLE_EQ(game.MeanReward(game.Cell(1, 1, 1)), 1.0);
}

TEST(ValidateGameTest, RejectsNonStochasticRow) {
  GameSpec spec = TwoStateSpec();
  spec.transition.SetRow(0, {{0, 0.5, 1.0}, {1, 0.6, 1.0}});
  EXPECT_EQ(CodeOf([&] { ValidateGame(spec); }), ErrorCode::kNonStochasticRow);
}

TEST(ValidateGameTest, RejectsNegativeProbability) {
  GameSpec spec = TwoStateSpec();
  spec.transition.SetRow(0, {{0, -0.1, 1.0}, {1, 1.1, 1.0}});
  EXPECT_EQ(CodeOf([&] { ValidateGame(spec); }),
            ErrorCode::kNegativeProbability);
}

TEST(ValidateGameTest, RenormalizesTinyDeviation) {
  GameSpec spec = TwoStateSpec();
  spec.transition.SetRow(0, {{0, 0.5 + 5e-10, 1.0}, {1, 0.5, 1.0}});
  const Game game = ValidateGame(spec);
  EXPECT_NEAR(game.spec().transition.RowSum(0), 1.0, 1e-15);
}

TEST(ValidateGameTest, RejectsRewardOutsideBound) {
  GameSpec spec = TwoStateSpec();
  spec.transition.SetRow(0, {{0, 1.0, 2.0}});
  EXPECT_EQ(CodeOf([&] { ValidateGame(spec); }),
            ErrorCode::kRewardBoundViolated);
}

TEST(ValidateGameTest, RejectsBadInitialDistribution) {
  GameSpec spec = TwoStateSpec();
  spec.initial_dist = {0.7, 0.7};
  EXPECT_EQ(CodeOf([&] { ValidateGame(spec); }), ErrorCode::kNonStochasticRow);
}

TEST(ValidateGameTest, FingerprintTracksContent) {
  const Game a = ValidateGame(TwoStateSpec());
  const Game b = ValidateGame(TwoStateSpec());
  GameSpec changed = TwoStateSpec();
  changed.discount = 0.8;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), ValidateGame(changed).fingerprint());
  EXPECT_EQ(FingerprintHex(a.fingerprint()).size(), 16u);
}

TEST(MarkovPolicyTest, RejectsBadRows) {
  EXPECT_EQ(CodeOf([] {
              MarkovPolicy::FromTable(Player::kP1, 1, 1, 2, {0.5, 0.6});
            }),
            ErrorCode::kNonStochasticRow);
  EXPECT_EQ(CodeOf([] {
              MarkovPolicy::FromTable(Player::kP1, 1, 1, 2, {-0.5, 1.5});
            }),
            ErrorCode::kNegativeProbability);
}

TEST(MarkovPolicyTest, ProfileChecksPlayers) {
  const auto p1 = MarkovPolicy::Uniform(Player::kP1, 1, 1, 3);
  EXPECT_EQ(CodeOf([&] { PolicyProfile(p1, p1); }),
            ErrorCode::kPlayerMismatch);
  const Game game = ValidateGame(TwoStateSpec());
  const PolicyProfile wrong_horizon(
      MarkovPolicy::Uniform(Player::kP1, 2, 2, 2),
      MarkovPolicy::Uniform(Player::kP2, 2, 2, 2));
  EXPECT_EQ(CodeOf([&] { EvaluateProfile(game, wrong_horizon); }),
            ErrorCode::kHorizonMismatch);
}

TEST(MatrixGameTest, RockPaperScissors) {
  const std::vector<double> m = {0, -1, 1, 1, 0, -1, -1, 1, 0};
  const auto sol = SolveMatrixGame(m, 3, 3);
  EXPECT_NEAR(sol.value, 0.0, 1e-12);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(sol.row_strategy[i], 1.0 / 3, 1e-12);
    EXPECT_NEAR(sol.col_strategy[i], 1.0 / 3, 1e-12);
  }
}

TEST(MatrixGameTest, DiagonalGame) {
  const std::vector<double> m = {2, 0, 0, 1};
  const auto sol = SolveMatrixGame(m, 2, 2);
  EXPECT_NEAR(sol.value, 2.0 / 3, 1e-12);
  EXPECT_NEAR(sol.row_strategy[0], 1.0 / 3, 1e-12);
  EXPECT_NEAR(sol.col_strategy[0], 1.0 / 3, 1e-12);
}

TEST(MatrixGameTest, SingleEntryAndConstant) {
  const std::vector<double> one = {5};
  EXPECT_NEAR(SolveMatrixGame(one, 1, 1).value, 5.0, 1e-12);
  const std::vector<double> flat(6, -2.0);
  const auto sol = SolveMatrixGame(flat, 2, 3);
  EXPECT_NEAR(sol.value, -2.0, 1e-12);
}

TEST(MatrixGameTest, SaddlePointOnRandomMatrices) {
  CounterRng rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng.Below(6));
    const int cols = 1 + static_cast<int>(rng.Below(6));
    std::vector<double> m(rows * cols);
    for (double& x : m) x = std::round(8.0 * rng.Uniform() - 4.0);
    const auto sol = SolveMatrixGame(m, rows, cols);
    for (int j = 0; j < cols; ++j) {
      double payoff = 0.0;
      for (int i = 0; i < rows; ++i) payoff += sol.row_strategy[i] * m[i * cols + j];
      EXPECT_GE(payoff, sol.value - 1e-9);
    }
    for (int i = 0; i < rows; ++i) {
      double payoff = 0.0;
      for (int j = 0; j < cols; ++j) payoff += sol.col_strategy[j] * m[i * cols + j];
      EXPECT_LE(payoff, sol.value + 1e-9);
    }
  }
}

TEST(EvaluateProfileTest, Rbrps1HandValues) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto profile = Rbrps1TargetProfile();
  EXPECT_NEAR(EvaluateProfile(game, profile).total, -0.05, 1e-12);
  const auto br1 = ComputeBestResponse(game, profile.p2, Player::kP1);
  EXPECT_NEAR(br1.value, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(br1.policy.prob(0, 0, kScissors), 1.0);
  const auto br2 = ComputeBestResponse(game, profile.p1, Player::kP2);
  EXPECT_NEAR(br2.value, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(br2.policy.prob(0, 0, kPaper), 1.0);
  EXPECT_NEAR(Exploitability(game, profile), 0.6, 1e-12);
}

TEST(EvaluateProfileTest, Rbrps1BehaviorExploitability) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const PolicyProfile behavior(
      MarkovPolicy::FromTable(Player::kP1, 1, 1, 3,
                              {2.0 / 3, 1.0 / 6, 1.0 / 6}),
      MarkovPolicy::FromTable(Player::kP2, 1, 1, 3,
                              {1.0 / 6, 2.0 / 3, 1.0 / 6}));
  EXPECT_NEAR(Exploitability(game, behavior), 1.0, 1e-12);
}

TEST(EvaluateProfileTest, TerminalValueIsZeroAndQMatchesBackup) {
  const Game game = RandomGame(11, 3, 2, 3, 4, 0.9);
  const auto profile = RandomProfile(12, game);
  const ValueTables vt = EvaluateProfile(game, profile);
  const int S = game.num_states();
  for (int s = 0; s < S; ++s) EXPECT_EQ(vt.V(game.horizon(), s), 0.0);
  for (int t = 0; t < game.horizon(); ++t) {
    for (int s = 0; s < S; ++s) {
      for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 3; ++a2) {
          const int cell = game.Cell(s, a1, a2);
          double expect = game.MeanReward(cell);
          for (int sp = 0; sp < S; ++sp) {
            expect += game.discount() *
                      game.spec().transition.Probability(cell, sp) *
                      vt.V(t + 1, sp);
          }
          EXPECT_NEAR(vt.Q(t, cell), expect, 1e-12);
        }
      }
    }
  }
}

TEST(EvaluateProfileTest, MatchesMonteCarloFreeMarginalIdentity) {
  // v1 = sum_t gamma^t sum_cell p_t(cell) r(cell)
  const Game game = RandomGame(21, 3, 3, 2, 5, 0.8);
  const auto profile = RandomProfile(22, game);
  const MarginalTable marg = MarginalDistribution(game, profile);
  double total = 0.0;
  for (int t = 0; t < game.horizon(); ++t) {
    double mass = 0.0;
    for (int c = 0; c < game.num_cells(); ++c) {
      total += std::pow(game.discount(), t) * marg.at(t, c) * game.MeanReward(c);
      mass += marg.at(t, c);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
  EXPECT_NEAR(total, EvaluateProfile(game, profile).total, 1e-12);
}

TEST(BestResponseTest, MatchesBruteForceOnMicroGames) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Game game = RandomGame(100 + seed, 2, 2, 2, 2, 0.9);
    const auto profile = RandomProfile(200 + seed, game);
    for (Player player : {Player::kP1, Player::kP2}) {
      double best = -std::numeric_limits<double>::infinity();
      ForEachDeterministicPolicy(player, 2, 2, 2, [&](const MarkovPolicy& pi) {
        const double v1 = EvaluateProfile(game, profile.With(pi)).total;
        best = std::max(best, player == Player::kP1 ? v1 : -v1);
      });
      const auto br = ComputeBestResponse(game, profile.of(Opponent(player)), player);
      EXPECT_NEAR(br.value, best, 1e-12);
      const double achieved = EvaluateProfile(game, profile.With(br.policy)).total;
      EXPECT_NEAR(player == Player::kP1 ? achieved : -achieved, best, 1e-12);
    }
  }
}

TEST(ExploitabilityTest, NonNegativeAndZeroAtNash) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Game game = RandomGame(300 + seed, 3, 3, 2, 3, 0.95);
    EXPECT_GE(Exploitability(game, RandomProfile(400 + seed, game)), -1e-12);
    const NashResult nash = NashEquilibrium(game);
    EXPECT_NEAR(Exploitability(game, nash.profile), 0.0, 1e-9);
    EXPECT_NEAR(EvaluateProfile(game, nash.profile).total, nash.value, 1e-9);
  }
}

TEST(ExploitabilityTest, UniformRpsIsNash) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const PolicyProfile uniform(MarkovPolicy::UniformFor(game.shape(), Player::kP1),
                              MarkovPolicy::UniformFor(game.shape(), Player::kP2));
  EXPECT_NEAR(Exploitability(game, uniform), 0.0, 1e-12);
}

TEST(MarginalTest, UniformComponentSpreadsMass) {
  GameSpec spec = TwoStateSpec();
  spec.transition.SetRow(0, {{0, 0.5, 1.0}}, 0.5, 1.0);
  const Game game = ValidateGame(spec);
  EXPECT_DOUBLE_EQ(game.spec().transition.Probability(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(game.spec().transition.Probability(0, 1), 0.25);
  const auto profile = RandomProfile(5, game);
  const MarginalTable marg = MarginalDistribution(game, profile);
  for (int t = 0; t < game.horizon(); ++t) {
    double mass = 0.0;
    for (int c = 0; c < game.num_cells(); ++c) mass += marg.at(t, c);
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace mgope
