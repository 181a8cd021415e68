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

#include "mgope/exploitability.h"

#include <cmath>

#include <gtest/gtest.h>

#include "mgope/environments.h"
#include "mgope/rng.h"
#include "test_util.h"

namespace mgope {
namespace {

using ::mgope::testing::CodeOf;
using ::mgope::testing::ForEachDeterministicPolicy;
using ::mgope::testing::RandomGame;
using ::mgope::testing::RandomPolicy;
using ::mgope::testing::RandomProfile;

MarkovPolicy Rps(Player player, double r, double p, double s) {
  return MarkovPolicy::FromTable(player, 1, 1, 3, {r, p, s});
}

PolicyProfile Rbrps1Behavior() {
  return PolicyProfile(Rps(Player::kP1, 2.0 / 3, 1.0 / 6, 1.0 / 6),
                       Rps(Player::kP2, 1.0 / 6, 2.0 / 3, 1.0 / 6));
}

PolicyProfile Rbrps1Target() {
  return PolicyProfile(Rps(Player::kP1, 0.4, 0.3, 0.3),
                       Rps(Player::kP2, 1.0 / 6, 2.0 / 3, 1.0 / 6));
}

NuisanceOptions ExactOptions(const Game& game) {
  NuisanceOptions o;
  o.exact_game = &game;
  return o;
}

double ExactValue(const Game& game, const MarkovPolicy& p1, const MarkovPolicy& p2) {
  return EvaluateProfile(game, PolicyProfile(p1, p2)).total;
}

TEST(PolicyClassTest, ConstructionAndErrors) {
  EXPECT_EQ(CodeOf([] { PolicyClass::FiniteSet({}); }), ErrorCode::kInvalidArgument);
  const auto base = MarkovPolicy::Uniform(Player::kP1, 2, 3, 2);
  const auto anchor = MarkovPolicy::Pure(Player::kP1, 2, 3, 2, 1);
  const auto scalar = PolicyClass::Mixture(base, anchor, false);
  const auto per_state = PolicyClass::Mixture(base, anchor, true);
  EXPECT_EQ(scalar.num_alphas(), 1);
  EXPECT_EQ(per_state.num_alphas(), 3);
  EXPECT_EQ(scalar.At(1.0), base);
  EXPECT_EQ(scalar.At(0.0), anchor);
  EXPECT_EQ(CodeOf([&] { scalar.At(1.5); }), ErrorCode::kAlphaOutOfRange);
  EXPECT_DOUBLE_EQ(scalar.MaxProb(0, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(scalar.MaxProb(0, 0, 0), 0.5);
  const auto p2 = MarkovPolicy::Uniform(Player::kP2, 2, 3, 2);
  EXPECT_EQ(CodeOf([&] { PolicyClass::FiniteSet({base, p2}); }),
            ErrorCode::kPlayerMismatch);
  EXPECT_EQ(CodeOf([&] { PolicyClass::Mixture(base, p2, false); }),
            ErrorCode::kPlayerMismatch);
}

TEST(MaximizeTest, FiniteSetPicksBestResponseToPaper) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto paper = Rps(Player::kP2, 0, 1, 0);
  const auto cls = PolicyClass::FiniteSet(
      {Rps(Player::kP1, 1, 0, 0), Rps(Player::kP1, 0, 1, 0), Rps(Player::kP1, 0, 0, 1)});
  const auto got = MaximizeObjective(
      [&](const MarkovPolicy& pi) { return ExactValue(game, pi, paper); }, cls, {});
  EXPECT_EQ(got.policy, Rps(Player::kP1, 0, 0, 1));
  EXPECT_DOUBLE_EQ(got.value, 1.0);
  EXPECT_EQ(got.evaluations, 3);
}

TEST(MaximizeTest, TiesKeepFirstMember) {
  const auto cls = PolicyClass::FiniteSet(
      {Rps(Player::kP1, 1, 0, 0), Rps(Player::kP1, 0, 1, 0), Rps(Player::kP1, 0, 0, 1)});
  const auto got = MaximizeObjective([](const MarkovPolicy&) { return 0.25; }, cls, {});
  EXPECT_EQ(got.policy, cls.members()[0]);
}

TEST(MaximizeTest, FullMarkovMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Game game = RandomGame(300 + seed, 2, 2, 3, 3, 0.9);
    const PolicyProfile fixed = RandomProfile(seed, game);
    double brute1 = -1e300;
    ForEachDeterministicPolicy(Player::kP1, 3, 2, 2, [&](const MarkovPolicy& pi) {
      brute1 = std::max(brute1, ExactValue(game, pi, fixed.p2));
    });
    const auto cls = PolicyClass::FullMarkov(game.shape(), Player::kP1);
    const auto got = MaximizeObjective(
        [&](const MarkovPolicy& pi) { return ExactValue(game, pi, fixed.p2); }, cls, {});
    EXPECT_NEAR(got.value, brute1, 1e-10);
    EXPECT_NEAR(got.value, ComputeBestResponse(game, fixed.p2, Player::kP1).value, 1e-10);
    EXPECT_NEAR(ExactValue(game, got.policy, fixed.p2), got.value, 1e-12);
  }
}

TEST(MaximizeTest, DominatesRandomSamples) {
  const Game game = RandomGame(41, 3, 2, 2, 2, 0.95);
  const PolicyProfile fixed = RandomProfile(9, game);
  const auto objective = [&](const MarkovPolicy& pi) {
    return ExactValue(game, pi, fixed.p2);
  };
  const auto base = RandomPolicy(5, Player::kP1, 2, 3, 2);
  const auto anchor = MarkovPolicy::Pure(Player::kP1, 2, 3, 2, 0);
  const std::vector<PolicyClass> classes = {
      PolicyClass::FullMarkov(game.shape(), Player::kP1),
      PolicyClass::Mixture(base, anchor, false),
      PolicyClass::Mixture(base, anchor, true)};
  for (const auto& cls : classes) {
    const auto got = MaximizeObjective(objective, cls, {});
    CounterRng rng(17, 0);
    for (int k = 0; k < 300; ++k) {
      EXPECT_LE(objective(cls.Sample(rng)), got.value + 1e-9);
    }
  }
}

TEST(MaximizeTest, PerStateMixtureBeatsSharedWeight) {
  const Game game = BuildRbrps(DefaultRbrps2Config());
  const auto nash = NashEquilibrium(game).profile;
  const auto rock = MarkovPolicy::Pure(Player::kP2, 2, 5, 3, kRock);
  const auto target_p2 = MixPolicies(nash.p2, rock, 0.5);
  const auto anchor = MarkovPolicy::Pure(Player::kP1, 2, 5, 3, kPaper);
  const auto objective = [&](const MarkovPolicy& pi) {
    return ExactValue(game, pi, target_p2);
  };
  const auto shared = MaximizeObjective(
      objective, PolicyClass::Mixture(nash.p1, anchor, false), {});
  const auto per_state = MaximizeObjective(
      objective, PolicyClass::Mixture(nash.p1, anchor, true), {});
  EXPECT_GE(per_state.value, shared.value - 1e-12);
  EXPECT_EQ(per_state.alpha.size(), 5u);
}

// Every objective is affine in one (t, s) block of one player's policy once
// no clipping binds.
TEST(ObjectiveTest, AffineInEachBlock) {
  const Game game = RandomGame(77, 2, 2, 2, 3, 0.9, RewardNoise{RewardNoise::Kind::kGaussian, 0.1});
  const PolicyProfile behavior(RandomPolicy(1, Player::kP1, 3, 2, 2),
                               RandomPolicy(2, Player::kP2, 3, 2, 2));
  NuisanceOptions opts;
  opts.clip_base = 1e12;
  const FoldedDataset folded = AssignFolds(Simulate(game, behavior, 300, 5), 2, 6);
  const CrossFitContext ctx(folded, game.shape(), opts);
  const PolicyProfile target = RandomProfile(30, game);
  CounterRng rng(3, 0);
  for (Method m : {Method::kIs, Method::kMis, Method::kDm, Method::kDr, Method::kDrl}) {
    for (int t = 0; t < 3; ++t) {
      for (int s = 0; s < 2; ++s) {
        const double lambda = rng.Uniform();
        MarkovPolicy x = target.p1;
        MarkovPolicy y = target.p1;
        MarkovPolicy z = target.p1;
        const double px = rng.Uniform();
        const double py = rng.Uniform();
        x.SetRow(t, s, std::vector<double>{px, 1 - px});
        y.SetRow(t, s, std::vector<double>{py, 1 - py});
        const double pz = lambda * px + (1 - lambda) * py;
        z.SetRow(t, s, std::vector<double>{pz, 1 - pz});
        const double fx = CrossFitObjective(ctx, target.With(x), m);
        const double fy = CrossFitObjective(ctx, target.With(y), m);
        const double fz = CrossFitObjective(ctx, target.With(z), m);
        EXPECT_NEAR(fz, lambda * fx + (1 - lambda) * fy, 1e-9)
            << MethodName(m) << " t=" << t << " s=" << s;
      }
    }
  }
}

TEST(AutoClipTest, RatioProductAndFallback) {
  const auto full1 = PolicyClass::FullMarkov(Player::kP1, 1, 1, 3);
  const auto full2 = PolicyClass::FullMarkov(Player::kP2, 1, 1, 3);
  EXPECT_NEAR(AutoClipBase(Rbrps1Behavior(), full1, full2, nullptr, 100.0), 36.0, 1e-12);
  const PolicyProfile gap(Rps(Player::kP1, 1, 0, 0), Rps(Player::kP2, 1.0 / 3, 1.0 / 3, 1.0 / 3));
  EXPECT_DOUBLE_EQ(AutoClipBase(gap, full1, full2, nullptr, 100.0), 100.0);
  const auto singleton1 = PolicyClass::FiniteSet({Rps(Player::kP1, 1, 0, 0)});
  EXPECT_NEAR(AutoClipBase(gap, singleton1, full2, nullptr, 100.0), 3.0, 1e-12);
}

TEST(ExploitabilityTest, TrueClassValuesOnRockBiasedRps) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto full1 = PolicyClass::FullMarkov(game.shape(), Player::kP1);
  const auto full2 = PolicyClass::FullMarkov(game.shape(), Player::kP2);
  EXPECT_NEAR(TrueClassExploitability(game, Rbrps1Target(), full1, full2, {}), 0.6, 1e-12);
  const auto nash = NashEquilibrium(game).profile;
  EXPECT_NEAR(TrueClassExploitability(game, nash, full1, full2, {}), 0.0, 1e-9);
  // A finite class containing the best responses gives the same value.
  const auto pure1 = PolicyClass::FiniteSet(
      {Rps(Player::kP1, 1, 0, 0), Rps(Player::kP1, 0, 1, 0), Rps(Player::kP1, 0, 0, 1)});
  const auto pure2 = PolicyClass::FiniteSet(
      {Rps(Player::kP2, 1, 0, 0), Rps(Player::kP2, 0, 1, 0), Rps(Player::kP2, 0, 0, 1)});
  EXPECT_NEAR(TrueClassExploitability(game, Rbrps1Target(), pure1, pure2, {}), 0.6, 1e-12);
}

TEST(ExploitabilityTest, ExactDirectMethodRecoversExploitability) {
  std::vector<Game> games = {BuildRbrps(DefaultRbrps1Config()),
                             BuildRbrps(DefaultRbrps2Config()),
                             RandomGame(12, 3, 2, 3, 3, 0.9)};
  for (const Game& game : games) {
    const PolicyProfile behavior(
        MarkovPolicy::Uniform(Player::kP1, game.horizon(), game.num_states(), game.actions_p1()),
        MarkovPolicy::Uniform(Player::kP2, game.horizon(), game.num_states(), game.actions_p2()));
    const PolicyProfile target = RandomProfile(4, game);
    const FoldedDataset folded = AssignFolds(Simulate(game, behavior, 50, 1), 2, 1);
    const CrossFitContext ctx(folded, game.shape(), ExactOptions(game));
    const auto est = EstimateExploitability(
        ctx, target, PolicyClass::FullMarkov(game.shape(), Player::kP1),
        PolicyClass::FullMarkov(game.shape(), Player::kP2), Method::kDm, {});
    // Best responses are optimal from every state, so the oracle is the
    // best-response value averaged over the sampled initial states.
    const auto br1 = ComputeBestResponse(game, target.p2, Player::kP1).policy;
    const auto br2 = ComputeBestResponse(game, target.p1, Player::kP2).policy;
    const ValueTables v1 = EvaluateProfile(game, PolicyProfile(br1, target.p2));
    const ValueTables v2 = EvaluateProfile(game, PolicyProfile(target.p1, br2));
    double oracle = 0.0;
    for (const auto& traj : folded.dataset.trajectories) {
      const int s0 = traj.steps.front().state;
      oracle += v1.V(0, s0) - v2.V(0, s0);
    }
    oracle /= folded.dataset.size();
    EXPECT_NEAR(est.total, oracle, 1e-9);
    EXPECT_NEAR(est.max_p1_value + est.max_p2_value, est.total, 1e-15);
  }
}

TEST(ExploitabilityTest, SingletonClassesGiveZero) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const FoldedDataset folded = AssignFolds(Simulate(game, Rbrps1Behavior(), 200, 2), 2, 3);
  const CrossFitContext ctx(folded, game.shape(), NuisanceOptions{});
  const PolicyProfile target = Rbrps1Target();
  for (Method m : {Method::kIs, Method::kMis, Method::kDm, Method::kDr, Method::kDrl}) {
    const auto est = EstimateExploitability(ctx, target, PolicyClass::FiniteSet({target.p1}),
                                            PolicyClass::FiniteSet({target.p2}), m, {});
    EXPECT_DOUBLE_EQ(est.total, 0.0) << MethodName(m);
  }
}

TEST(SelectionTest, ExactDirectMethodFindsNash) {
  std::vector<Game> games = {BuildRbrps(DefaultRbrps1Config()),
                             BuildRbrps(DefaultRbrps2Config()),
                             RandomGame(21, 3, 2, 3, 3, 0.9),
                             RandomGame(22, 2, 3, 2, 2, 1.0)};
  for (const Game& game : games) {
    const PolicyProfile behavior = RandomProfile(8, game);
    const FoldedDataset folded = AssignFolds(Simulate(game, behavior, 40, 1), 2, 1);
    const CrossFitContext ctx(folded, game.shape(), ExactOptions(game));
    const auto sel = SelectBestProfile(ctx, PolicyClass::FullMarkov(game.shape(), Player::kP1),
                                       PolicyClass::FullMarkov(game.shape(), Player::kP2),
                                       Method::kDm, {});
    EXPECT_LE(Exploitability(game, sel.profile), 1e-6);
    EXPECT_TRUE(sel.diagnostics.converged);
    EXPECT_NEAR(sel.diagnostics.gap, 0.0, 1e-6);
  }
}

TEST(SelectionTest, SingletonClassesReturnTheirMembers) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto a = Rps(Player::kP1, 0.2, 0.3, 0.5);
  const auto b = Rps(Player::kP2, 0.6, 0.1, 0.3);
  const auto sel = SolveMaxMin(
      [&](const MarkovPolicy& x, const MarkovPolicy& y) { return ExactValue(game, x, y); },
      PolicyClass::FiniteSet({a}), PolicyClass::FiniteSet({b}), {});
  EXPECT_EQ(sel.profile.p1, a);
  EXPECT_EQ(sel.profile.p2, b);
  EXPECT_DOUBLE_EQ(sel.diagnostics.gap, 0.0);
}

TEST(SelectionTest, FiniteMaximinOnPureStrategies) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto pure1 = PolicyClass::FiniteSet(
      {Rps(Player::kP1, 1, 0, 0), Rps(Player::kP1, 0, 1, 0), Rps(Player::kP1, 0.5, 0.5, 0)});
  const auto pure2 = PolicyClass::FiniteSet({Rps(Player::kP2, 1, 0, 0), Rps(Player::kP2, 0, 1, 0)});
  const auto sel = SolveMaxMin(
      [&](const MarkovPolicy& x, const MarkovPolicy& y) { return ExactValue(game, x, y); },
      pure1, pure2, {});
  // Row minima are -1 (rock vs paper), 0 (paper vs paper), -0.5; column maxima 1, 0.5.
  EXPECT_EQ(sel.profile.p1, pure1.members()[1]);
  EXPECT_EQ(sel.profile.p2, pure2.members()[1]);
}

TEST(SelectionTest, MixtureSaddleOnScalarWeights) {
  const Game game = BuildRbrps(DefaultRbrps1Config());
  const auto nash = NashEquilibrium(game).profile;
  const auto c1 = PolicyClass::Mixture(nash.p1, Rps(Player::kP1, 1, 0, 0), false);
  const auto c2 = PolicyClass::Mixture(nash.p2, Rps(Player::kP2, 0, 1, 0), false);
  const auto sel = SolveMaxMin(
      [&](const MarkovPolicy& x, const MarkovPolicy& y) { return ExactValue(game, x, y); },
      c1, c2, {});
  EXPECT_GE(sel.diagnostics.gap, -1e-9);
  EXPECT_LE(sel.diagnostics.gap, 1e-3);
  EXPECT_LE(TrueClassExploitability(game, sel.profile, c1, c2, {}), 1e-3);
}

TEST(SelectionTest, NestedFallbackForMixedKinds) {
  const Game game = RandomGame(5, 1, 2, 2, 1, 1.0);
  const auto c1 = PolicyClass::FullMarkov(game.shape(), Player::kP1);
  const auto c2 = PolicyClass::FiniteSet(
      {MarkovPolicy::Pure(Player::kP2, 1, 1, 2, 0), MarkovPolicy::Pure(Player::kP2, 1, 1, 2, 1)});
  const auto sel = SolveMaxMin(
      [&](const MarkovPolicy& x, const MarkovPolicy& y) { return ExactValue(game, x, y); },
      c1, c2, {});
  EXPECT_EQ(sel.diagnostics.solver, "nested");
  // The selected pure P1 policy attains the pure maximin value.
  double maximin = -1e300;
  ForEachDeterministicPolicy(Player::kP1, 1, 1, 2, [&](const MarkovPolicy& x) {
    double worst = 1e300;
    for (const auto& y : c2.members()) worst = std::min(worst, ExactValue(game, x, y));
    maximin = std::max(maximin, worst);
  });
  double worst = 1e300;
  for (const auto& y : c2.members()) worst = std::min(worst, ExactValue(game, sel.profile.p1, y));
  EXPECT_NEAR(worst, maximin, 1e-12);
}

}  // namespace
}  // namespace mgope
