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

// Exact tabular two-player zero-sum Markov games.
//
// Indexing conventions used throughout the library:
//   * time steps are 0-based internally (t = 0 is the first decision step);
//   * a joint "cell" is (s, a1, a2) flattened as (s * A1 + a1) * A2 + a2;
//   * V at t = horizon is identically zero.
// All value quantities are from player 1's perspective; player 2's are their
// negations.

#ifndef MGOPE_GAME_H_
#define MGOPE_GAME_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mgope {

enum class Player { kP1 = 0, kP2 = 1 };

inline Player Opponent(Player p) {
  return p == Player::kP1 ? Player::kP2 : Player::kP1;
}
std::string PlayerName(Player p);

// One possible result of a joint action. The reward is player 1's reward for
// the transition, before any additive noise.
struct Outcome {
  int next = 0;
  double prob = 0.0;
  double reward = 0.0;
};

// Sparse transition kernel with an optional uniform component:
//   P(s' | cell) = sum of listed outcome mass at s' + uniform_mass / |S|.
// Exact games usually have uniform_mass = 0; Laplace-smoothed estimated
// models put the pseudo-count mass there, so rows never need |S| entries.
class TransitionModel {
 public:
  TransitionModel() = default;
  TransitionModel(int num_states, int num_cells);

  int num_states() const { return num_states_; }
  int num_cells() const { return static_cast<int>(rows_.size()); }

  void SetRow(int cell, std::vector<Outcome> outcomes,
              double uniform_mass = 0.0, double uniform_reward = 0.0);

  std::span<const Outcome> outcomes(int cell) const { return rows_[cell]; }
  double uniform_mass(int cell) const { return uniform_mass_[cell]; }
  double uniform_reward(int cell) const { return uniform_reward_[cell]; }

  double Probability(int cell, int next) const;
  double MeanReward(int cell) const;
  double RowSum(int cell) const;

  // E[r + discount * values(s') | cell]; `values_mean` is the mean of
  // `values` over all states and is only used by the uniform component.
  double Backup(int cell, std::span<const double> values, double values_mean,
                double discount) const;

  // Var[r + discount * values(s') | cell] over the outcome distribution
  // (reward noise excluded).
  double BackupVariance(int cell, std::span<const double> values,
                        double discount) const;

  // dist[s'] += weight * P(s' | cell), except the uniform part which is
  // accumulated into *uniform_total (to be spread as uniform_total / |S|).
  void Push(int cell, double weight, std::span<double> dist,
            double* uniform_total) const;

  bool operator==(const TransitionModel&) const = default;

 private:
  int num_states_ = 0;
  std::vector<std::vector<Outcome>> rows_;
  std::vector<double> uniform_mass_;
  std::vector<double> uniform_reward_;
};

struct RewardNoise {
  enum class Kind { kDeterministic, kUniform, kGaussian };
  Kind kind = Kind::kDeterministic;
  // Half-width for kUniform, standard deviation for kGaussian.
  double param = 0.0;

  double Variance() const;
  bool operator==(const RewardNoise&) const = default;
};

struct GameSpec {
  int num_states = 0;
  int actions_p1 = 0;
  int actions_p2 = 0;
  int horizon = 0;
  double discount = 1.0;
  std::vector<double> initial_dist;
  TransitionModel transition;
  RewardNoise reward_noise;
  double reward_bound = 1.0;

  int num_cells() const { return num_states * actions_p1 * actions_p2; }
  int Cell(int s, int a1, int a2) const {
    return (s * actions_p1 + a1) * actions_p2 + a2;
  }
  int num_actions(Player p) const {
    return p == Player::kP1 ? actions_p1 : actions_p2;
  }
};

// Builds a spec from dense tables: transition[(cell * S) + s'] and
// mean_reward[cell]; every outcome of a cell carries that cell's mean reward.
GameSpec MakeDenseGameSpec(int num_states, int actions_p1, int actions_p2,
                           int horizon, double discount,
                           std::vector<double> initial_dist,
                           std::span<const double> transition,
                           std::span<const double> mean_reward,
                           RewardNoise noise, double reward_bound);

// Structural information only: what an estimator is allowed to know about
// the game without looking at its dynamics.
struct GameShape {
  int num_states = 0;
  int actions_p1 = 0;
  int actions_p2 = 0;
  int horizon = 0;
  double discount = 1.0;
  double reward_bound = 1.0;

  int num_cells() const { return num_states * actions_p1 * actions_p2; }
  int Cell(int s, int a1, int a2) const {
    return (s * actions_p1 + a1) * actions_p2 + a2;
  }
  int num_actions(Player p) const {
    return p == Player::kP1 ? actions_p1 : actions_p2;
  }
  bool operator==(const GameShape&) const = default;
};

// A GameSpec whose invariants have been checked. Immutable.
class Game {
 public:
  const GameSpec& spec() const { return spec_; }
  GameShape shape() const;
  std::uint64_t fingerprint() const { return fingerprint_; }

  int num_states() const { return spec_.num_states; }
  int actions_p1() const { return spec_.actions_p1; }
  int actions_p2() const { return spec_.actions_p2; }
  int horizon() const { return spec_.horizon; }
  double discount() const { return spec_.discount; }
  int num_cells() const { return spec_.num_cells(); }
  int Cell(int s, int a1, int a2) const { return spec_.Cell(s, a1, a2); }
  double MeanReward(int cell) const { return mean_reward_[cell]; }
  std::span<const double> mean_rewards() const { return mean_reward_; }

 private:
  friend Game ValidateGame(GameSpec spec);
  explicit Game(GameSpec spec);

  GameSpec spec_;
  std::vector<double> mean_reward_;
  std::uint64_t fingerprint_ = 0;
};

// Checks every GameSpec invariant. Rows off by at most 1e-9 are renormalized
// silently; larger deviations are rejected.
// Throws kNonStochasticRow, kNegativeProbability, kRewardBoundViolated,
// kInvalidArgument (shape errors).
Game ValidateGame(GameSpec spec);

std::string FingerprintHex(std::uint64_t fingerprint);

// Time-indexed action distributions for one player.
class MarkovPolicy {
 public:
  MarkovPolicy() = default;
  // Uniform policy.
  MarkovPolicy(Player player, int horizon, int num_states, int num_actions);

  static MarkovPolicy Uniform(Player player, int horizon, int num_states,
                              int num_actions);
  static MarkovPolicy Pure(Player player, int horizon, int num_states,
                           int num_actions, int action);
  // Rows are normalized within 1e-9, rejected beyond it.
  static MarkovPolicy FromTable(Player player, int horizon, int num_states,
                                int num_actions, std::vector<double> table);
  static MarkovPolicy UniformFor(const GameShape& shape, Player player);

  Player player() const { return player_; }
  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double prob(int t, int s, int a) const {
    return table_[(static_cast<std::size_t>(t) * num_states_ + s) *
                      num_actions_ + a];
  }
  std::span<const double> row(int t, int s) const {
    return {table_.data() +
                (static_cast<std::size_t>(t) * num_states_ + s) * num_actions_,
            static_cast<std::size_t>(num_actions_)};
  }
  std::span<const double> table() const { return table_; }

  // Replaces one (t, s) block; the row is validated like FromTable.
  void SetRow(int t, int s, std::span<const double> probs);
  void SetPure(int t, int s, int action);

  bool operator==(const MarkovPolicy&) const = default;

 private:
  Player player_ = Player::kP1;
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> table_;
};

struct PolicyProfile {
  MarkovPolicy p1;
  MarkovPolicy p2;

  PolicyProfile() = default;
  // Throws kPlayerMismatch / kHorizonMismatch on inconsistent halves.
  PolicyProfile(MarkovPolicy p1, MarkovPolicy p2);

  const MarkovPolicy& of(Player p) const { return p == Player::kP1 ? p1 : p2; }
  // Copy with one player's policy replaced.
  PolicyProfile With(const MarkovPolicy& policy) const;
  bool operator==(const PolicyProfile&) const = default;
};

// Throws kHorizonMismatch / kPlayerMismatch when the profile does not fit.
void CheckProfileFits(const GameShape& shape, const PolicyProfile& profile);
void CheckPolicyFits(const GameShape& shape, const MarkovPolicy& policy);

struct ValueTables {
  int horizon = 0;
  int num_states = 0;
  int num_cells = 0;
  std::vector<double> v;  // [t * S + s], t = 0..horizon, last row zero
  std::vector<double> q;  // [t * cells + cell]
  double total = 0.0;

  double V(int t, int s) const {
    return v[static_cast<std::size_t>(t) * num_states + s];
  }
  double Q(int t, int cell) const {
    return q[static_cast<std::size_t>(t) * num_cells + cell];
  }
};

struct MatrixGameSolution {
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  double value = 0.0;
};

// Maximin solution of the zero-sum matrix game `matrix` (row-major,
// rows x cols, row player maximizes). Exact dense simplex with Bland's rule.
// A constant matrix returns uniform strategies. Throws kNumericalFailure when
// the saddle certificate misses 1e-8.
MatrixGameSolution SolveMatrixGame(std::span<const double> matrix, int rows,
                                   int cols);

struct MarginalTable {
  int horizon = 0;
  int num_cells = 0;
  std::vector<double> p;  // [t * cells + cell]

  double at(int t, int cell) const {
    return p[static_cast<std::size_t>(t) * num_cells + cell];
  }
};

// Exact backward induction for a fixed profile.
ValueTables EvaluateProfile(const Game& game, const PolicyProfile& profile);

struct BestResponse {
  MarkovPolicy policy;  // deterministic
  double value = 0.0;   // the responding player's own value
};

BestResponse ComputeBestResponse(const Game& game, const MarkovPolicy& opponent,
                                 Player player);

// max_{pi1'} v1(pi1', pi2) + max_{pi2'} v2(pi1, pi2').
double Exploitability(const Game& game, const PolicyProfile& profile);

struct NashResult {
  PolicyProfile profile;
  double value = 0.0;  // v1 at the equilibrium
};

// Backward induction with a matrix-game solve at every (t, s).
NashResult NashEquilibrium(const Game& game);

MarginalTable MarginalDistribution(const Game& game,
                                   const PolicyProfile& profile);

// E_{a1 ~ x, a2 ~ y}[q(s, a1, a2)] for one state's slice of a Q table.
double SliceValue(std::span<const double> q_slice, std::span<const double> x,
                  std::span<const double> y);

}  // namespace mgope

#endif  // MGOPE_GAME_H_
