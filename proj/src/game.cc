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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "mgope/error.h"

namespace mgope {
namespace {

constexpr double kNormalizationTolerance = 1e-9;
constexpr double kNegativeSlack = 1e-12;
constexpr double kTieTolerance = 1e-12;

std::string CellName(const GameSpec& spec, int cell) {
  const int a2 = cell % spec.actions_p2;
  const int a1 = (cell / spec.actions_p2) % spec.actions_p1;
  const int s = cell / (spec.actions_p1 * spec.actions_p2);
  return "(s=" + std::to_string(s) + ", a1=" + std::to_string(a1) +
         ", a2=" + std::to_string(a2) + ")";
}

// Validates a probability vector in place; returns false if it cannot be
// repaired (caller reports the location).
// `where` is called only to build an error message.
template <typename Where>
void NormalizeDistribution(std::span<double> probs, const Where& where) {
  double sum = 0.0;
  for (double& p : probs) {
    if (!std::isfinite(p)) {
      Fail(ErrorCode::kNonStochasticRow, where() + " has a non-finite entry");
    }
    if (p < 0.0) {
      if (p < -kNegativeSlack) {
        Fail(ErrorCode::kNegativeProbability, where());
      }
      p = 0.0;
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    Fail(ErrorCode::kNonStochasticRow,
         where() + " sums to " + std::to_string(sum));
  }
  for (double& p : probs) p /= sum;
}

std::string PolicyRowName(int t, int s) {
  return "policy row (t=" + std::to_string(t) + ", s=" + std::to_string(s) + ")";
}

class Fnv1a {
 public:
  void Add(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (x >> (8 * i)) & 0xFFu;
      hash_ *= 0x100000001B3ull;
    }
  }
  void Add(double x) { Add(std::bit_cast<std::uint64_t>(x)); }
  void Add(int x) { Add(static_cast<std::uint64_t>(static_cast<std::int64_t>(x))); }
  std::uint64_t hash() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ull;
};

std::uint64_t ComputeFingerprint(const GameSpec& spec) {
  Fnv1a h;
  h.Add(spec.num_states);
  h.Add(spec.actions_p1);
  h.Add(spec.actions_p2);
  h.Add(spec.horizon);
  h.Add(spec.discount);
  for (double p : spec.initial_dist) h.Add(p);
  for (int cell = 0; cell < spec.num_cells(); ++cell) {
    for (const Outcome& o : spec.transition.outcomes(cell)) {
      h.Add(o.next);
      h.Add(o.prob);
      h.Add(o.reward);
    }
    h.Add(spec.transition.uniform_mass(cell));
    h.Add(spec.transition.uniform_reward(cell));
  }
  h.Add(static_cast<int>(spec.reward_noise.kind));
  h.Add(spec.reward_noise.param);
  h.Add(spec.reward_bound);
  return h.hash();
}

}  // namespace

std::string PlayerName(Player p) { return p == Player::kP1 ? "p1" : "p2"; }

// ---------------------------------------------------------------------------
// TransitionModel

TransitionModel::TransitionModel(int num_states, int num_cells)
    : num_states_(num_states),
      rows_(num_cells),
      uniform_mass_(num_cells, 0.0),
      uniform_reward_(num_cells, 0.0) {}

void TransitionModel::SetRow(int cell, std::vector<Outcome> outcomes,
                             double uniform_mass, double uniform_reward) {
  rows_.at(cell) = std::move(outcomes);
  uniform_mass_.at(cell) = uniform_mass;
  uniform_reward_.at(cell) = uniform_reward;
}

double TransitionModel::Probability(int cell, int next) const {
  double p = uniform_mass_[cell] / num_states_;
  for (const Outcome& o : rows_[cell]) {
    if (o.next == next) p += o.prob;
  }
  return p;
}

double TransitionModel::MeanReward(int cell) const {
  double r = uniform_mass_[cell] * uniform_reward_[cell];
  for (const Outcome& o : rows_[cell]) r += o.prob * o.reward;
  return r;
}

double TransitionModel::RowSum(int cell) const {
  double sum = uniform_mass_[cell];
  for (const Outcome& o : rows_[cell]) sum += o.prob;
  return sum;
}

double TransitionModel::Backup(int cell, std::span<const double> values,
                               double values_mean, double discount) const {
  double acc = 0.0;
  for (const Outcome& o : rows_[cell]) {
    acc += o.prob * (o.reward + discount * values[o.next]);
  }
  const double u = uniform_mass_[cell];
  if (u != 0.0) acc += u * (uniform_reward_[cell] + discount * values_mean);
  return acc;
}

double TransitionModel::BackupVariance(int cell, std::span<const double> values,
                                       double discount) const {
  double mean = 0.0;
  double second = 0.0;
  for (const Outcome& o : rows_[cell]) {
    const double x = o.reward + discount * values[o.next];
    mean += o.prob * x;
    second += o.prob * x * x;
  }
  const double u = uniform_mass_[cell];
  if (u != 0.0) {
    const double per_state = u / num_states_;
    for (int s = 0; s < num_states_; ++s) {
      const double x = uniform_reward_[cell] + discount * values[s];
      mean += per_state * x;
      second += per_state * x * x;
    }
  }
  return std::max(0.0, second - mean * mean);
}

void TransitionModel::Push(int cell, double weight, std::span<double> dist,
                           double* uniform_total) const {
  for (const Outcome& o : rows_[cell]) dist[o.next] += weight * o.prob;
  *uniform_total += weight * uniform_mass_[cell];
}

double RewardNoise::Variance() const {
  switch (kind) {
    case Kind::kDeterministic: return 0.0;
    case Kind::kUniform: return param * param / 3.0;
    case Kind::kGaussian: return param * param;
  }
  return 0.0;
}

GameSpec MakeDenseGameSpec(int num_states, int actions_p1, int actions_p2,
                           int horizon, double discount,
                           std::vector<double> initial_dist,
                           std::span<const double> transition,
                           std::span<const double> mean_reward,
                           RewardNoise noise, double reward_bound) {
  GameSpec spec;
  spec.num_states = num_states;
  spec.actions_p1 = actions_p1;
  spec.actions_p2 = actions_p2;
  spec.horizon = horizon;
  spec.discount = discount;
  spec.initial_dist = std::move(initial_dist);
  spec.reward_noise = noise;
  spec.reward_bound = reward_bound;
  const int cells = spec.num_cells();
  if (transition.size() != static_cast<std::size_t>(cells) * num_states ||
      mean_reward.size() != static_cast<std::size_t>(cells)) {
    Fail(ErrorCode::kInvalidArgument, "dense game tables have wrong size");
  }
  spec.transition = TransitionModel(num_states, cells);
  for (int cell = 0; cell < cells; ++cell) {
    std::vector<Outcome> row;
    for (int next = 0; next < num_states; ++next) {
      const double p = transition[static_cast<std::size_t>(cell) * num_states + next];
      if (p != 0.0) row.push_back({next, p, mean_reward[cell]});
    }
    spec.transition.SetRow(cell, std::move(row));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Game

Game::Game(GameSpec spec) : spec_(std::move(spec)) {
  mean_reward_.resize(spec_.num_cells());
  for (int cell = 0; cell < spec_.num_cells(); ++cell) {
    mean_reward_[cell] = spec_.transition.MeanReward(cell);
  }
  fingerprint_ = ComputeFingerprint(spec_);
}

GameShape Game::shape() const {
  return {spec_.num_states, spec_.actions_p1, spec_.actions_p2,
          spec_.horizon,    spec_.discount,   spec_.reward_bound};
}

Game ValidateGame(GameSpec spec) {
  if (spec.num_states <= 0 || spec.actions_p1 <= 0 || spec.actions_p2 <= 0 ||
      spec.horizon <= 0) {
    Fail(ErrorCode::kInvalidArgument,
         "state/action counts and horizon must be positive");
  }
  if (!(spec.discount >= 0.0 && spec.discount <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "discount must lie in [0, 1]");
  }
  if (!(spec.reward_bound >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "reward_bound must be nonnegative");
  }
  if (spec.reward_noise.param < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "reward noise parameter is negative");
  }
  if (spec.initial_dist.size() != static_cast<std::size_t>(spec.num_states)) {
    Fail(ErrorCode::kInvalidArgument, "initial_dist has wrong length");
  }
  NormalizeDistribution(spec.initial_dist, [] { return std::string("initial_dist"); });

  const int cells = spec.num_cells();
  TransitionModel& tm = spec.transition;
  if (tm.num_cells() != cells || tm.num_states() != spec.num_states) {
    Fail(ErrorCode::kInvalidArgument, "transition table has wrong shape");
  }
  for (int cell = 0; cell < cells; ++cell) {
    const std::string where = "transition row " + CellName(spec, cell);
    std::vector<Outcome> row(tm.outcomes(cell).begin(), tm.outcomes(cell).end());
    double uniform = tm.uniform_mass(cell);
    for (const Outcome& o : row) {
      if (o.next < 0 || o.next >= spec.num_states) {
        Fail(ErrorCode::kInvalidArgument, where + " references state " +
                                              std::to_string(o.next));
      }
      if (!std::isfinite(o.reward) ||
          std::abs(o.reward) > spec.reward_bound + kNegativeSlack) {
        Fail(ErrorCode::kRewardBoundViolated,
             where + " reward " + std::to_string(o.reward) + " exceeds bound " +
                 std::to_string(spec.reward_bound));
      }
    }
    if (uniform != 0.0 &&
        std::abs(tm.uniform_reward(cell)) > spec.reward_bound + kNegativeSlack) {
      Fail(ErrorCode::kRewardBoundViolated, where);
    }
    // Merge duplicates (same successor and reward) and drop zero mass so the
    // canonical form, and hence the fingerprint, is unique.
    std::sort(row.begin(), row.end(), [](const Outcome& a, const Outcome& b) {
      return a.next != b.next ? a.next < b.next : a.reward < b.reward;
    });
    std::vector<Outcome> merged;
    for (const Outcome& o : row) {
      if (!merged.empty() && merged.back().next == o.next &&
          merged.back().reward == o.reward) {
        merged.back().prob += o.prob;
      } else {
        merged.push_back(o);
      }
    }
    std::vector<double> probs;
    for (const Outcome& o : merged) probs.push_back(o.prob);
    probs.push_back(uniform);
    NormalizeDistribution(probs, [&] { return where; });
    std::vector<Outcome> clean;
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (probs[i] > 0.0) {
        clean.push_back({merged[i].next, probs[i], merged[i].reward});
      }
    }
    uniform = probs.back();
    tm.SetRow(cell, std::move(clean), uniform,
              uniform > 0.0 ? tm.uniform_reward(cell) : 0.0);
  }
  return Game(std::move(spec));
}

std::string FingerprintHex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fingerprint));
  return buf;
}

// ---------------------------------------------------------------------------
// Policies

MarkovPolicy::MarkovPolicy(Player player, int horizon, int num_states,
                           int num_actions)
    : player_(player),
      horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      table_(static_cast<std::size_t>(horizon) * num_states * num_actions,
             1.0 / num_actions) {
  if (horizon <= 0 || num_states <= 0 || num_actions <= 0) {
    Fail(ErrorCode::kInvalidArgument, "policy dimensions must be positive");
  }
}

MarkovPolicy MarkovPolicy::Uniform(Player player, int horizon, int num_states,
                                   int num_actions) {
  return MarkovPolicy(player, horizon, num_states, num_actions);
}

MarkovPolicy MarkovPolicy::UniformFor(const GameShape& shape, Player player) {
  return MarkovPolicy(player, shape.horizon, shape.num_states,
                      shape.num_actions(player));
}

MarkovPolicy MarkovPolicy::Pure(Player player, int horizon, int num_states,
                                int num_actions, int action) {
  MarkovPolicy pi(player, horizon, num_states, num_actions);
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < num_states; ++s) pi.SetPure(t, s, action);
  }
  return pi;
}

MarkovPolicy MarkovPolicy::FromTable(Player player, int horizon,
                                     int num_states, int num_actions,
                                     std::vector<double> table) {
  MarkovPolicy pi(player, horizon, num_states, num_actions);
  if (table.size() != pi.table_.size()) {
    Fail(ErrorCode::kInvalidArgument, "policy table has wrong size");
  }
  for (int t = 0; t < horizon; ++t) {
    for (int s = 0; s < num_states; ++s) {
      std::span<double> row(
          table.data() + (static_cast<std::size_t>(t) * num_states + s) * num_actions,
          num_actions);
      NormalizeDistribution(row, [&] { return PolicyRowName(t, s); });
    }
  }
  pi.table_ = std::move(table);
  return pi;
}

void MarkovPolicy::SetRow(int t, int s, std::span<const double> probs) {
  if (probs.size() != static_cast<std::size_t>(num_actions_)) {
    Fail(ErrorCode::kInvalidArgument, "policy row has wrong length");
  }
  // Validate a copy so a bad row leaves the table untouched.
  std::array<double, 16> small;
  std::vector<double> large;
  std::span<double> row;
  if (probs.size() <= small.size()) {
    row = std::span<double>(small.data(), probs.size());
  } else {
    large.resize(probs.size());
    row = large;
  }
  std::copy(probs.begin(), probs.end(), row.begin());
  NormalizeDistribution(row, [&] { return PolicyRowName(t, s); });
  std::copy(row.begin(), row.end(),
            table_.begin() + (static_cast<std::size_t>(t) * num_states_ + s) * num_actions_);
}

void MarkovPolicy::SetPure(int t, int s, int action) {
  auto begin = table_.begin() +
               (static_cast<std::size_t>(t) * num_states_ + s) * num_actions_;
  std::fill(begin, begin + num_actions_, 0.0);
  begin[action] = 1.0;
}

PolicyProfile::PolicyProfile(MarkovPolicy a, MarkovPolicy b)
    : p1(std::move(a)), p2(std::move(b)) {
  if (p1.player() != Player::kP1 || p2.player() != Player::kP2) {
    Fail(ErrorCode::kPlayerMismatch, "profile halves belong to wrong players");
  }
  if (p1.horizon() != p2.horizon() || p1.num_states() != p2.num_states()) {
    Fail(ErrorCode::kHorizonMismatch, "profile halves disagree on shape");
  }
}

PolicyProfile PolicyProfile::With(const MarkovPolicy& policy) const {
  PolicyProfile out = *this;
  (policy.player() == Player::kP1 ? out.p1 : out.p2) = policy;
  return out;
}

void CheckPolicyFits(const GameShape& shape, const MarkovPolicy& policy) {
  if (policy.horizon() != shape.horizon ||
      policy.num_states() != shape.num_states) {
    Fail(ErrorCode::kHorizonMismatch,
         "policy shape (T=" + std::to_string(policy.horizon()) + ", S=" +
             std::to_string(policy.num_states()) + ") does not match game");
  }
  if (policy.num_actions() != shape.num_actions(policy.player())) {
    Fail(ErrorCode::kPlayerMismatch, "policy action count does not match game");
  }
}

void CheckProfileFits(const GameShape& shape, const PolicyProfile& profile) {
  if (profile.p1.player() != Player::kP1 || profile.p2.player() != Player::kP2) {
    Fail(ErrorCode::kPlayerMismatch, "profile halves belong to wrong players");
  }
  CheckPolicyFits(shape, profile.p1);
  CheckPolicyFits(shape, profile.p2);
}

double SliceValue(std::span<const double> q_slice, std::span<const double> x,
                  std::span<const double> y) {
  const std::size_t cols = y.size();
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < cols; ++j) row += q_slice[i * cols + j] * y[j];
    total += x[i] * row;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Oracles

ValueTables EvaluateProfile(const Game& game, const PolicyProfile& profile) {
  const GameSpec& spec = game.spec();
  CheckProfileFits(game.shape(), profile);
  const int S = spec.num_states;
  const int T = spec.horizon;
  const int cells = spec.num_cells();
  const int per_state = spec.actions_p1 * spec.actions_p2;

  ValueTables out{T, S, cells,
                  std::vector<double>(static_cast<std::size_t>(T + 1) * S, 0.0),
                  std::vector<double>(static_cast<std::size_t>(T) * cells, 0.0),
                  0.0};
  std::vector<double> next_v(S, 0.0);
  for (int t = T - 1; t >= 0; --t) {
    const double next_mean =
        std::accumulate(next_v.begin(), next_v.end(), 0.0) / S;
    double* q_t = out.q.data() + static_cast<std::size_t>(t) * cells;
    for (int cell = 0; cell < cells; ++cell) {
      q_t[cell] = spec.transition.Backup(cell, next_v, next_mean, spec.discount);
    }
    for (int s = 0; s < S; ++s) {
      out.v[static_cast<std::size_t>(t) * S + s] =
          SliceValue({q_t + static_cast<std::size_t>(s) * per_state,
                      static_cast<std::size_t>(per_state)},
                     profile.p1.row(t, s), profile.p2.row(t, s));
    }
    std::copy(out.v.begin() + static_cast<std::size_t>(t) * S,
              out.v.begin() + static_cast<std::size_t>(t + 1) * S,
              next_v.begin());
  }
  for (int s = 0; s < S; ++s) out.total += spec.initial_dist[s] * out.v[s];
  return out;
}

BestResponse ComputeBestResponse(const Game& game, const MarkovPolicy& opponent,
                                 Player player) {
  const GameSpec& spec = game.spec();
  if (opponent.player() != Opponent(player)) {
    Fail(ErrorCode::kPlayerMismatch, "opponent policy belongs to the responder");
  }
  CheckPolicyFits(game.shape(), opponent);
  const int S = spec.num_states;
  const int T = spec.horizon;
  const int A1 = spec.actions_p1;
  const int A2 = spec.actions_p2;
  const int own_actions = player == Player::kP1 ? A1 : A2;
  // Responder's values are tracked in its own sign convention.
  const double sign = player == Player::kP1 ? 1.0 : -1.0;

  MarkovPolicy response(player, T, S, own_actions);
  std::vector<double> next_v(S, 0.0);  // player-1 values at t + 1
  std::vector<double> cur_v(S, 0.0);
  for (int t = T - 1; t >= 0; --t) {
    const double next_mean =
        std::accumulate(next_v.begin(), next_v.end(), 0.0) / S;
    for (int s = 0; s < S; ++s) {
      const std::span<const double> opp = opponent.row(t, s);
      int best_action = 0;
      double best = -std::numeric_limits<double>::infinity();
      double best_v1 = 0.0;
      for (int a = 0; a < own_actions; ++a) {
        double v1 = 0.0;
        for (int b = 0; b < static_cast<int>(opp.size()); ++b) {
          if (opp[b] == 0.0) continue;
          const int cell = player == Player::kP1 ? spec.Cell(s, a, b)
                                                 : spec.Cell(s, b, a);
          v1 += opp[b] * spec.transition.Backup(cell, next_v, next_mean,
                                                spec.discount);
        }
        const double own = sign * v1;
        if (own > best + kTieTolerance) {
          best = own;
          best_action = a;
          best_v1 = v1;
        }
      }
      response.SetPure(t, s, best_action);
      cur_v[s] = best_v1;
    }
    std::swap(next_v, cur_v);
  }
  double v1 = 0.0;
  for (int s = 0; s < S; ++s) v1 += spec.initial_dist[s] * next_v[s];
  return {std::move(response), sign * v1};
}

double Exploitability(const Game& game, const PolicyProfile& profile) {
  CheckProfileFits(game.shape(), profile);
  return ComputeBestResponse(game, profile.p2, Player::kP1).value +
         ComputeBestResponse(game, profile.p1, Player::kP2).value;
}

NashResult NashEquilibrium(const Game& game) {
  const GameSpec& spec = game.spec();
  const int S = spec.num_states;
  const int T = spec.horizon;
  const int A1 = spec.actions_p1;
  const int A2 = spec.actions_p2;
  MarkovPolicy p1(Player::kP1, T, S, A1);
  MarkovPolicy p2(Player::kP2, T, S, A2);
  std::vector<double> next_v(S, 0.0);
  std::vector<double> cur_v(S, 0.0);
  std::vector<double> slice(static_cast<std::size_t>(A1) * A2);
  for (int t = T - 1; t >= 0; --t) {
    const double next_mean =
        std::accumulate(next_v.begin(), next_v.end(), 0.0) / S;
    for (int s = 0; s < S; ++s) {
      for (int a1 = 0; a1 < A1; ++a1) {
        for (int a2 = 0; a2 < A2; ++a2) {
          slice[a1 * A2 + a2] = spec.transition.Backup(
              spec.Cell(s, a1, a2), next_v, next_mean, spec.discount);
        }
      }
      MatrixGameSolution sol = SolveMatrixGame(slice, A1, A2);
      p1.SetRow(t, s, sol.row_strategy);
      p2.SetRow(t, s, sol.col_strategy);
      cur_v[s] = sol.value;
    }
    std::swap(next_v, cur_v);
  }
  double value = 0.0;
  for (int s = 0; s < S; ++s) value += spec.initial_dist[s] * next_v[s];
  return {PolicyProfile(std::move(p1), std::move(p2)), value};
}

MarginalTable MarginalDistribution(const Game& game,
                                   const PolicyProfile& profile) {
  const GameSpec& spec = game.spec();
  CheckProfileFits(game.shape(), profile);
  const int S = spec.num_states;
  const int T = spec.horizon;
  const int A1 = spec.actions_p1;
  const int A2 = spec.actions_p2;
  const int cells = spec.num_cells();
  MarginalTable out{T, cells,
                    std::vector<double>(static_cast<std::size_t>(T) * cells, 0.0)};
  std::vector<double> state_dist = spec.initial_dist;
  for (int t = 0; t < T; ++t) {
    double* p_t = out.p.data() + static_cast<std::size_t>(t) * cells;
    for (int s = 0; s < S; ++s) {
      if (state_dist[s] == 0.0) continue;
      const auto x = profile.p1.row(t, s);
      const auto y = profile.p2.row(t, s);
      for (int a1 = 0; a1 < A1; ++a1) {
        for (int a2 = 0; a2 < A2; ++a2) {
          p_t[spec.Cell(s, a1, a2)] = state_dist[s] * x[a1] * y[a2];
        }
      }
    }
    if (t + 1 == T) break;
    std::vector<double> next(S, 0.0);
    double uniform_total = 0.0;
    for (int cell = 0; cell < cells; ++cell) {
      if (p_t[cell] != 0.0) {
        spec.transition.Push(cell, p_t[cell], next, &uniform_total);
      }
    }
    if (uniform_total != 0.0) {
      for (double& d : next) d += uniform_total / S;
    }
    state_dist = std::move(next);
  }
  return out;
}

}  // namespace mgope
