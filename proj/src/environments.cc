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

#include "mgope/environments.h"

#include <cmath>
#include <string>

#include "mgope/error.h"

namespace mgope {
namespace {

constexpr std::array<double, 9> kStandardRps = {0, -1, 1,   //
                                                1, 0, -1,   //
                                                -1, 1, 0};

std::array<double, 9> Scaled(std::array<double, 9> m, double k) {
  for (double& x : m) x *= k;
  return m;
}

}  // namespace

RpsOutcome ClassifyRps(int a1, int a2) {
  if (a1 == a2) return RpsOutcome::kDraw;
  const bool p1_wins = (a1 - a2 + 3) % 3 == 1;
  const int winner = p1_wins ? a1 : a2;
  const int base = p1_wins ? static_cast<int>(RpsOutcome::kP1Rock)
                           : static_cast<int>(RpsOutcome::kP2Rock);
  return static_cast<RpsOutcome>(base + winner);
}

RbrpsConfig DefaultRbrps1Config() {
  RbrpsConfig config;
  config.payoff_matrices = {kStandardRps};
  config.horizon = 1;
  config.discount = 1.0;
  return config;
}

RbrpsConfig DefaultRbrps2Config() {
  RbrpsConfig config;
  config.payoff_matrices = {
      kStandardRps,
      Scaled(kStandardRps, 3.0),
      // rock wins pay double
      {0, -1, 2, 1, 0, -1, -2, 1, 0},
      // paper wins pay double
      {0, -2, 1, 2, 0, -1, -1, 1, 0},
      // scissors wins pay double
      {0, -1, 1, 1, 0, -2, -1, 2, 0},
  };
  config.transition_graph = {
      {{0, RpsOutcome::kDraw}, 1},      {{0, RpsOutcome::kP1Rock}, 2},
      {{0, RpsOutcome::kP2Rock}, 2},    {{0, RpsOutcome::kP1Paper}, 3},
      {{0, RpsOutcome::kP2Paper}, 3},   {{0, RpsOutcome::kP1Scissors}, 4},
      {{0, RpsOutcome::kP2Scissors}, 4},
  };
  config.horizon = 2;
  config.discount = 1.0;
  return config;
}

Game BuildRbrps(const RbrpsConfig& config) {
  const int S = static_cast<int>(config.payoff_matrices.size());
  if (S == 0) Fail(ErrorCode::kDanglingStateReference, "no states declared");
  for (const auto& [key, next] : config.transition_graph) {
    if (key.first < 0 || key.first >= S || next < 0 || next >= S) {
      Fail(ErrorCode::kDanglingStateReference,
           "transition " + std::to_string(key.first) + " -> " +
               std::to_string(next) + " references a missing state");
    }
  }
  double bound = 0.0;
  for (const auto& m : config.payoff_matrices) {
    for (double x : m) bound = std::max(bound, std::abs(x));
  }
  GameSpec spec;
  spec.num_states = S;
  spec.actions_p1 = 3;
  spec.actions_p2 = 3;
  spec.horizon = config.horizon;
  spec.discount = config.discount;
  spec.initial_dist.assign(S, 0.0);
  spec.initial_dist[0] = 1.0;
  spec.reward_bound = bound;
  spec.transition = TransitionModel(S, spec.num_cells());
  for (int s = 0; s < S; ++s) {
    for (int a1 = 0; a1 < 3; ++a1) {
      for (int a2 = 0; a2 < 3; ++a2) {
        const auto it = config.transition_graph.find({s, ClassifyRps(a1, a2)});
        const int next = it == config.transition_graph.end() ? s : it->second;
        spec.transition.SetRow(spec.Cell(s, a1, a2),
                               {{next, 1.0, config.payoff_matrices[s][a1 * 3 + a2]}});
      }
    }
  }
  return ValidateGame(std::move(spec));
}

// ---------------------------------------------------------------------------
// Soccer

int EncodeSoccerState(const SoccerState& state) {
  const int a = state.pos_a - 1;
  const int b = state.pos_b - 1;
  const int pair = a * (kSoccerCells - 1) + (b < a ? b : b - 1);
  return pair * 2 + (state.ball == Player::kP1 ? 0 : 1);
}

SoccerState DecodeSoccerState(int index) {
  const int pair = index / 2;
  const int a = pair / (kSoccerCells - 1);
  int b = pair % (kSoccerCells - 1);
  if (b >= a) ++b;
  return {a + 1, b + 1, index % 2 == 0 ? Player::kP1 : Player::kP2};
}

namespace {

enum class MoveOutcome { kMoved, kGoal, kCollision };

// Applies one player's move in place. A collision leaves `state` untouched.
MoveOutcome ApplySoccerMove(SoccerState& state, Player mover, int action) {
  int& pos = mover == Player::kP1 ? state.pos_a : state.pos_b;
  const int other = mover == Player::kP1 ? state.pos_b : state.pos_a;
  const int row = (pos - 1) / kSoccerCols;
  const int col = (pos - 1) % kSoccerCols;
  int nrow = row;
  int ncol = col;
  switch (action) {
    case kUp: --nrow; break;
    case kDown: ++nrow; break;
    case kLeft: --ncol; break;
    case kRight: ++ncol; break;
    default: return MoveOutcome::kMoved;
  }
  if (state.ball == mover && (row == 1 || row == 2)) {
    if (mover == Player::kP1 && action == kRight && col == kSoccerCols - 1) {
      return MoveOutcome::kGoal;
    }
    if (mover == Player::kP2 && action == kLeft && col == 0) {
      return MoveOutcome::kGoal;
    }
  }
  if (nrow < 0 || nrow >= kSoccerRows || ncol < 0 || ncol >= kSoccerCols) {
    return MoveOutcome::kMoved;
  }
  const int target = nrow * kSoccerCols + ncol + 1;
  if (target == other) return MoveOutcome::kCollision;
  pos = target;
  return MoveOutcome::kMoved;
}

}  // namespace

// A collision in either half of the step keeps both players where they
// started and hands the ball to the player that was not moving.
SoccerTransition SoccerStep(const SoccerState& state, int action_a,
                            int action_b, bool p1_first) {
  SoccerState s = state;
  const Player first = p1_first ? Player::kP1 : Player::kP2;
  const Player second = Opponent(first);
  const int first_action = p1_first ? action_a : action_b;
  const int second_action = p1_first ? action_b : action_a;
  for (auto [mover, action] : {std::pair{first, first_action},
                               std::pair{second, second_action}}) {
    switch (ApplySoccerMove(s, mover, action)) {
      case MoveOutcome::kGoal:
        return {SoccerTerminalState(), mover == Player::kP1 ? 1.0 : -1.0};
      case MoveOutcome::kCollision: {
        SoccerState reverted = state;
        reverted.ball = Opponent(mover);
        return {EncodeSoccerState(reverted), 0.0};
      }
      case MoveOutcome::kMoved:
        break;
    }
  }
  return {EncodeSoccerState(s), 0.0};
}

Game BuildMarkovSoccer(const SoccerConfig& config) {
  auto valid_cell = [](int c) { return c >= 1 && c <= kSoccerCells; };
  if (!valid_cell(config.init_pos_a) || !valid_cell(config.init_pos_b) ||
      config.init_pos_a == config.init_pos_b) {
    Fail(ErrorCode::kInvalidCell, "initial cells must be distinct and in 1..20");
  }
  if (config.horizon < 1) {
    Fail(ErrorCode::kInvalidArgument, "soccer horizon must be >= 1");
  }
  GameSpec spec;
  spec.num_states = kSoccerNumStates;
  spec.actions_p1 = kSoccerActions;
  spec.actions_p2 = kSoccerActions;
  spec.horizon = config.horizon;
  spec.discount = config.discount;
  spec.reward_bound = 1.0;
  spec.initial_dist.assign(kSoccerNumStates, 0.0);
  spec.initial_dist[EncodeSoccerState(
      {config.init_pos_a, config.init_pos_b, config.init_ball})] = 1.0;
  spec.transition = TransitionModel(kSoccerNumStates, spec.num_cells());
  const int terminal = SoccerTerminalState();
  for (int s = 0; s < kSoccerNumStates; ++s) {
    for (int a1 = 0; a1 < kSoccerActions; ++a1) {
      for (int a2 = 0; a2 < kSoccerActions; ++a2) {
        std::vector<Outcome> row;
        if (s == terminal) {
          row.push_back({terminal, 1.0, 0.0});
        } else {
          const SoccerState state = DecodeSoccerState(s);
          for (bool p1_first : {true, false}) {
            const SoccerTransition tr = SoccerStep(state, a1, a2, p1_first);
            row.push_back({tr.next, 0.5, tr.reward});
          }
        }
        spec.transition.SetRow(spec.Cell(s, a1, a2), std::move(row));
      }
    }
  }
  return ValidateGame(std::move(spec));
}

// ---------------------------------------------------------------------------
// Mixing

MarkovPolicy MixPolicies(const MarkovPolicy& base, const MarkovPolicy& other,
                         std::span<const double> alpha_per_state) {
  if (base.player() != other.player()) {
    Fail(ErrorCode::kPlayerMismatch, "cannot mix policies of different players");
  }
  if (base.horizon() != other.horizon() ||
      base.num_states() != other.num_states() ||
      base.num_actions() != other.num_actions()) {
    Fail(ErrorCode::kHorizonMismatch, "cannot mix policies of different shapes");
  }
  if (alpha_per_state.size() != static_cast<std::size_t>(base.num_states())) {
    Fail(ErrorCode::kInvalidArgument, "need one mixing weight per state");
  }
  for (double a : alpha_per_state) {
    if (!(a >= 0.0 && a <= 1.0)) {
      Fail(ErrorCode::kAlphaOutOfRange,
           "mixing weight " + std::to_string(a) + " outside [0, 1]");
    }
  }
  MarkovPolicy out = base;
  std::vector<double> row(base.num_actions());
  for (int t = 0; t < base.horizon(); ++t) {
    for (int s = 0; s < base.num_states(); ++s) {
      const double a = alpha_per_state[s];
      const auto x = base.row(t, s);
      const auto y = other.row(t, s);
      double sum = 0.0;
      for (int k = 0; k < base.num_actions(); ++k) {
        row[k] = a * x[k] + (1.0 - a) * y[k];
        sum += row[k];
      }
      for (double& p : row) p /= sum;
      out.SetRow(t, s, row);
    }
  }
  return out;
}

MarkovPolicy MixPolicies(const MarkovPolicy& base, const MarkovPolicy& other,
                         double alpha) {
  const std::vector<double> per_state(base.num_states(), alpha);
  return MixPolicies(base, other, per_state);
}

}  // namespace mgope
