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

#ifndef MGOPE_ENVIRONMENTS_H_
#define MGOPE_ENVIRONMENTS_H_

#include <array>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mgope/game.h"

namespace mgope {

// ---------------------------------------------------------------------------
// Repeated biased rock-paper-scissors.

inline constexpr int kRock = 0;
inline constexpr int kPaper = 1;
inline constexpr int kScissors = 2;

enum class RpsOutcome {
  kDraw,
  kP1Rock,
  kP1Paper,
  kP1Scissors,
  kP2Rock,
  kP2Paper,
  kP2Scissors,
};

RpsOutcome ClassifyRps(int a1, int a2);

struct RbrpsConfig {
  // Row-major 3x3 payoff for player 1, one matrix per state. State 0 is the
  // initial state.
  std::vector<std::array<double, 9>> payoff_matrices;
  // Missing (state, outcome) entries are self-loops.
  std::map<std::pair<int, RpsOutcome>, int> transition_graph;
  int horizon = 1;
  double discount = 1.0;
};

// Single-state standard RPS, T = 1.
RbrpsConfig DefaultRbrps1Config();

// Five states, T = 2: state 0 plays standard RPS, then a draw leads to state
// 1 and a win by rock / paper / scissors (either player) leads to state 2 / 3
// / 4. The follow-up matrices are biased (the winning throw of the previous
// round pays double, draws lead to a 3x-scaled game).
RbrpsConfig DefaultRbrps2Config();

// Throws kDanglingStateReference.
Game BuildRbrps(const RbrpsConfig& config);

// ---------------------------------------------------------------------------
// Markov soccer on a 4x5 grid. Cells are numbered 1..20 row-major. Actions
// are up/down/left/right/stay. Player A (player 1) scores by carrying the
// ball right out of cell 10 or 15; player B scores by carrying it left out of
// cell 6 or 11.

inline constexpr int kSoccerRows = 4;
inline constexpr int kSoccerCols = 5;
inline constexpr int kSoccerCells = kSoccerRows * kSoccerCols;
inline constexpr int kSoccerActions = 5;
inline constexpr int kSoccerNumStates = kSoccerCells * (kSoccerCells - 1) * 2 + 1;

enum SoccerAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };

struct SoccerConfig {
  int init_pos_a = 8;
  int init_pos_b = 13;
  Player init_ball = Player::kP1;
  int horizon = 20;
  double discount = 0.9;
};

struct SoccerState {
  int pos_a = 1;  // 1..20
  int pos_b = 2;  // 1..20
  Player ball = Player::kP1;
  bool operator==(const SoccerState&) const = default;
};

int EncodeSoccerState(const SoccerState& state);
SoccerState DecodeSoccerState(int index);
inline constexpr int SoccerTerminalState() { return kSoccerNumStates - 1; }

struct SoccerTransition {
  int next = 0;
  double reward = 0.0;
};

// One step with a fixed execution order (`p1_first`). Exposed for tests.
SoccerTransition SoccerStep(const SoccerState& state, int action_a,
                            int action_b, bool p1_first);

// Throws kInvalidCell.
Game BuildMarkovSoccer(const SoccerConfig& config);

// ---------------------------------------------------------------------------
// Policy mixing: alpha * base + (1 - alpha) * other, per (t, s).

// Throws kAlphaOutOfRange, kPlayerMismatch, kHorizonMismatch.
MarkovPolicy MixPolicies(const MarkovPolicy& base, const MarkovPolicy& other,
                         double alpha);
// One weight per state, shared across time steps.
MarkovPolicy MixPolicies(const MarkovPolicy& base, const MarkovPolicy& other,
                         std::span<const double> alpha_per_state);

}  // namespace mgope

#endif  // MGOPE_ENVIRONMENTS_H_
