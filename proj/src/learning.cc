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

#include "mgope/learning.h"

#include <algorithm>

#include "mgope/data.h"
#include "mgope/error.h"
#include "mgope/rng.h"

namespace mgope {
namespace {

struct Slice {
  bool dirty = false;
  bool touched = false;
  double value = 0.0;
  std::vector<double> row;
  std::vector<double> col;
};

}  // namespace

MinimaxQResult MinimaxQ(const Game& game, const MinimaxQOptions& options) {
  if (options.episodes < 1) Fail(ErrorCode::kInvalidArgument, "episodes must be >= 1");
  if (!(options.epsilon >= 0.0 && options.epsilon <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must lie in [0, 1]");
  }
  if (!(options.visit_scale > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "visit_scale must be positive");
  }
  const GameShape shape = game.shape();
  const int T = shape.horizon;
  const int S = shape.num_states;
  const int A1 = shape.actions_p1;
  const int A2 = shape.actions_p2;
  const int cells = shape.num_cells();
  MinimaxQResult out;
  out.num_cells = cells;
  out.num_states = S;
  out.q.assign(static_cast<std::size_t>(T) * cells, 0.0);
  out.visits.assign(out.q.size(), 0);

  std::vector<Slice> slices(static_cast<std::size_t>(T) * S);
  for (auto& sl : slices) {
    sl.row.assign(A1, 1.0 / A1);
    sl.col.assign(A2, 1.0 / A2);
  }
  std::vector<double> m(static_cast<std::size_t>(A1) * A2);
  auto refresh = [&](int t, int s) -> Slice& {
    Slice& sl = slices[static_cast<std::size_t>(t) * S + s];
    if (sl.dirty) {
      const double* q = &out.q[static_cast<std::size_t>(t) * cells + shape.Cell(s, 0, 0)];
      std::copy(q, q + A1 * A2, m.begin());
      MatrixGameSolution sol = SolveMatrixGame(m, A1, A2);
      sl.value = sol.value;
      sl.row = std::move(sol.row_strategy);
      sl.col = std::move(sol.col_strategy);
      sl.dirty = false;
    }
    return sl;
  };

  const double gamma = shape.discount;
  for (int e = 0; e < options.episodes; ++e) {
    CounterRng rng(options.seed, StreamId(e, 0, 9));
    int s = rng.Categorical(game.spec().initial_dist);
    for (int t = 0; t < T; ++t) {
      const Slice& sl = refresh(t, s);
      const int a1 = rng.Uniform() < options.epsilon ? static_cast<int>(rng.Below(A1))
                                                     : rng.Categorical(sl.row);
      const int a2 = rng.Uniform() < options.epsilon ? static_cast<int>(rng.Below(A2))
                                                     : rng.Categorical(sl.col);
      const int cell = shape.Cell(s, a1, a2);
      const double u = rng.Uniform();
      const SampledTransition next = SampleTransition(game, cell, u, rng);
      const double future = t + 1 < T ? refresh(t + 1, next.next).value : 0.0;
      const std::size_t idx = static_cast<std::size_t>(t) * cells + cell;
      const double step = 1.0 / (1.0 + out.visits[idx] / options.visit_scale);
      ++out.visits[idx];
      const double before = out.q[idx];
      out.q[idx] += step * (next.reward + gamma * future - before);
      Slice& updated = slices[static_cast<std::size_t>(t) * S + s];
      updated.touched = true;
      if (out.q[idx] != before) updated.dirty = true;
      s = next.next;
    }
  }

  MarkovPolicy p1 = MarkovPolicy::Uniform(Player::kP1, T, S, A1);
  MarkovPolicy p2 = MarkovPolicy::Uniform(Player::kP2, T, S, A2);
  out.value.assign(static_cast<std::size_t>(T + 1) * S, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      Slice& sl = refresh(t, s);
      if (!sl.touched) continue;
      p1.SetRow(t, s, sl.row);
      p2.SetRow(t, s, sl.col);
      out.value[static_cast<std::size_t>(t) * S + s] = sl.value;
    }
  }
  out.profile = PolicyProfile(std::move(p1), std::move(p2));
  return out;
}

}  // namespace mgope
