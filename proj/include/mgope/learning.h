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

#ifndef MGOPE_LEARNING_H_
#define MGOPE_LEARNING_H_

#include <cstdint>
#include <vector>

#include "mgope/game.h"

namespace mgope {

struct MinimaxQOptions {
  int episodes = 50000;
  // Each player explores uniformly with this probability, independently.
  double epsilon = 0.2;
  // Step size for the k-th update of a cell is 1 / (1 + k / visit_scale).
  double visit_scale = 100.0;
  std::uint64_t seed = 0;
};

struct MinimaxQResult {
  PolicyProfile profile;
  std::vector<double> q;     // [t * num_cells + cell]
  std::vector<int> visits;   // same layout
  std::vector<double> value; // [t * num_states + s], t = 0..horizon
  int num_cells = 0;
  int num_states = 0;

  double Q(int t, int cell) const { return q[static_cast<std::size_t>(t) * num_cells + cell]; }
  int Visits(int t, int cell) const {
    return visits[static_cast<std::size_t>(t) * num_cells + cell];
  }
};

// Tabular time-indexed Minimax-Q. Unvisited slices get uniform strategies.
MinimaxQResult MinimaxQ(const Game& game, const MinimaxQOptions& options);

}  // namespace mgope

#endif  // MGOPE_LEARNING_H_
