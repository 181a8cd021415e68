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

#ifndef MGOPE_DATA_H_
#define MGOPE_DATA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgope/game.h"
#include "mgope/rng.h"

namespace mgope {

struct Step {
  int state = 0;
  int a1 = 0;
  int a2 = 0;
  double reward = 0.0;
  bool operator==(const Step&) const = default;
};

struct Trajectory {
  std::vector<Step> steps;  // length T
  int terminal_state = 0;   // s_{T+1}
  bool operator==(const Trajectory&) const = default;
};

struct Dataset {
  std::uint64_t game_fingerprint = 0;
  // The logging profile when it is known to the analyst. Not serialized.
  std::optional<PolicyProfile> behavior_known;
  std::vector<Trajectory> trajectories;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(trajectories.size()); }
  int horizon() const {
    return trajectories.empty()
               ? 0
               : static_cast<int>(trajectories.front().steps.size());
  }
  bool operator==(const Dataset&) const = default;
};

struct FoldedDataset {
  Dataset dataset;
  int num_folds = 0;
  std::vector<int> fold_of;  // trajectory index -> fold

  int fold_size(int k) const;
  std::vector<int> indices_in(int k) const;
  std::vector<int> indices_outside(int k) const;
};

struct SampledTransition {
  int next = 0;
  double reward = 0.0;
};

// Draws the successor of `cell` from the uniform variate `u` and adds reward
// noise from `noise_rng` when the game is noisy.
SampledTransition SampleTransition(const Game& game, int cell, double u,
                                   CounterRng& noise_rng);

// Trajectory i draws from the counter-based streams (seed, i, t, substream),
// so the result does not depend on `threads`.
Dataset Simulate(const Game& game, const PolicyProfile& behavior, int n,
                 std::uint64_t seed, int threads = 1);

// Throws kTooManyFolds unless 2 <= K <= n.
FoldedDataset AssignFolds(Dataset dataset, int num_folds, std::uint64_t seed);

// Throws kSchemaMismatch.
std::string SerializeDataset(const Dataset& dataset);
Dataset ParseDataset(const std::string& text);

// Throws kIoError, kSchemaMismatch, and kFingerprintMismatch when `expected`
// is given and the file was produced for another game.
void WriteDataset(const Dataset& dataset, const std::string& path);
Dataset ReadDataset(const std::string& path, const Game* expected = nullptr);

// Mean over trajectories of sum_t discount^(t-1) r_t.
double EmpiricalReturn(const Dataset& dataset, double discount);

// Per-(t, cell) visit counts of a subset of trajectories.
std::vector<int> VisitCounts(const Dataset& dataset, const GameShape& shape,
                             const std::vector<int>& indices);

}  // namespace mgope

#endif  // MGOPE_DATA_H_
