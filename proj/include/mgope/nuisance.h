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

#ifndef MGOPE_NUISANCE_H_
#define MGOPE_NUISANCE_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mgope/data.h"
#include "mgope/game.h"

namespace mgope {

// Tabular model fitted from a subset of trajectories, wrapped as a validated
// game so the exact oracles can run on it.
struct EstimatedModel {
  Game game;
  std::vector<int> visit_counts;  // [t * cells + cell]

  double reward_hat(int cell) const { return game.MeanReward(cell); }
  double transition_hat(int cell, int next) const {
    return game.spec().transition.Probability(cell, next);
  }
  double initial_hat(int s) const { return game.spec().initial_dist[s]; }
  int visits(int t, int cell) const {
    return visit_counts[static_cast<std::size_t>(t) * game.num_cells() + cell];
  }
};

// R̂ is the per-cell mean reward clamped to the reward bound (0 when unseen).
// P̂_T and P̂_I use Laplace smoothing with `smoothing`; unseen cells get a
// uniform successor distribution.
EstimatedModel EstimateModel(const Dataset& data, const std::vector<int>& indices,
                             const GameShape& shape, double smoothing);

// Per-(t, s) smoothed action frequencies, independently per player. Rows of
// unvisited (t, s) are uniform.
PolicyProfile EstimateBehaviorPolicy(const Dataset& data,
                                     const std::vector<int>& indices,
                                     const GameShape& shape, double smoothing);

// Clamps |Q̂_t| to (T - t) * R_max (0-based t) and recomputes V̂ = E_π[Q̂].
void ClampValueTables(const GameShape& shape, const PolicyProfile& profile,
                      std::span<const double> initial_dist, ValueTables* tables);

ValueTables QHatModel(const EstimatedModel& model, const PolicyProfile& profile);

// Expected-update TD over the data, `sweeps` passes with a constant rate.
ValueTables QHatTd(const Dataset& data, const std::vector<int>& indices,
                   const GameShape& shape, const PolicyProfile& profile,
                   double learning_rate, int sweeps);

// Realized weights per trajectory; entry t = 0 is 1. Either vector is empty
// when it was not requested.
struct WeightTables {
  int horizon = 0;
  int num_trajectories = 0;
  std::vector<double> rho;  // [i * (T + 1) + t]
  std::vector<double> mu;   // [i * (T + 1) + t]

  double Rho(int i, int t) const {
    return rho[static_cast<std::size_t>(i) * (horizon + 1) + t];
  }
  double Mu(int i, int t) const {
    return mu[static_cast<std::size_t>(i) * (horizon + 1) + t];
  }
};

// C^t for 1-based t, saturating instead of overflowing.
double ClipBound(double clip_base, int t);

// Fills rho for the trajectories in `indices`:
// min(C^t, prod_{k<=t} π(a|s) / π^b(a|s)). Throws kZeroBehaviorDensity.
void RhoWeights(const Dataset& data, const std::vector<int>& indices,
                const PolicyProfile& target, const PolicyProfile& behavior,
                double clip_base, WeightTables* weights);

// μ̂_t(cell) = p̂^π_t / p̂_{b,t}, clipped into [0, C^t]; [t * cells + cell]
// for 0-based t. A zero denominator yields 0 if the numerator is 0 and C^t
// otherwise.
std::vector<double> MuTable(const EstimatedModel& model,
                            std::span<const double> behavior_marginal,
                            const PolicyProfile& target, double clip_base);

// Smoothed occupancy histogram [t * cells + cell] of a trajectory subset.
std::vector<double> BehaviorHistogram(const Dataset& data,
                                      const std::vector<int>& indices,
                                      const GameShape& shape, double smoothing);

void MuWeights(const Dataset& data, const std::vector<int>& indices,
               const GameShape& shape, std::span<const double> mu_table,
               WeightTables* weights);

struct NuisanceOptions {
  double transition_smoothing = 0.5;
  double behavior_smoothing = 0.5;
  double histogram_smoothing = 0.5;
  enum class QMethod { kModel, kTd };
  QMethod q_method = QMethod::kModel;
  double td_learning_rate = 0.05;
  int td_sweeps = 200;
  // Occupancy denominator of μ̂: smoothed histogram of the out-of-fold data,
  // or the forward recursion of the behavior profile on the fitted model.
  enum class MuDenominator { kHistogram, kModel };
  MuDenominator mu_denominator = MuDenominator::kHistogram;
  double clip_base = 100.0;
  // Use Dataset::behavior_known for ρ̂ when present.
  bool use_known_behavior = true;
  // When set, every fold uses the exact model, the known behavior and the
  // exact behavior occupancy.
  const Game* exact_game = nullptr;
};

struct NuisanceNeeds {
  bool q = false;
  bool rho = false;
  bool mu = false;
};

struct FoldNuisance {
  ValueTables q_hat;                          // empty unless requested
  std::optional<PolicyProfile> behavior_hat;  // nullopt: behavior known
  std::vector<double> mu_table;               // empty unless requested
};

struct NuisanceSet {
  GameShape shape;
  std::vector<FoldNuisance> folds;
  double clip_base = 0.0;
};

// Per-fold statistics that do not depend on the target profile, fitted once
// from the out-of-fold data. Fit() then recomputes the target-dependent
// nuisances for any candidate profile.
class CrossFitContext {
 public:
  CrossFitContext(FoldedDataset folded, const GameShape& shape,
                  NuisanceOptions options);

  const FoldedDataset& folded() const { return folded_; }
  const Dataset& data() const { return folded_.dataset; }
  const GameShape& shape() const { return shape_; }
  const NuisanceOptions& options() const { return options_; }
  int num_folds() const { return folded_.num_folds; }
  bool behavior_known() const { return behavior_known_; }
  double clip_base() const { return options_.clip_base; }
  void set_clip_base(double c) { options_.clip_base = c; }

  const EstimatedModel& model(int k) const { return folds_[k].model; }
  const PolicyProfile& behavior(int k) const { return folds_[k].behavior; }
  const std::vector<int>& members(int k) const { return folds_[k].members; }

  std::pair<NuisanceSet, WeightTables> Fit(const PolicyProfile& target,
                                           NuisanceNeeds needs) const;

 private:
  struct Fold {
    EstimatedModel model;
    PolicyProfile behavior;
    std::vector<double> behavior_marginal;
    std::vector<int> members;
    std::vector<int> outside;
  };

  FoldedDataset folded_;
  GameShape shape_;
  NuisanceOptions options_;
  bool behavior_known_ = false;
  std::vector<Fold> folds_;
};

// One-shot cross-fit of every nuisance for `target`.
std::pair<NuisanceSet, WeightTables> FitNuisancesCrossfit(
    const FoldedDataset& folded, const GameShape& shape,
    const PolicyProfile& target, const NuisanceOptions& options);

}  // namespace mgope

#endif  // MGOPE_NUISANCE_H_
