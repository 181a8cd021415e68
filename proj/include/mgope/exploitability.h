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

#ifndef MGOPE_EXPLOITABILITY_H_
#define MGOPE_EXPLOITABILITY_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mgope/estimators.h"
#include "mgope/game.h"
#include "mgope/nuisance.h"
#include "mgope/rng.h"

namespace mgope {

class PolicyClass {
 public:
  enum class Kind { kFullMarkov, kMixture, kFiniteSet };

  // Ω_i: every Markov policy of `player`.
  static PolicyClass FullMarkov(Player player, int horizon, int num_states,
                                int num_actions);
  static PolicyClass FullMarkov(const GameShape& shape, Player player);
  // {α base + (1 - α) anchor}, one α per state or a single shared α.
  static PolicyClass Mixture(MarkovPolicy base, MarkovPolicy anchor,
                             bool per_state_alpha);
  // Throws kInvalidArgument when empty.
  static PolicyClass FiniteSet(std::vector<MarkovPolicy> members);

  Kind kind() const { return kind_; }
  Player player() const { return player_; }
  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  bool per_state_alpha() const { return per_state_alpha_; }
  int num_alphas() const { return per_state_alpha_ ? num_states_ : 1; }
  const MarkovPolicy& base() const { return base_; }
  const MarkovPolicy& anchor() const { return anchor_; }
  // Throws kAlphaOutOfRange.
  MarkovPolicy At(std::span<const double> alpha) const;
  MarkovPolicy At(double alpha) const;

  const std::vector<MarkovPolicy>& members() const { return members_; }

  // Largest probability any member can put on (t, s, a); 1 for Ω.
  double MaxProb(int t, int s, int a) const;
  // A random member (random α, random member, or random Dirichlet rows).
  MarkovPolicy Sample(CounterRng& rng) const;

 private:
  Kind kind_ = Kind::kFullMarkov;
  Player player_ = Player::kP1;
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  bool per_state_alpha_ = false;
  MarkovPolicy base_;
  MarkovPolicy anchor_;
  std::vector<MarkovPolicy> members_;
};

struct OptimizerOptions {
  int grid_points = 101;          // per α coordinate
  double golden_tolerance = 1e-4;
  int coordinate_sweeps = 8;      // per-state α cycles
  int restarts = 8;               // Ω coordinate ascent
  int max_ascent_sweeps = 100;
  int minimax_sweeps = 16;
  int saddle_grid_points = 21;    // per α coordinate in saddle scans
  bool saddle_refine = true;      // golden refinement after the saddle scan
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  MarkovPolicy policy;
  double value = 0.0;
  std::vector<double> alpha;  // mixtures only
  int evaluations = 0;
};

using Objective = std::function<double(const MarkovPolicy&)>;

OptimizeResult MaximizeObjective(const Objective& objective,
                                 const PolicyClass& policy_class,
                                 const OptimizerOptions& options);

// C = Π_i max over (t, s, a) of max_{π ∈ Π_i ∪ {π^e_i}} π(a|s) / π^b_i(a|s),
// or `fallback` when some ratio is unbounded.
double AutoClipBase(const PolicyProfile& behavior, const PolicyClass& class_p1,
                    const PolicyClass& class_p2, const PolicyProfile* target,
                    double fallback);

// π ↦ (1/K) Σ_k v̂^k_1(π) under `method`.
double CrossFitObjective(const CrossFitContext& context,
                         const PolicyProfile& profile, Method method);

struct ExploitabilityEstimate {
  double total = 0.0;
  double max_p1_value = 0.0;
  double max_p2_value = 0.0;
  MarkovPolicy argmax_p1;
  MarkovPolicy argmax_p2;
  Method method = Method::kDr;
  std::vector<std::string> optimizer_trace;
};

ExploitabilityEstimate EstimateExploitability(const CrossFitContext& context,
                                              const PolicyProfile& target,
                                              const PolicyClass& class_p1,
                                              const PolicyClass& class_p2,
                                              Method method,
                                              const OptimizerOptions& options);

// Exact v^exp_Π: best response for Ω, the optimizer on the exact value
// otherwise.
double TrueClassExploitability(const Game& game, const PolicyProfile& target,
                               const PolicyClass& class_p1,
                               const PolicyClass& class_p2,
                               const OptimizerOptions& options);

struct SelectionDiagnostics {
  // max_{π1} f(π1, π̂2) - min_{π2} f(π̂1, π2) for the estimated objective f.
  double gap = 0.0;
  int sweeps = 0;
  bool converged = true;
  int evaluations = 0;
  std::string solver;
};

struct SelectionResult {
  PolicyProfile profile;
  SelectionDiagnostics diagnostics;
};

// π̂1 ∈ argmax_{Π1} min_{Π2} f and π̂2 ∈ argmax_{Π2} min_{Π1} (-f) for a
// two-argument objective f = v̂_1.
using ProfileObjective =
    std::function<double(const MarkovPolicy&, const MarkovPolicy&)>;

SelectionResult SolveMaxMin(const ProfileObjective& objective,
                            const PolicyClass& class_p1,
                            const PolicyClass& class_p2,
                            const OptimizerOptions& options);

SelectionResult SelectBestProfile(const CrossFitContext& context,
                                  const PolicyClass& class_p1,
                                  const PolicyClass& class_p2, Method method,
                                  const OptimizerOptions& options);

}  // namespace mgope

#endif  // MGOPE_EXPLOITABILITY_H_
