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

#ifndef MGOPE_ESTIMATORS_H_
#define MGOPE_ESTIMATORS_H_

#include <string>
#include <vector>

#include "mgope/data.h"
#include "mgope/game.h"
#include "mgope/nuisance.h"

namespace mgope {

enum class Method { kIs, kMis, kDm, kDr, kDrl };

std::string MethodName(Method method);
// Throws kConfigError on an unknown name. Accepts "IS", "is", ...
Method ParseMethod(const std::string& name);
NuisanceNeeds NeedsFor(Method method);

struct EstimatorResult {
  Method method = Method::kIs;
  double estimate = 0.0;                // mean of per_trajectory
  std::vector<double> per_fold;         // fold means; empty without folds
  std::vector<double> per_trajectory;   // ψ_i
  int n = 0;

  // Mean of the fold means, the cross-fitted objective (1/K) Σ_k v^k.
  double FoldAverage() const;
  double Player2() const { return -estimate; }
};

// Kahan-compensated mean in index order.
double CompensatedMean(std::span<const double> values);

EstimatorResult EstimateIs(const Dataset& data, const WeightTables& weights,
                           double discount);
EstimatorResult EstimateMis(const Dataset& data, const WeightTables& weights,
                            double discount);
// Throws kMissingNuisance.
EstimatorResult EstimateDm(const FoldedDataset& folded,
                           const NuisanceSet& nuisances);
// Throws kMissingNuisance, kFoldMismatch, kWeightShapeMismatch.
EstimatorResult EstimateDr(const FoldedDataset& folded,
                           const NuisanceSet& nuisances,
                           const WeightTables& weights, double discount);
EstimatorResult EstimateDrl(const FoldedDataset& folded,
                            const NuisanceSet& nuisances,
                            const WeightTables& weights, double discount);

// Folds per_fold means into a result that already has per_trajectory.
void AttachFoldMeans(const FoldedDataset& folded, EstimatorResult* result);

// Fits what `method` needs for `target` and runs the estimator.
EstimatorResult Estimate(const CrossFitContext& context,
                         const PolicyProfile& target, Method method);

struct VarianceReport {
  double upsilon_eb = 0.0;
  double upsilon_dr = 0.0;
  double empirical_var = 0.0;  // filled by callers that simulate
};

// Exact Υ_EB and Υ^DR by forward recursion over the behavior law.
// Throws kOverlapViolated.
VarianceReport AsymptoticVariance(const Game& game, const PolicyProfile& target,
                                  const PolicyProfile& behavior);

}  // namespace mgope

#endif  // MGOPE_ESTIMATORS_H_
