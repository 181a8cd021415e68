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

#include "mgope/estimators.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mgope/error.h"

namespace mgope {
namespace {

void CheckWeights(const Dataset& data, const std::vector<double>& w,
                  const WeightTables& weights, const char* what) {
  const std::size_t expect =
      static_cast<std::size_t>(data.size()) * (data.horizon() + 1);
  if (weights.horizon != data.horizon() || w.size() != expect) {
    Fail(ErrorCode::kWeightShapeMismatch,
         std::string(what) + " weights do not match the dataset shape");
  }
}

void CheckNuisances(const FoldedDataset& folded, const NuisanceSet& nuisances) {
  if (static_cast<int>(nuisances.folds.size()) != folded.num_folds ||
      static_cast<int>(folded.fold_of.size()) != folded.dataset.size()) {
    Fail(ErrorCode::kFoldMismatch, "nuisances were fitted for another fold split");
  }
  if (nuisances.shape.horizon != folded.dataset.horizon()) {
    Fail(ErrorCode::kFoldMismatch, "nuisance shape differs from the dataset");
  }
  for (const FoldNuisance& f : nuisances.folds) {
    if (f.q_hat.q.empty()) Fail(ErrorCode::kMissingNuisance, "Q̂ missing for a fold");
    if (f.q_hat.horizon != folded.dataset.horizon()) {
      Fail(ErrorCode::kFoldMismatch, "Q̂ horizon differs from the dataset");
    }
  }
}

EstimatorResult WeightedReturn(const Dataset& data,
                               const std::vector<double>& w, int T,
                               double discount, Method method) {
  EstimatorResult out;
  out.method = method;
  out.n = data.size();
  out.per_trajectory.resize(data.size());
  for (int i = 0; i < data.size(); ++i) {
    const auto& steps = data.trajectories[i].steps;
    const double* wi = w.data() + static_cast<std::size_t>(i) * (T + 1);
    double psi = 0.0;
    double g = 1.0;
    for (int t = 0; t < T; ++t) {
      psi += g * wi[t + 1] * steps[t].reward;
      g *= discount;
    }
    out.per_trajectory[i] = psi;
  }
  out.estimate = CompensatedMean(out.per_trajectory);
  return out;
}

EstimatorResult DoublyRobust(const FoldedDataset& folded,
                             const NuisanceSet& nuisances,
                             const std::vector<double>& w, double discount,
                             Method method) {
  const Dataset& data = folded.dataset;
  const int T = data.horizon();
  EstimatorResult out;
  out.method = method;
  out.n = data.size();
  out.per_trajectory.resize(data.size());
  for (int i = 0; i < data.size(); ++i) {
    const ValueTables& q = nuisances.folds[folded.fold_of[i]].q_hat;
    const auto& steps = data.trajectories[i].steps;
    const double* wi = w.data() + static_cast<std::size_t>(i) * (T + 1);
    double psi = 0.0;
    double g = 1.0;
    for (int t = 0; t < T; ++t) {
      const Step& st = steps[t];
      const double q_hat = q.Q(t, nuisances.shape.Cell(st.state, st.a1, st.a2));
      psi += g * (wi[t + 1] * (st.reward - q_hat) + wi[t] * q.V(t, st.state));
      g *= discount;
    }
    out.per_trajectory[i] = psi;
  }
  out.estimate = CompensatedMean(out.per_trajectory);
  AttachFoldMeans(folded, &out);
  return out;
}

}  // namespace

std::string MethodName(Method method) {
  switch (method) {
    case Method::kIs: return "IS";
    case Method::kMis: return "MIS";
    case Method::kDm: return "DM";
    case Method::kDr: return "DR";
    case Method::kDrl: return "DRL";
  }
  return "?";
}

Method ParseMethod(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  for (Method m : {Method::kIs, Method::kMis, Method::kDm, Method::kDr, Method::kDrl}) {
    if (MethodName(m) == upper) return m;
  }
  Fail(ErrorCode::kConfigError, "unknown estimator '" + name + "'");
}

NuisanceNeeds NeedsFor(Method method) {
  switch (method) {
    case Method::kIs: return {false, true, false};
    case Method::kMis: return {false, false, true};
    case Method::kDm: return {true, false, false};
    case Method::kDr: return {true, true, false};
    case Method::kDrl: return {true, false, true};
  }
  return {};
}

double EstimatorResult::FoldAverage() const {
  return per_fold.empty() ? estimate : CompensatedMean(per_fold);
}

double CompensatedMean(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : values) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

void AttachFoldMeans(const FoldedDataset& folded, EstimatorResult* result) {
  std::vector<std::vector<double>> by_fold(folded.num_folds);
  for (std::size_t i = 0; i < result->per_trajectory.size(); ++i) {
    by_fold[folded.fold_of[i]].push_back(result->per_trajectory[i]);
  }
  result->per_fold.clear();
  for (const auto& values : by_fold) {
    result->per_fold.push_back(CompensatedMean(values));
  }
}

EstimatorResult EstimateIs(const Dataset& data, const WeightTables& weights,
                           double discount) {
  CheckWeights(data, weights.rho, weights, "rho");
  return WeightedReturn(data, weights.rho, data.horizon(), discount, Method::kIs);
}

EstimatorResult EstimateMis(const Dataset& data, const WeightTables& weights,
                            double discount) {
  CheckWeights(data, weights.mu, weights, "mu");
  return WeightedReturn(data, weights.mu, data.horizon(), discount, Method::kMis);
}

EstimatorResult EstimateDm(const FoldedDataset& folded,
                           const NuisanceSet& nuisances) {
  CheckNuisances(folded, nuisances);
  const Dataset& data = folded.dataset;
  EstimatorResult out;
  out.method = Method::kDm;
  out.n = data.size();
  out.per_trajectory.resize(data.size());
  for (int i = 0; i < data.size(); ++i) {
    out.per_trajectory[i] = nuisances.folds[folded.fold_of[i]].q_hat.V(
        0, data.trajectories[i].steps.front().state);
  }
  out.estimate = CompensatedMean(out.per_trajectory);
  AttachFoldMeans(folded, &out);
  return out;
}

EstimatorResult EstimateDr(const FoldedDataset& folded,
                           const NuisanceSet& nuisances,
                           const WeightTables& weights, double discount) {
  CheckNuisances(folded, nuisances);
  CheckWeights(folded.dataset, weights.rho, weights, "rho");
  return DoublyRobust(folded, nuisances, weights.rho, discount, Method::kDr);
}

EstimatorResult EstimateDrl(const FoldedDataset& folded,
                            const NuisanceSet& nuisances,
                            const WeightTables& weights, double discount) {
  CheckNuisances(folded, nuisances);
  CheckWeights(folded.dataset, weights.mu, weights, "mu");
  return DoublyRobust(folded, nuisances, weights.mu, discount, Method::kDrl);
}

EstimatorResult Estimate(const CrossFitContext& context,
                         const PolicyProfile& target, Method method) {
  const auto [nuisances, weights] = context.Fit(target, NeedsFor(method));
  const double discount = context.shape().discount;
  EstimatorResult out;
  switch (method) {
    case Method::kIs:
      out = EstimateIs(context.data(), weights, discount);
      AttachFoldMeans(context.folded(), &out);
      break;
    case Method::kMis:
      out = EstimateMis(context.data(), weights, discount);
      AttachFoldMeans(context.folded(), &out);
      break;
    case Method::kDm:
      out = EstimateDm(context.folded(), nuisances);
      break;
    case Method::kDr:
      out = EstimateDr(context.folded(), nuisances, weights, discount);
      break;
    case Method::kDrl:
      out = EstimateDrl(context.folded(), nuisances, weights, discount);
      break;
  }
  return out;
}

VarianceReport AsymptoticVariance(const Game& game, const PolicyProfile& target,
                                  const PolicyProfile& behavior) {
  CheckProfileFits(game.shape(), target);
  CheckProfileFits(game.shape(), behavior);
  const GameSpec& spec = game.spec();
  const int S = spec.num_states;
  const int T = spec.horizon;
  const int A1 = spec.actions_p1;
  const int A2 = spec.actions_p2;
  const int cells = spec.num_cells();
  const ValueTables vt = EvaluateProfile(game, target);
  const MarginalTable p_target = MarginalDistribution(game, target);
  const MarginalTable p_behavior = MarginalDistribution(game, behavior);
  const double noise_var = spec.reward_noise.Variance();

  VarianceReport report;
  double mean_v = 0.0;
  double mean_v2 = 0.0;
  for (int s = 0; s < S; ++s) {
    mean_v += spec.initial_dist[s] * vt.V(0, s);
    mean_v2 += spec.initial_dist[s] * vt.V(0, s) * vt.V(0, s);
  }
  report.upsilon_eb = std::max(0.0, mean_v2 - mean_v * mean_v);
  report.upsilon_dr = report.upsilon_eb;

  // w(s) = E_b[ρ_{t-1}^2 ; s_t = s]; per cell the step ratio squared has
  // behavior-expectation Σ π^2 / b.
  std::vector<double> w_state(spec.initial_dist);
  std::vector<double> w_cell(cells);
  double discount_sq = 1.0;
  for (int t = 0; t < T; ++t) {
    std::span<const double> next_v{vt.v.data() + static_cast<std::size_t>(t + 1) * S,
                                   static_cast<std::size_t>(S)};
    for (int s = 0; s < S; ++s) {
      for (int a1 = 0; a1 < A1; ++a1) {
        for (int a2 = 0; a2 < A2; ++a2) {
          const int cell = spec.Cell(s, a1, a2);
          const double pi = target.p1.prob(t, s, a1) * target.p2.prob(t, s, a2);
          const double b = behavior.p1.prob(t, s, a1) * behavior.p2.prob(t, s, a2);
          const double pb = p_behavior.at(t, cell);
          const double pt = p_target.at(t, cell);
          if (pi > 0.0 && b <= 0.0 && w_state[s] > 0.0) {
            Fail(ErrorCode::kOverlapViolated,
                 "target acts where behavior never does at t=" +
                     std::to_string(t + 1) + ", s=" + std::to_string(s));
          }
          w_cell[cell] = b > 0.0 ? w_state[s] * pi * pi / b : 0.0;
          if (pt > 0.0 && pb <= 0.0) {
            Fail(ErrorCode::kOverlapViolated, "target occupancy outside behavior support");
          }
          const double var =
              spec.transition.BackupVariance(cell, next_v, spec.discount) + noise_var;
          if (pb > 0.0) report.upsilon_eb += discount_sq * pt * pt / pb * var;
          report.upsilon_dr += discount_sq * w_cell[cell] * var;
        }
      }
    }
    std::fill(w_state.begin(), w_state.end(), 0.0);
    double uniform_total = 0.0;
    for (int c = 0; c < cells; ++c) {
      if (w_cell[c] != 0.0) spec.transition.Push(c, w_cell[c], w_state, &uniform_total);
    }
    for (double& x : w_state) x += uniform_total / S;
    discount_sq *= spec.discount * spec.discount;
  }
  return report;
}

}  // namespace mgope
