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

#include "mgope/nuisance.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mgope/error.h"

namespace mgope {
namespace {

std::vector<double> EmpiricalInitial(const Dataset& data,
                                     const std::vector<int>& indices,
                                     int num_states) {
  std::vector<double> dist(num_states, 0.0);
  for (int i : indices) dist[data.trajectories[i].steps.front().state] += 1.0;
  for (double& p : dist) p /= static_cast<double>(indices.size());
  return dist;
}

void RecomputeValues(const GameShape& shape, const PolicyProfile& profile,
                     std::span<const double> initial_dist, ValueTables* vt) {
  const int S = shape.num_states;
  const int per_state = shape.actions_p1 * shape.actions_p2;
  for (int t = 0; t < shape.horizon; ++t) {
    const double* q_t = vt->q.data() + static_cast<std::size_t>(t) * vt->num_cells;
    for (int s = 0; s < S; ++s) {
      vt->v[static_cast<std::size_t>(t) * S + s] =
          SliceValue({q_t + static_cast<std::size_t>(s) * per_state,
                      static_cast<std::size_t>(per_state)},
                     profile.p1.row(t, s), profile.p2.row(t, s));
    }
  }
  vt->total = 0.0;
  for (int s = 0; s < S; ++s) vt->total += initial_dist[s] * vt->v[s];
}

}  // namespace

EstimatedModel EstimateModel(const Dataset& data, const std::vector<int>& indices,
                             const GameShape& shape, double smoothing) {
  if (indices.empty()) {
    Fail(ErrorCode::kInvalidArgument, "cannot fit a model to zero trajectories");
  }
  const int S = shape.num_states;
  const int cells = shape.num_cells();
  const int T = shape.horizon;
  std::vector<std::map<int, int>> successors(cells);
  std::vector<double> reward_sum(cells, 0.0);
  std::vector<int> visits(cells, 0);
  std::vector<int> visit_counts(static_cast<std::size_t>(T) * cells, 0);
  std::vector<double> initial(S, 0.0);
  for (int i : indices) {
    const Trajectory& traj = data.trajectories[i];
    initial[traj.steps.front().state] += 1.0;
    for (int t = 0; t < T; ++t) {
      const Step& st = traj.steps[t];
      const int cell = shape.Cell(st.state, st.a1, st.a2);
      const int next = t + 1 < T ? traj.steps[t + 1].state : traj.terminal_state;
      ++successors[cell][next];
      reward_sum[cell] += st.reward;
      ++visits[cell];
      ++visit_counts[static_cast<std::size_t>(t) * cells + cell];
    }
  }
  GameSpec spec;
  spec.num_states = S;
  spec.actions_p1 = shape.actions_p1;
  spec.actions_p2 = shape.actions_p2;
  spec.horizon = T;
  spec.discount = shape.discount;
  spec.reward_bound = shape.reward_bound;
  spec.transition = TransitionModel(S, cells);
  for (int cell = 0; cell < cells; ++cell) {
    const int n = visits[cell];
    if (n == 0) {
      spec.transition.SetRow(cell, {}, 1.0, 0.0);
      continue;
    }
    const double r = std::clamp(reward_sum[cell] / n, -shape.reward_bound,
                                shape.reward_bound);
    const double denom = n + smoothing * S;
    std::vector<Outcome> row;
    row.reserve(successors[cell].size());
    for (const auto& [next, count] : successors[cell]) {
      row.push_back({next, count / denom, r});
    }
    spec.transition.SetRow(cell, std::move(row), smoothing * S / denom, r);
  }
  const double init_denom = static_cast<double>(indices.size()) + smoothing * S;
  spec.initial_dist.resize(S);
  for (int s = 0; s < S; ++s) {
    spec.initial_dist[s] = (initial[s] + smoothing) / init_denom;
  }
  return {ValidateGame(std::move(spec)), std::move(visit_counts)};
}

PolicyProfile EstimateBehaviorPolicy(const Dataset& data,
                                     const std::vector<int>& indices,
                                     const GameShape& shape, double smoothing) {
  const int S = shape.num_states;
  const int T = shape.horizon;
  auto fit = [&](Player player) {
    const int A = shape.num_actions(player);
    std::vector<double> counts(static_cast<std::size_t>(T) * S * A, 0.0);
    for (int i : indices) {
      const auto& steps = data.trajectories[i].steps;
      for (int t = 0; t < T; ++t) {
        const int a = player == Player::kP1 ? steps[t].a1 : steps[t].a2;
        counts[(static_cast<std::size_t>(t) * S + steps[t].state) * A + a] += 1.0;
      }
    }
    for (std::size_t block = 0; block < static_cast<std::size_t>(T) * S; ++block) {
      double* row = counts.data() + block * A;
      double n = 0.0;
      for (int a = 0; a < A; ++a) n += row[a];
      const double denom = n + smoothing * A;
      for (int a = 0; a < A; ++a) {
        row[a] = denom > 0.0 ? (row[a] + smoothing) / denom : 1.0 / A;
      }
    }
    return MarkovPolicy::FromTable(player, T, S, A, std::move(counts));
  };
  return PolicyProfile(fit(Player::kP1), fit(Player::kP2));
}

void ClampValueTables(const GameShape& shape, const PolicyProfile& profile,
                      std::span<const double> initial_dist, ValueTables* tables) {
  bool clamped = false;
  for (int t = 0; t < shape.horizon; ++t) {
    const double bound = (shape.horizon - t) * shape.reward_bound;
    double* q_t = tables->q.data() + static_cast<std::size_t>(t) * tables->num_cells;
    for (int c = 0; c < tables->num_cells; ++c) {
      if (std::abs(q_t[c]) > bound) {
        q_t[c] = std::clamp(q_t[c], -bound, bound);
        clamped = true;
      }
    }
  }
  if (clamped) RecomputeValues(shape, profile, initial_dist, tables);
}

ValueTables QHatModel(const EstimatedModel& model, const PolicyProfile& profile) {
  ValueTables vt = EvaluateProfile(model.game, profile);
  ClampValueTables(model.game.shape(), profile, model.game.spec().initial_dist,
                   &vt);
  return vt;
}

ValueTables QHatTd(const Dataset& data, const std::vector<int>& indices,
                   const GameShape& shape, const PolicyProfile& profile,
                   double learning_rate, int sweeps) {
  CheckProfileFits(shape, profile);
  const int S = shape.num_states;
  const int T = shape.horizon;
  const int cells = shape.num_cells();
  const int per_state = shape.actions_p1 * shape.actions_p2;
  ValueTables vt{T, S, cells,
                 std::vector<double>(static_cast<std::size_t>(T + 1) * S, 0.0),
                 std::vector<double>(static_cast<std::size_t>(T) * cells, 0.0),
                 0.0};
  auto slice = [&](int t, int s) {
    return SliceValue({vt.q.data() + static_cast<std::size_t>(t) * cells +
                           static_cast<std::size_t>(s) * per_state,
                       static_cast<std::size_t>(per_state)},
                      profile.p1.row(t, s), profile.p2.row(t, s));
  };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int i : indices) {
      const Trajectory& traj = data.trajectories[i];
      for (int t = 0; t < T; ++t) {
        const Step& st = traj.steps[t];
        const int next = t + 1 < T ? traj.steps[t + 1].state : traj.terminal_state;
        const double target =
            st.reward + (t + 1 < T ? shape.discount * slice(t + 1, next) : 0.0);
        double& q = vt.q[static_cast<std::size_t>(t) * cells +
                         shape.Cell(st.state, st.a1, st.a2)];
        q = (1.0 - learning_rate) * q + learning_rate * target;
      }
    }
  }
  const auto initial = EmpiricalInitial(data, indices, S);
  ClampValueTables(shape, profile, initial, &vt);
  RecomputeValues(shape, profile, initial, &vt);
  return vt;
}

double ClipBound(double clip_base, int t) {
  const double bound = std::pow(clip_base, t);
  return std::isfinite(bound) ? bound : std::numeric_limits<double>::max();
}

void RhoWeights(const Dataset& data, const std::vector<int>& indices,
                const PolicyProfile& target, const PolicyProfile& behavior,
                double clip_base, WeightTables* weights) {
  const int T = data.horizon();
  weights->horizon = T;
  weights->num_trajectories = data.size();
  weights->rho.resize(static_cast<std::size_t>(data.size()) * (T + 1), 0.0);
  for (int i : indices) {
    const auto& steps = data.trajectories[i].steps;
    double* rho = weights->rho.data() + static_cast<std::size_t>(i) * (T + 1);
    rho[0] = 1.0;
    double product = 1.0;
    for (int t = 0; t < T; ++t) {
      const Step& st = steps[t];
      const double b = behavior.p1.prob(t, st.state, st.a1) *
                       behavior.p2.prob(t, st.state, st.a2);
      if (b <= 0.0) {
        Fail(ErrorCode::kZeroBehaviorDensity,
             "behavior probability 0 for an observed action at t=" +
                 std::to_string(t + 1) + ", s=" + std::to_string(st.state));
      }
      product *= target.p1.prob(t, st.state, st.a1) *
                 target.p2.prob(t, st.state, st.a2) / b;
      rho[t + 1] = std::min(product, ClipBound(clip_base, t + 1));
    }
  }
}

std::vector<double> MuTable(const EstimatedModel& model,
                            std::span<const double> behavior_marginal,
                            const PolicyProfile& target, double clip_base) {
  const MarginalTable numer = MarginalDistribution(model.game, target);
  std::vector<double> table(numer.p.size(), 0.0);
  const int cells = model.game.num_cells();
  for (int t = 0; t < numer.horizon; ++t) {
    const double bound = ClipBound(clip_base, t + 1);
    for (int c = 0; c < cells; ++c) {
      const std::size_t idx = static_cast<std::size_t>(t) * cells + c;
      const double p = numer.p[idx];
      const double q = behavior_marginal[idx];
      if (p <= 0.0) {
        table[idx] = 0.0;
      } else if (q <= 0.0) {
        table[idx] = bound;
      } else {
        table[idx] = std::min(p / q, bound);
      }
    }
  }
  return table;
}

std::vector<double> BehaviorHistogram(const Dataset& data,
                                      const std::vector<int>& indices,
                                      const GameShape& shape, double smoothing) {
  const int cells = shape.num_cells();
  const auto counts = VisitCounts(data, shape, indices);
  std::vector<double> hist(counts.size());
  const double denom = static_cast<double>(indices.size()) + smoothing * cells;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    hist[k] = (counts[k] + smoothing) / denom;
  }
  return hist;
}

void MuWeights(const Dataset& data, const std::vector<int>& indices,
               const GameShape& shape, std::span<const double> mu_table,
               WeightTables* weights) {
  const int T = data.horizon();
  const int cells = shape.num_cells();
  weights->horizon = T;
  weights->num_trajectories = data.size();
  weights->mu.resize(static_cast<std::size_t>(data.size()) * (T + 1), 0.0);
  for (int i : indices) {
    const auto& steps = data.trajectories[i].steps;
    double* mu = weights->mu.data() + static_cast<std::size_t>(i) * (T + 1);
    mu[0] = 1.0;
    for (int t = 0; t < T; ++t) {
      mu[t + 1] = mu_table[static_cast<std::size_t>(t) * cells +
                           shape.Cell(steps[t].state, steps[t].a1, steps[t].a2)];
    }
  }
}

CrossFitContext::CrossFitContext(FoldedDataset folded, const GameShape& shape,
                                 NuisanceOptions options)
    : folded_(std::move(folded)), shape_(shape), options_(options) {
  const Dataset& data = folded_.dataset;
  if (data.horizon() != shape_.horizon) {
    Fail(ErrorCode::kHorizonMismatch, "dataset horizon differs from the game");
  }
  if (static_cast<int>(folded_.fold_of.size()) != data.size() ||
      folded_.num_folds < 2) {
    Fail(ErrorCode::kFoldMismatch, "fold assignment does not cover the dataset");
  }
  behavior_known_ = options_.use_known_behavior && data.behavior_known.has_value();
  if (options_.exact_game != nullptr) {
    if (!data.behavior_known.has_value()) {
      Fail(ErrorCode::kMissingNuisance, "exact nuisances need the known behavior");
    }
    if (!(options_.exact_game->shape() == shape_)) {
      Fail(ErrorCode::kHorizonMismatch, "exact game shape differs");
    }
    behavior_known_ = true;
  }
  for (int k = 0; k < folded_.num_folds; ++k) {
    std::vector<int> members = folded_.indices_in(k);
    std::vector<int> outside = folded_.indices_outside(k);
    if (members.empty()) Fail(ErrorCode::kFoldMismatch, "empty fold");
    if (options_.exact_game != nullptr) {
      const Game& game = *options_.exact_game;
      EstimatedModel model{game, VisitCounts(data, shape_, outside)};
      std::vector<double> marginal =
          MarginalDistribution(game, *data.behavior_known).p;
      folds_.push_back({std::move(model), *data.behavior_known,
                        std::move(marginal), std::move(members),
                        std::move(outside)});
      continue;
    }
    EstimatedModel model =
        EstimateModel(data, outside, shape_, options_.transition_smoothing);
    PolicyProfile behavior =
        behavior_known_ ? *data.behavior_known
                        : EstimateBehaviorPolicy(data, outside, shape_,
                                                 options_.behavior_smoothing);
    std::vector<double> marginal =
        options_.mu_denominator == NuisanceOptions::MuDenominator::kModel
            ? MarginalDistribution(model.game, behavior).p
            : BehaviorHistogram(data, outside, shape_,
                                options_.histogram_smoothing);
    folds_.push_back({std::move(model), std::move(behavior), std::move(marginal),
                      std::move(members), std::move(outside)});
  }
}

std::pair<NuisanceSet, WeightTables> CrossFitContext::Fit(
    const PolicyProfile& target, NuisanceNeeds needs) const {
  CheckProfileFits(shape_, target);
  NuisanceSet set;
  set.shape = shape_;
  set.clip_base = options_.clip_base;
  WeightTables weights;
  weights.horizon = shape_.horizon;
  weights.num_trajectories = data().size();
  for (int k = 0; k < num_folds(); ++k) {
    const Fold& fold = folds_[k];
    FoldNuisance out;
    if (needs.q) {
      out.q_hat = options_.q_method == NuisanceOptions::QMethod::kTd &&
                          options_.exact_game == nullptr
                      ? QHatTd(data(), fold.outside, shape_, target,
                               options_.td_learning_rate, options_.td_sweeps)
                      : QHatModel(fold.model, target);
    }
    if (!behavior_known_) out.behavior_hat = fold.behavior;
    if (needs.rho) {
      RhoWeights(data(), fold.members, target, fold.behavior,
                 options_.clip_base, &weights);
    }
    if (needs.mu) {
      out.mu_table = MuTable(fold.model, fold.behavior_marginal, target,
                             options_.clip_base);
      MuWeights(data(), fold.members, shape_, out.mu_table, &weights);
    }
    set.folds.push_back(std::move(out));
  }
  return {std::move(set), std::move(weights)};
}

std::pair<NuisanceSet, WeightTables> FitNuisancesCrossfit(
    const FoldedDataset& folded, const GameShape& shape,
    const PolicyProfile& target, const NuisanceOptions& options) {
  return CrossFitContext(folded, shape, options)
      .Fit(target, NuisanceNeeds{true, true, true});
}

}  // namespace mgope
