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

#include "mgope/exploitability.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgope/environments.h"
#include "mgope/error.h"

namespace mgope {
namespace {

constexpr double kInvPhi = 0.6180339887498949;

bool Improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

double GridPoint(int k, int points) {
  return points <= 1 ? 1.0 : static_cast<double>(k) / (points - 1);
}

// Golden-section maximization of `f` on [lo, hi]; returns the best point
// seen and its value.
std::pair<double, double> GoldenMax(const std::function<double(double)>& f,
                                    double lo, double hi, double tolerance,
                                    int* evaluations) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  *evaluations += 2;
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      ++*evaluations;
      if (fc > best_f) { best_f = fc; best_x = c; }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      ++*evaluations;
      if (fd > best_f) { best_f = fd; best_x = d; }
    }
  }
  return {best_x, best_f};
}

// Grid scan of a scalar function on [0, 1] followed by golden refinement
// around the best grid point. Ties keep the lowest grid index.
std::pair<double, double> ScalarMax(const std::function<double(double)>& f,
                                    int points, double tolerance, bool refine,
                                    int* evaluations) {
  double best_x = 0.0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double x = GridPoint(k, points);
    const double v = f(x);
    ++*evaluations;
    if (k == 0 || Improves(v, best_f)) {
      best_f = v;
      best_x = x;
    }
  }
  if (refine && points > 1) {
    const double h = 1.0 / (points - 1);
    const auto [x, v] = GoldenMax(f, std::max(0.0, best_x - h),
                                  std::min(1.0, best_x + h), tolerance, evaluations);
    if (Improves(v, best_f)) {
      best_f = v;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

OptimizeResult MaximizeFinite(const Objective& objective, const PolicyClass& c) {
  OptimizeResult out;
  for (std::size_t k = 0; k < c.members().size(); ++k) {
    const double v = objective(c.members()[k]);
    ++out.evaluations;
    if (k == 0 || Improves(v, out.value)) {
      out.value = v;
      out.policy = c.members()[k];
    }
  }
  return out;
}

OptimizeResult MaximizeMixture(const Objective& objective, const PolicyClass& c,
                               const OptimizerOptions& options) {
  OptimizeResult out;
  const int n = c.num_alphas();
  std::vector<double> alpha(n, 0.0);
  auto shared = [&](double a) {
    std::fill(alpha.begin(), alpha.end(), a);
    return objective(c.At(alpha));
  };
  auto [a0, v0] = ScalarMax(shared, options.grid_points, options.golden_tolerance,
                            true, &out.evaluations);
  std::fill(alpha.begin(), alpha.end(), a0);
  double best = v0;
  if (n > 1) {
    for (int sweep = 0; sweep < options.coordinate_sweeps; ++sweep) {
      bool improved = false;
      for (int j = 0; j < n; ++j) {
        const double keep = alpha[j];
        auto along = [&](double a) {
          alpha[j] = a;
          return objective(c.At(alpha));
        };
        const auto [aj, vj] = ScalarMax(along, options.grid_points,
                                        options.golden_tolerance, true,
                                        &out.evaluations);
        if (Improves(vj, best)) {
          alpha[j] = aj;
          best = vj;
          improved = true;
        } else {
          alpha[j] = keep;
        }
      }
      if (!improved) break;
    }
  }
  out.alpha = alpha;
  out.policy = c.At(alpha);
  out.value = best;
  return out;
}

OptimizeResult MaximizeFullMarkov(const Objective& objective, const PolicyClass& c,
                                  const OptimizerOptions& options) {
  const int T = c.horizon();
  const int S = c.num_states();
  const int A = c.num_actions();
  OptimizeResult out;
  bool have = false;
  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    MarkovPolicy pi = MarkovPolicy::Uniform(c.player(), T, S, A);
    if (restart > 0) {
      CounterRng rng(options.seed, StreamId(restart, 0, 7));
      for (int t = 0; t < T; ++t) {
        for (int s = 0; s < S; ++s) pi.SetPure(t, s, static_cast<int>(rng.Below(A)));
      }
    }
    double current = objective(pi);
    ++out.evaluations;
    std::vector<bool> visited(static_cast<std::size_t>(T) * S, false);
    std::vector<double> saved(A);
    for (int sweep = 0; sweep < options.max_ascent_sweeps; ++sweep) {
      bool improved = false;
      for (int t = T - 1; t >= 0; --t) {
        for (int s = 0; s < S; ++s) {
          const auto row = pi.row(t, s);
          std::copy(row.begin(), row.end(), saved.begin());
          int best_a = 0;
          double best_v = -std::numeric_limits<double>::infinity();
          for (int a = 0; a < A; ++a) {
            pi.SetPure(t, s, a);
            const double v = objective(pi);
            ++out.evaluations;
            if (a == 0 || Improves(v, best_v)) {
              best_v = v;
              best_a = a;
            }
          }
          const std::size_t block = static_cast<std::size_t>(t) * S + s;
          if (!visited[block] || Improves(best_v, current)) {
            if (visited[block]) improved = true;
            visited[block] = true;
            pi.SetPure(t, s, best_a);
            current = best_v;
          } else {
            pi.SetRow(t, s, saved);
          }
        }
      }
      if (!improved && sweep > 0) break;
    }
    if (!have || Improves(current, out.value)) {
      have = true;
      out.value = current;
      out.policy = pi;
    }
  }
  return out;
}

double RatioBound(const MarkovPolicy& behavior, const PolicyClass& c,
                  const MarkovPolicy* target) {
  double bound = 1.0;
  for (int t = 0; t < behavior.horizon(); ++t) {
    for (int s = 0; s < behavior.num_states(); ++s) {
      for (int a = 0; a < behavior.num_actions(); ++a) {
        double p = c.MaxProb(t, s, a);
        if (target != nullptr) p = std::max(p, target->prob(t, s, a));
        if (p <= 0.0) continue;
        const double b = behavior.prob(t, s, a);
        if (b <= 0.0) return std::numeric_limits<double>::infinity();
        bound = std::max(bound, p / b);
      }
    }
  }
  return bound;
}

// Pure maximin on a payoff grid: the row maximizing its minimum and the
// column minimizing its maximum. Ties keep the incumbent index, then the
// lowest one.
std::pair<int, int> GridSaddle(const std::vector<double>& m, int rows, int cols,
                               int keep_row = 0, int keep_col = 0) {
  auto row_min = [&](int i) {
    double worst = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cols; ++j) worst = std::min(worst, m[i * cols + j]);
    return worst;
  };
  auto col_max = [&](int j) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) worst = std::max(worst, m[i * cols + j]);
    return worst;
  };
  int best_row = keep_row;
  double best_row_value = row_min(keep_row);
  for (int i = 0; i < rows; ++i) {
    const double v = row_min(i);
    if (Improves(v, best_row_value)) {
      best_row_value = v;
      best_row = i;
    }
  }
  int best_col = keep_col;
  double best_col_value = col_max(keep_col);
  for (int j = 0; j < cols; ++j) {
    const double v = col_max(j);
    if (Improves(-v, -best_col_value)) {
      best_col_value = v;
      best_col = j;
    }
  }
  return {best_row, best_col};
}

// True when (x, y) is already an equilibrium of the matrix game `m`; such
// blocks are left alone so flat or unreachable slices do not drift.
bool IsBlockEquilibrium(const std::vector<double>& m, std::span<const double> x,
                        std::span<const double> y) {
  const int rows = static_cast<int>(x.size());
  const int cols = static_cast<int>(y.size());
  double value = 0.0;
  double scale = 1.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) value += x[i] * m[i * cols + j] * y[j];
  }
  const double tol = 1e-10 * scale;
  for (int i = 0; i < rows; ++i) {
    double v = 0.0;
    for (int j = 0; j < cols; ++j) v += m[i * cols + j] * y[j];
    if (v > value + tol) return false;
  }
  for (int j = 0; j < cols; ++j) {
    double v = 0.0;
    for (int i = 0; i < rows; ++i) v += x[i] * m[i * cols + j];
    if (v < value - tol) return false;
  }
  return true;
}

SelectionResult BlockSaddle(const ProfileObjective& f, const PolicyClass& c1,
                            const PolicyClass& c2, const OptimizerOptions& options) {
  const int T = c1.horizon();
  const int S = c1.num_states();
  const int A1 = c1.num_actions();
  const int A2 = c2.num_actions();
  MarkovPolicy p1 = MarkovPolicy::Uniform(Player::kP1, T, S, A1);
  MarkovPolicy p2 = MarkovPolicy::Uniform(Player::kP2, T, S, A2);
  SelectionDiagnostics diag;
  diag.solver = "block-saddle";
  diag.converged = false;
  std::vector<double> m(static_cast<std::size_t>(A1) * A2);
  for (int sweep = 0; sweep < options.minimax_sweeps; ++sweep) {
    ++diag.sweeps;
    double change = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      for (int s = 0; s < S; ++s) {
        MarkovPolicy x = p1;
        MarkovPolicy y = p2;
        for (int i = 0; i < A1; ++i) {
          x.SetPure(t, s, i);
          for (int j = 0; j < A2; ++j) {
            y.SetPure(t, s, j);
            m[i * A2 + j] = f(x, y);
            ++diag.evaluations;
          }
        }
        if (IsBlockEquilibrium(m, p1.row(t, s), p2.row(t, s))) continue;
        const MatrixGameSolution sol = SolveMatrixGame(m, A1, A2);
        for (int i = 0; i < A1; ++i) {
          change = std::max(change, std::abs(sol.row_strategy[i] - p1.prob(t, s, i)));
        }
        for (int j = 0; j < A2; ++j) {
          change = std::max(change, std::abs(sol.col_strategy[j] - p2.prob(t, s, j)));
        }
        p1.SetRow(t, s, sol.row_strategy);
        p2.SetRow(t, s, sol.col_strategy);
      }
    }
    if (change <= 1e-9) {
      diag.converged = true;
      break;
    }
  }
  return {PolicyProfile(std::move(p1), std::move(p2)), diag};
}

SelectionResult FiniteSaddle(const ProfileObjective& f, const PolicyClass& c1,
                             const PolicyClass& c2) {
  const int rows = static_cast<int>(c1.members().size());
  const int cols = static_cast<int>(c2.members().size());
  std::vector<double> m(static_cast<std::size_t>(rows) * cols);
  SelectionDiagnostics diag;
  diag.solver = "finite-maximin";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m[i * cols + j] = f(c1.members()[i], c2.members()[j]);
      ++diag.evaluations;
    }
  }
  const auto [i, j] = GridSaddle(m, rows, cols);
  diag.sweeps = 1;
  return {PolicyProfile(c1.members()[i], c2.members()[j]), diag};
}

// Coordinate-pair grid saddle for two mixture classes: coordinate j of each
// player is scanned jointly on a G x G grid with the others held fixed.
SelectionResult MixtureSaddle(const ProfileObjective& f, const PolicyClass& c1,
                              const PolicyClass& c2, const OptimizerOptions& options) {
  const int n1 = c1.num_alphas();
  const int n2 = c2.num_alphas();
  const int G = std::max(2, options.saddle_grid_points);
  std::vector<double> a1(n1, 1.0);
  std::vector<double> a2(n2, 1.0);
  SelectionDiagnostics diag;
  diag.solver = "mixture-saddle";
  diag.converged = false;
  std::vector<double> m(static_cast<std::size_t>(G) * G);
  const int pairs = std::max(n1, n2);
  for (int sweep = 0; sweep < options.minimax_sweeps; ++sweep) {
    ++diag.sweeps;
    bool changed = false;
    for (int j = 0; j < pairs; ++j) {
      const bool move1 = j < n1;
      const bool move2 = j < n2;
      const int rows = move1 ? G : 1;
      const int cols = move2 ? G : 1;
      for (int r = 0; r < rows; ++r) {
        std::vector<double> x = a1;
        if (move1) x[j] = GridPoint(r, G);
        const MarkovPolicy px = c1.At(x);
        for (int k = 0; k < cols; ++k) {
          std::vector<double> y = a2;
          if (move2) y[j] = GridPoint(k, G);
          m[r * cols + k] = f(px, c2.At(y));
          ++diag.evaluations;
        }
      }
      const int keep_r = move1 ? static_cast<int>(std::lround(a1[j] * (G - 1))) : 0;
      const int keep_k = move2 ? static_cast<int>(std::lround(a2[j] * (G - 1))) : 0;
      const auto [r, k] = GridSaddle(m, rows, cols, keep_r, keep_k);
      if (move1 && a1[j] != GridPoint(r, G)) {
        a1[j] = GridPoint(r, G);
        changed = true;
      }
      if (move2 && a2[j] != GridPoint(k, G)) {
        a2[j] = GridPoint(k, G);
        changed = true;
      }
    }
    if (!changed || pairs == 1) {
      diag.converged = true;
      break;
    }
  }
  if (options.saddle_refine && n1 == 1 && n2 == 1) {
    const double h = 1.0 / (G - 1);
    // g1(α1) = min over α2 of f, by grid plus golden refinement.
    auto inner_min = [&](const MarkovPolicy& x) {
      auto neg = [&](double b) { return -f(x, c2.At(b)); };
      return -ScalarMax(neg, G, options.golden_tolerance, true, &diag.evaluations).second;
    };
    auto inner_min2 = [&](const MarkovPolicy& y) {
      auto pos = [&](double a) { return f(c1.At(a), y); };
      return -ScalarMax(pos, G, options.golden_tolerance, true, &diag.evaluations).second;
    };
    auto g1 = [&](double a) { return inner_min(c1.At(a)); };
    auto g2 = [&](double b) { return inner_min2(c2.At(b)); };
    const double base1 = g1(a1[0]);
    const auto [x1, v1] = GoldenMax(g1, std::max(0.0, a1[0] - h),
                                    std::min(1.0, a1[0] + h),
                                    options.golden_tolerance, &diag.evaluations);
    if (Improves(v1, base1)) a1[0] = x1;
    const double base2 = g2(a2[0]);
    const auto [x2, v2] = GoldenMax(g2, std::max(0.0, a2[0] - h),
                                    std::min(1.0, a2[0] + h),
                                    options.golden_tolerance, &diag.evaluations);
    if (Improves(v2, base2)) a2[0] = x2;
  }
  return {PolicyProfile(c1.At(a1), c2.At(a2)), diag};
}

SelectionResult NestedMaxMin(const ProfileObjective& f, const PolicyClass& c1,
                             const PolicyClass& c2, const OptimizerOptions& options) {
  SelectionDiagnostics diag;
  diag.solver = "nested";
  auto g1 = [&](const MarkovPolicy& x) {
    const auto inner = MaximizeObjective(
        [&](const MarkovPolicy& y) { return -f(x, y); }, c2, options);
    diag.evaluations += inner.evaluations;
    return -inner.value;
  };
  auto g2 = [&](const MarkovPolicy& y) {
    const auto inner = MaximizeObjective(
        [&](const MarkovPolicy& x) { return f(x, y); }, c1, options);
    diag.evaluations += inner.evaluations;
    return -inner.value;
  };
  const auto best1 = MaximizeObjective(g1, c1, options);
  const auto best2 = MaximizeObjective(g2, c2, options);
  diag.sweeps = 1;
  return {PolicyProfile(best1.policy, best2.policy), diag};
}

}  // namespace

PolicyClass PolicyClass::FullMarkov(Player player, int horizon, int num_states,
                                    int num_actions) {
  PolicyClass c;
  c.kind_ = Kind::kFullMarkov;
  c.player_ = player;
  c.horizon_ = horizon;
  c.num_states_ = num_states;
  c.num_actions_ = num_actions;
  return c;
}

PolicyClass PolicyClass::FullMarkov(const GameShape& shape, Player player) {
  return FullMarkov(player, shape.horizon, shape.num_states,
                    shape.num_actions(player));
}

PolicyClass PolicyClass::Mixture(MarkovPolicy base, MarkovPolicy anchor,
                                 bool per_state_alpha) {
  // Validates compatibility.
  MixPolicies(base, anchor, 0.5);
  PolicyClass c;
  c.kind_ = Kind::kMixture;
  c.player_ = base.player();
  c.horizon_ = base.horizon();
  c.num_states_ = base.num_states();
  c.num_actions_ = base.num_actions();
  c.per_state_alpha_ = per_state_alpha;
  c.base_ = std::move(base);
  c.anchor_ = std::move(anchor);
  return c;
}

PolicyClass PolicyClass::FiniteSet(std::vector<MarkovPolicy> members) {
  if (members.empty()) Fail(ErrorCode::kInvalidArgument, "empty policy set");
  for (const auto& m : members) {
    if (m.player() != members.front().player()) {
      Fail(ErrorCode::kPlayerMismatch, "policy set mixes players");
    }
    if (m.horizon() != members.front().horizon() ||
        m.num_states() != members.front().num_states() ||
        m.num_actions() != members.front().num_actions()) {
      Fail(ErrorCode::kHorizonMismatch, "policy set mixes shapes");
    }
  }
  PolicyClass c;
  c.kind_ = Kind::kFiniteSet;
  c.player_ = members.front().player();
  c.horizon_ = members.front().horizon();
  c.num_states_ = members.front().num_states();
  c.num_actions_ = members.front().num_actions();
  c.members_ = std::move(members);
  return c;
}

MarkovPolicy PolicyClass::At(std::span<const double> alpha) const {
  if (kind_ != Kind::kMixture) {
    Fail(ErrorCode::kInvalidArgument, "At() needs a mixture class");
  }
  if (static_cast<int>(alpha.size()) == num_states_ && per_state_alpha_) {
    return MixPolicies(base_, anchor_, alpha);
  }
  if (alpha.size() != 1) {
    Fail(ErrorCode::kInvalidArgument, "wrong number of mixing weights");
  }
  return MixPolicies(base_, anchor_, alpha[0]);
}

MarkovPolicy PolicyClass::At(double alpha) const {
  const std::vector<double> a(num_alphas(), alpha);
  return At(a);
}

double PolicyClass::MaxProb(int t, int s, int a) const {
  switch (kind_) {
    case Kind::kFullMarkov:
      return 1.0;
    case Kind::kMixture:
      return std::max(base_.prob(t, s, a), anchor_.prob(t, s, a));
    case Kind::kFiniteSet: {
      double p = 0.0;
      for (const auto& m : members_) p = std::max(p, m.prob(t, s, a));
      return p;
    }
  }
  return 1.0;
}

MarkovPolicy PolicyClass::Sample(CounterRng& rng) const {
  switch (kind_) {
    case Kind::kFullMarkov: {
      std::vector<double> table(static_cast<std::size_t>(horizon_) * num_states_ *
                                num_actions_);
      for (std::size_t block = 0; block < table.size() / num_actions_; ++block) {
        double sum = 0.0;
        for (int a = 0; a < num_actions_; ++a) {
          const double x = -std::log(1.0 - rng.Uniform());
          table[block * num_actions_ + a] = x;
          sum += x;
        }
        for (int a = 0; a < num_actions_; ++a) table[block * num_actions_ + a] /= sum;
      }
      return MarkovPolicy::FromTable(player_, horizon_, num_states_, num_actions_,
                                     std::move(table));
    }
    case Kind::kMixture: {
      std::vector<double> alpha(num_alphas());
      for (double& a : alpha) a = rng.Uniform();
      return At(alpha);
    }
    case Kind::kFiniteSet:
      return members_[rng.Below(members_.size())];
  }
  return {};
}

OptimizeResult MaximizeObjective(const Objective& objective,
                                 const PolicyClass& policy_class,
                                 const OptimizerOptions& options) {
  switch (policy_class.kind()) {
    case PolicyClass::Kind::kFiniteSet:
      return MaximizeFinite(objective, policy_class);
    case PolicyClass::Kind::kMixture:
      return MaximizeMixture(objective, policy_class, options);
    case PolicyClass::Kind::kFullMarkov:
      return MaximizeFullMarkov(objective, policy_class, options);
  }
  return {};
}

double AutoClipBase(const PolicyProfile& behavior, const PolicyClass& class_p1,
                    const PolicyClass& class_p2, const PolicyProfile* target,
                    double fallback) {
  const double r1 = RatioBound(behavior.p1, class_p1, target ? &target->p1 : nullptr);
  const double r2 = RatioBound(behavior.p2, class_p2, target ? &target->p2 : nullptr);
  const double c = r1 * r2;
  return std::isfinite(c) ? c : fallback;
}

double CrossFitObjective(const CrossFitContext& context,
                         const PolicyProfile& profile, Method method) {
  return Estimate(context, profile, method).FoldAverage();
}

ExploitabilityEstimate EstimateExploitability(const CrossFitContext& context,
                                              const PolicyProfile& target,
                                              const PolicyClass& class_p1,
                                              const PolicyClass& class_p2,
                                              Method method,
                                              const OptimizerOptions& options) {
  ExploitabilityEstimate out;
  out.method = method;
  const auto best1 = MaximizeObjective(
      [&](const MarkovPolicy& pi) {
        return CrossFitObjective(context, PolicyProfile(pi, target.p2), method);
      },
      class_p1, options);
  const auto best2 = MaximizeObjective(
      [&](const MarkovPolicy& pi) {
        return -CrossFitObjective(context, PolicyProfile(target.p1, pi), method);
      },
      class_p2, options);
  out.max_p1_value = best1.value;
  out.max_p2_value = best2.value;
  out.total = best1.value + best2.value;
  out.argmax_p1 = best1.policy;
  out.argmax_p2 = best2.policy;
  out.optimizer_trace = {
      "p1: " + std::to_string(best1.evaluations) + " evaluations",
      "p2: " + std::to_string(best2.evaluations) + " evaluations"};
  return out;
}

double TrueClassExploitability(const Game& game, const PolicyProfile& target,
                               const PolicyClass& class_p1,
                               const PolicyClass& class_p2,
                               const OptimizerOptions& options) {
  CheckProfileFits(game.shape(), target);
  double best1 = 0.0;
  if (class_p1.kind() == PolicyClass::Kind::kFullMarkov) {
    best1 = ComputeBestResponse(game, target.p2, Player::kP1).value;
  } else {
    best1 = MaximizeObjective(
                [&](const MarkovPolicy& pi) {
                  return EvaluateProfile(game, PolicyProfile(pi, target.p2)).total;
                },
                class_p1, options)
                .value;
  }
  double best2 = 0.0;
  if (class_p2.kind() == PolicyClass::Kind::kFullMarkov) {
    best2 = ComputeBestResponse(game, target.p1, Player::kP2).value;
  } else {
    best2 = MaximizeObjective(
                [&](const MarkovPolicy& pi) {
                  return -EvaluateProfile(game, PolicyProfile(target.p1, pi)).total;
                },
                class_p2, options)
                .value;
  }
  return best1 + best2;
}

SelectionResult SolveMaxMin(const ProfileObjective& objective,
                            const PolicyClass& class_p1,
                            const PolicyClass& class_p2,
                            const OptimizerOptions& options) {
  using Kind = PolicyClass::Kind;
  if (class_p1.player() != Player::kP1 || class_p2.player() != Player::kP2) {
    Fail(ErrorCode::kPlayerMismatch, "classes must be (player 1, player 2)");
  }
  SelectionResult result;
  if (class_p1.kind() == Kind::kFullMarkov && class_p2.kind() == Kind::kFullMarkov) {
    result = BlockSaddle(objective, class_p1, class_p2, options);
  } else if (class_p1.kind() == Kind::kFiniteSet &&
             class_p2.kind() == Kind::kFiniteSet) {
    result = FiniteSaddle(objective, class_p1, class_p2);
  } else if (class_p1.kind() == Kind::kMixture && class_p2.kind() == Kind::kMixture) {
    result = MixtureSaddle(objective, class_p1, class_p2, options);
  } else {
    result = NestedMaxMin(objective, class_p1, class_p2, options);
  }
  const auto& [p1, p2] = std::pair{result.profile.p1, result.profile.p2};
  const auto upper = MaximizeObjective(
      [&](const MarkovPolicy& x) { return objective(x, p2); }, class_p1, options);
  const auto lower = MaximizeObjective(
      [&](const MarkovPolicy& y) { return -objective(p1, y); }, class_p2, options);
  result.diagnostics.gap = upper.value + lower.value;
  result.diagnostics.evaluations += upper.evaluations + lower.evaluations;
  return result;
}

SelectionResult SelectBestProfile(const CrossFitContext& context,
                                  const PolicyClass& class_p1,
                                  const PolicyClass& class_p2, Method method,
                                  const OptimizerOptions& options) {
  return SolveMaxMin(
      [&](const MarkovPolicy& x, const MarkovPolicy& y) {
        return CrossFitObjective(context, PolicyProfile(x, y), method);
      },
      class_p1, class_p2, options);
}

}  // namespace mgope
