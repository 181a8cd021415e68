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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. `acceptance 3 7` runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "generators.h"
#include "mgope/config.h"
#include "mgope/data.h"
#include "mgope/environments.h"
#include "mgope/estimators.h"
#include "mgope/exploitability.h"
#include "mgope/game.h"
#include "mgope/harness.h"
#include "mgope/nuisance.h"

namespace mgope {
namespace {

using ::mgope::testing::ForEachDeterministicPolicy;
using ::mgope::testing::RandomGame;
using ::mgope::testing::RandomProfile;

struct Verdict {
  bool ok = true;
  std::string detail;

  void Require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [violated]");
  }
};

std::string Num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

ExperimentConfig Load(const std::string& name) {
  return LoadConfig(std::string(MGOPE_CONFIG_DIR) + "/" + name);
}

double Mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / xs.size();
}

double Variance(const std::vector<double>& xs) {
  const double m = Mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / (xs.size() - 1);
}

Verdict OracleExactness() {
  Verdict v;
  double worst_nash = 0.0;
  for (const Game& game : {BuildRbrps(DefaultRbrps1Config()), BuildRbrps(DefaultRbrps2Config()),
                           RandomGame(2024, 2, 3, 3, 2, 0.9)}) {
    worst_nash = std::max(worst_nash, Exploitability(game, NashEquilibrium(game).profile));
  }
  v.Require(worst_nash <= 1e-6, "max Nash exploitability " + Num(worst_nash) + " <= 1e-6");

  double worst_br = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int S = 1 + i % 3;
    const int A1 = 2 + i % 2;
    const int A2 = 3 - i % 2;
    const int T = 1 + (i / 3) % 2;
    const Game game = RandomGame(900 + i, S, A1, A2, T, 0.85);
    const PolicyProfile profile = RandomProfile(1900 + i, game);
    double best1 = -1e300;
    ForEachDeterministicPolicy(Player::kP1, T, S, A1, [&](const MarkovPolicy& pi) {
      best1 = std::max(best1, EvaluateProfile(game, profile.With(pi)).total);
    });
    double best2 = -1e300;
    ForEachDeterministicPolicy(Player::kP2, T, S, A2, [&](const MarkovPolicy& pi) {
      best2 = std::max(best2, -EvaluateProfile(game, profile.With(pi)).total);
    });
    worst_br = std::max(
        {worst_br, std::abs(ComputeBestResponse(game, profile.p2, Player::kP1).value - best1),
         std::abs(ComputeBestResponse(game, profile.p1, Player::kP2).value - best2)});
  }
  v.Require(worst_br <= 1e-9, "best response vs enumeration on 50 games " + Num(worst_br) +
                                  " <= 1e-9");
  return v;
}

Verdict GroundTruth() {
  Verdict v;
  const ExperimentConfig config = Load("rbrps1_ope.yaml");
  const ExperimentSetup setup = BuildSetup(config);
  const double ex = TrueClassExploitability(setup.game, setup.target, setup.class_p1,
                                            setup.class_p2, config.optimizer);
  const double value = EvaluateProfile(setup.game, setup.target).total;
  v.Require(std::abs(ex - 0.6) <= 1e-9, "class exploitability " + Num(ex) + " = 0.6");
  v.Require(std::abs(value + 0.05) <= 1e-9, "target value " + Num(value) + " = -0.05");
  return v;
}

Verdict OpeTable() {
  Verdict v;
  const ExperimentConfig config = Load("rbrps1_ope.yaml");
  const Report report = RunOpeExperiment(config);
  auto rmse = [&](int n, const char* m) { return report.Find(std::to_string(n), m, "rmse")->value; };
  const double is250 = rmse(250, "IS");
  const double is500 = rmse(500, "IS");
  const double is1000 = rmse(1000, "IS");
  v.Require(is250 >= 0.03 && is250 <= 0.15, "IS(250) " + Num(is250) + " in [0.03, 0.15]");
  v.Require(is250 > is500 && is500 > is1000,
            "IS decreasing " + Num(is250) + " > " + Num(is500) + " > " + Num(is1000));
  bool dr_small = true;
  std::string drs;
  for (int n : {250, 500, 1000}) {
    dr_small = dr_small && rmse(n, "DR") <= rmse(n, "IS") / 5.0;
    drs += (drs.empty() ? "" : "/") + Num(rmse(n, "DR"));
  }
  v.Require(dr_small, "DR " + drs + " <= IS/5");
  v.Require(rmse(1000, "DR") <= rmse(250, "DR") / 2.0, "DR(1000) <= DR(250)/2");
  return v;
}

// DR and DRL with exact nuisances: means against the truth, and the scaled
// DRL variance against the efficiency bound.
void CheckClt(const Game& game, const PolicyProfile& behavior, const PolicyProfile& target,
              const std::string& label, Verdict* v) {
  const double truth = EvaluateProfile(game, target).total;
  NuisanceOptions exact;
  exact.exact_game = &game;
  std::vector<double> dr;
  std::vector<double> drl;
  for (int trial = 0; trial < 2000; ++trial) {
    const FoldedDataset folded =
        AssignFolds(Simulate(game, behavior, 500, DeriveSeed(4001, trial)), 2, trial);
    const CrossFitContext ctx(folded, game.shape(), exact);
    dr.push_back(Estimate(ctx, target, Method::kDr).estimate);
    drl.push_back(Estimate(ctx, target, Method::kDrl).estimate);
  }
  for (const auto& [name, xs] : {std::pair{"DR", &dr}, std::pair{"DRL", &drl}}) {
    const double se = std::sqrt(Variance(*xs) / xs->size());
    const double dev = std::abs(Mean(*xs) - truth);
    v->Require(dev <= 4.0 * se + 1e-12, label + " " + name + " |mean - truth| " + Num(dev) +
                                           " <= 4 se + 1e-12 = " + Num(4.0 * se + 1e-12));
  }
  std::vector<double> big;
  for (int trial = 0; trial < 2000; ++trial) {
    const FoldedDataset folded =
        AssignFolds(Simulate(game, behavior, 1000, DeriveSeed(4002, trial)), 2, trial);
    big.push_back(Estimate(CrossFitContext(folded, game.shape(), exact), target, Method::kDrl)
                      .estimate);
  }
  const double scaled = 1000.0 * Variance(big);
  const double bound = AsymptoticVariance(game, target, behavior).upsilon_eb;
  v->Require(std::abs(scaled - bound) <= 0.15 * bound + 1e-12,
             label + " n Var(DRL) " + Num(scaled) + " vs bound " + Num(bound));
}

Verdict Clt() {
  Verdict v;
  const ExperimentConfig config = Load("rbrps1_ope.yaml");
  const ExperimentSetup setup = BuildSetup(config);
  CheckClt(setup.game, setup.behavior, setup.target, "rbrps1", &v);
  // Deterministic rewards make both sides zero, so also run with reward noise.
  GameSpec spec = setup.game.spec();
  spec.reward_noise = RewardNoise{RewardNoise::Kind::kUniform, 0.3};
  spec.reward_bound = 1.3;
  CheckClt(ValidateGame(spec), setup.behavior, setup.target, "rbrps1+noise", &v);
  return v;
}

NuisanceSet ZeroQ(NuisanceSet set) {
  for (auto& f : set.folds) {
    std::fill(f.q_hat.q.begin(), f.q_hat.q.end(), 0.0);
    std::fill(f.q_hat.v.begin(), f.q_hat.v.end(), 0.0);
  }
  return set;
}

Verdict Reductions() {
  Verdict v;
  double dr_is = 0.0;
  double drl_mis = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    const Game game = RandomGame(70 + seed, 3, 2, 3, 3, 0.9,
                                 RewardNoise{RewardNoise::Kind::kGaussian, 0.2});
    const FoldedDataset folded =
        AssignFolds(Simulate(game, RandomProfile(80 + seed, game), 300, seed), 2, seed);
    const auto [set, w] = FitNuisancesCrossfit(folded, game.shape(),
                                               RandomProfile(90 + seed, game), NuisanceOptions{});
    const NuisanceSet zero = ZeroQ(set);
    const double g = game.discount();
    dr_is = std::max(dr_is, std::abs(EstimateDr(folded, zero, w, g).estimate -
                                     EstimateIs(folded.dataset, w, g).estimate));
    drl_mis = std::max(drl_mis, std::abs(EstimateDrl(folded, zero, w, g).estimate -
                                         EstimateMis(folded.dataset, w, g).estimate));
  }
  v.Require(dr_is <= 1e-12, "DR|Q=0 - IS " + Num(dr_is));
  v.Require(drl_mis <= 1e-12, "DRL|Q=0 - MIS " + Num(drl_mis));

  const ExperimentSetup setup = BuildSetup(Load("rbrps1_ope.yaml"));
  const FoldedDataset folded = AssignFolds(Simulate(setup.game, setup.behavior, 400, 9), 2, 9);
  auto [set, w] = FitNuisancesCrossfit(folded, setup.game.shape(), setup.target,
                                       NuisanceOptions{});
  w.mu = w.rho;
  const double one_step = std::abs(EstimateDr(folded, set, w, 1.0).estimate -
                                   EstimateDrl(folded, set, w, 1.0).estimate);
  v.Require(one_step <= 1e-12, "T=1 mu=rho DR - DRL " + Num(one_step));

  const auto [on_set, on_w] = FitNuisancesCrossfit(folded, setup.game.shape(), setup.behavior,
                                                   NuisanceOptions{});
  const double on_policy = std::abs(EstimateIs(folded.dataset, on_w, 1.0).estimate -
                                    EmpiricalReturn(folded.dataset, 1.0));
  v.Require(on_policy <= 1e-12, "on-policy IS - empirical return " + Num(on_policy));
  return v;
}

Verdict SelectionTable() {
  Verdict v;
  const Report report = RunSelectionExperiment(Load("rbrps1_select.yaml"));
  auto ex = [&](const char* m) { return report.Find(m, "250", "exploitability")->value; };
  const double behavior = ex("behavior");
  v.Require(ex("DR") < 0.3 && ex("DR") < behavior,
            "DR " + Num(ex("DR")) + " < 0.3 and < behavior " + Num(behavior));
  for (const char* m : {"DM", "DR", "DRL"}) {
    v.Require(ex(m) < ex("IS"), std::string(m) + " " + Num(ex(m)) + " < IS " + Num(ex("IS")));
  }
  return v;
}

Verdict SoccerTable() {
  Verdict v;
  ExperimentConfig config = Load("soccer.yaml");
  config.experiment.methods = {Method::kDr, Method::kDrl};
  const Report report = RunSoccerExperiment(config);
  const double base = report.Find("behavior", "behavior", "winrate")->value;
  const double dr = report.Find("DR", "behavior", "winrate")->value;
  const double drl = report.Find("DRL", "behavior", "winrate")->value;
  v.Require(std::max(dr, drl) - base >= 0.10,
            "DR " + Num(dr) + " / DRL " + Num(drl) + " vs behavior-vs-behavior " + Num(base) +
                ", lift >= 0.10");
  return v;
}

Verdict Properties() {
  Verdict v;
  const Game game = RandomGame(31, 2, 2, 2, 3, 0.9, RewardNoise{RewardNoise::Kind::kGaussian, 0.1});
  const PolicyProfile behavior = RandomProfile(32, game);
  const PolicyProfile target = RandomProfile(33, game);
  const FoldedDataset folded = AssignFolds(Simulate(game, behavior, 300, 34), 2, 35);

  {
    NuisanceOptions opts;
    opts.clip_base = 1e12;
    const CrossFitContext ctx(folded, game.shape(), opts);
    double worst = 0.0;
    CounterRng rng(36, 0);
    for (Method m : {Method::kIs, Method::kMis, Method::kDm, Method::kDr, Method::kDrl}) {
      for (int b = 0; b < 6; ++b) {
        const int t = b / 2;
        const int s = b % 2;
        const double lambda = rng.Uniform();
        const double px = rng.Uniform();
        const double py = rng.Uniform();
        const double pz = lambda * px + (1 - lambda) * py;
        MarkovPolicy x = target.p2;
        MarkovPolicy y = target.p2;
        MarkovPolicy z = target.p2;
        x.SetRow(t, s, std::vector<double>{px, 1 - px});
        y.SetRow(t, s, std::vector<double>{py, 1 - py});
        z.SetRow(t, s, std::vector<double>{pz, 1 - pz});
        const double fx = CrossFitObjective(ctx, target.With(x), m);
        const double fy = CrossFitObjective(ctx, target.With(y), m);
        const double fz = CrossFitObjective(ctx, target.With(z), m);
        worst = std::max(worst, std::abs(fz - lambda * fx - (1 - lambda) * fy));
      }
    }
    v.Require(worst <= 1e-9, "block affineness " + Num(worst));
  }

  {
    NuisanceOptions opts;
    opts.clip_base = 1.3;
    const auto [set, w] = FitNuisancesCrossfit(folded, game.shape(), target, opts);
    bool bounded = true;
    for (int i = 0; i < w.num_trajectories; ++i) {
      for (int t = 0; t <= w.horizon; ++t) {
        const std::size_t k = static_cast<std::size_t>(i) * (w.horizon + 1) + t;
        const double c = ClipBound(1.3, t);
        bounded = bounded && w.rho[k] >= 0.0 && w.rho[k] <= c && w.mu[k] >= 0.0 && w.mu[k] <= c;
      }
    }
    v.Require(bounded, "weights within C^t");
  }

  {
    FoldedDataset changed = folded;
    for (int i : changed.indices_in(0)) {
      for (Step& step : changed.dataset.trajectories[i].steps) step.reward += 0.5;
    }
    const auto [a, wa] = FitNuisancesCrossfit(folded, game.shape(), target, NuisanceOptions{});
    const auto [b, wb] = FitNuisancesCrossfit(changed, game.shape(), target, NuisanceOptions{});
    v.Require(a.folds[0].q_hat.q == b.folds[0].q_hat.q && a.folds[0].mu_table == b.folds[0].mu_table &&
                  a.folds[1].q_hat.q != b.folds[1].q_hat.q,
              "cross-fit isolation");
  }

  {
    const double br1 = ComputeBestResponse(game, target.p2, Player::kP1).value;
    const double br2 = ComputeBestResponse(game, target.p1, Player::kP2).value;
    const double v1 = EvaluateProfile(game, target).total;
    const CrossFitContext ctx(folded, game.shape(), NuisanceOptions{});
    const EstimatorResult dr = Estimate(ctx, target, Method::kDr);
    v.Require(std::abs(Exploitability(game, target) - (br1 - v1) - (br2 + v1)) <= 1e-12 &&
                  br1 >= v1 - 1e-12 && br2 >= -v1 - 1e-12 && dr.Player2() == -dr.estimate,
              "zero-sum antisymmetry");
  }

  {
    bool partition = true;
    for (int k = 0; k < folded.num_folds; ++k) {
      const auto in = folded.indices_in(k);
      const auto out = folded.indices_outside(k);
      std::set<int> all(in.begin(), in.end());
      all.insert(out.begin(), out.end());
      partition = partition && static_cast<int>(all.size()) == folded.dataset.size() &&
                  in.size() + out.size() == all.size() &&
                  std::abs(folded.fold_size(k) - folded.dataset.size() / folded.num_folds) <= 1;
    }
    v.Require(partition, "fold partition");
  }

  {
    Dataset data = folded.dataset;
    data.behavior_known.reset();  // not part of the file format
    const bool dataset_ok = ParseDataset(SerializeDataset(data)) == data;
    const ExperimentConfig config = Load("soccer.yaml");
    const bool config_ok = DumpConfig(ParseConfig(DumpConfig(config))) == DumpConfig(config);
    const PolicyProfile back = ParseProfile(DumpProfile(target));
    double diff = 0.0;
    for (std::size_t i = 0; i < target.p1.table().size(); ++i) {
      diff = std::max(diff, std::abs(back.p1.table()[i] - target.p1.table()[i]));
    }
    v.Require(dataset_ok && config_ok && diff <= 1e-15, "serialization round trips");
  }

  {
    const bool sim = Simulate(game, behavior, 200, 37, 1) == Simulate(game, behavior, 200, 37, 3);
    ExperimentConfig config = Load("rbrps1_ope.yaml");
    config.experiment.trials = 6;
    config.experiment.n = {100};
    const bool report = FormatCsv(RunOpeExperiment(config, 1)) == FormatCsv(RunOpeExperiment(config, 3));
    v.Require(sim && report, "thread-count determinism");
  }
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace mgope

int main(int argc, char** argv) {
  using namespace mgope;
  const std::vector<Criterion> criteria = {
      {1, "oracle exactness", 30, OracleExactness},
      {2, "rbrps1 ground truth", 30, GroundTruth},
      {3, "rbrps1 estimator rmse", 300, OpeTable},
      {4, "unbiasedness and variance", 300, Clt},
      {5, "reduction identities", 30, Reductions},
      {6, "rbrps1 selection", 600, SelectionTable},
      {7, "soccer win rates", 1200, SoccerTable},
      {8, "property suites", 120, Properties},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = std::string("threw: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.Require(seconds < c.limit_seconds,
              "runtime " + Num(seconds) + " s < " + Num(c.limit_seconds) + " s");
    all = all && v.ok;
    std::printf("%s criterion %d (%s): %s\n", v.ok ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
