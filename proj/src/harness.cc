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

#include "mgope/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mgope/error.h"
#include "mgope/rng.h"

namespace mgope {
namespace {

using Json = nlohmann::json;

std::string FormatNumber(double x) {
  char buf[64];
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

PolicyClass BuildClass(const ClassConfig& c, Player player, const ExperimentSetup& s) {
  const MarkovPolicy& pd = player == Player::kP1 ? s.pi_d.p1 : s.pi_d.p2;
  switch (c.kind) {
    case ClassConfig::Kind::kFull:
      return PolicyClass::FullMarkov(s.game.shape(), player);
    case ClassConfig::Kind::kMixture:
      return PolicyClass::Mixture(pd, AnchorPolicy(c.anchor, player, s.game.shape()),
                                  c.per_state);
    case ClassConfig::Kind::kTarget:
      return PolicyClass::FiniteSet({player == Player::kP1 ? s.target.p1 : s.target.p2});
    case ClassConfig::Kind::kBehavior:
      return PolicyClass::FiniteSet({player == Player::kP1 ? s.behavior.p1 : s.behavior.p2});
  }
  return PolicyClass::FullMarkov(s.game.shape(), player);
}

struct TrialData {
  FoldedDataset folded;
};

TrialData MakeTrialData(const ExperimentSetup& setup, const ExperimentConfig& config,
                        int n, std::uint64_t seed) {
  Dataset data = Simulate(setup.game, setup.behavior, n, seed);
  return {AssignFolds(std::move(data), config.experiment.folds, DeriveSeed(seed, 1))};
}

}  // namespace

const ReportRow* Report::Find(const std::string& key1, const std::string& key2,
                              const std::string& metric) const {
  for (const auto& r : rows) {
    if (r.key1 == key1 && r.key2 == key2 && r.metric == metric) return &r;
  }
  return nullptr;
}

Game BuildGame(const EnvironmentConfig& environment) {
  if (environment.kind == EnvironmentConfig::Kind::kSoccer) {
    return BuildMarkovSoccer(environment.soccer);
  }
  return BuildRbrps(environment.rbrps);
}

MarkovPolicy AnchorPolicy(const std::string& anchor, Player player, const GameShape& shape) {
  const int A = shape.num_actions(player);
  if (anchor == "uniform") {
    return MarkovPolicy::Uniform(player, shape.horizon, shape.num_states, A);
  }
  int action = -1;
  if (anchor == "rock") {
    action = kRock;
  } else if (anchor == "paper") {
    action = kPaper;
  } else if (anchor == "scissors") {
    action = kScissors;
  } else {
    const auto res = std::from_chars(anchor.data(), anchor.data() + anchor.size(), action);
    if (res.ec != std::errc() || res.ptr != anchor.data() + anchor.size()) action = -1;
  }
  if (action < 0 || action >= A) {
    Fail(ErrorCode::kConfigError, "unknown or out-of-range anchor '" + anchor + "'");
  }
  return MarkovPolicy::Pure(player, shape.horizon, shape.num_states, A, action);
}

ExperimentSetup BuildSetup(const ExperimentConfig& config) {
  Game game = BuildGame(config.environment);
  PolicyProfile pi_d;
  switch (config.pi_d.source) {
    case PiDConfig::Source::kNash:
      pi_d = NashEquilibrium(game).profile;
      break;
    case PiDConfig::Source::kMinimaxQ:
      pi_d = MinimaxQ(game, config.pi_d.minimax_q).profile;
      break;
    case PiDConfig::Source::kFile:
      pi_d = ReadProfile(config.pi_d.path);
      try {
        CheckProfileFits(game.shape(), pi_d);
      } catch (const Error& e) {
        Fail(ErrorCode::kConfigError, std::string("pi_d file does not fit: ") + e.what());
      }
      break;
  }
  const GameShape shape = game.shape();
  auto mix = [&](const MarkovPolicy& base, const MixSpec& m, Player p) {
    return MixPolicies(base, AnchorPolicy(m.anchor, p, shape), m.weight);
  };
  PolicyProfile behavior(mix(pi_d.p1, config.behavior_p1, Player::kP1),
                         mix(pi_d.p2, config.behavior_p2, Player::kP2));
  PolicyProfile target(mix(pi_d.p1, config.target_p1, Player::kP1),
                       mix(pi_d.p2, config.target_p2, Player::kP2));
  ExperimentSetup setup{std::move(game), std::move(pi_d), std::move(behavior),
                        std::move(target), PolicyClass::FullMarkov(shape, Player::kP1),
                        PolicyClass::FullMarkov(shape, Player::kP2)};
  setup.class_p1 = BuildClass(config.class_p1, Player::kP1, setup);
  setup.class_p2 = BuildClass(config.class_p2, Player::kP2, setup);
  return setup;
}

NuisanceOptions ResolveNuisance(const ExperimentConfig& config, const ExperimentSetup& setup) {
  NuisanceOptions o = config.nuisance;
  o.exact_game = nullptr;
  if (config.auto_clip) {
    o.clip_base = AutoClipBase(setup.behavior, setup.class_p1, setup.class_p2, &setup.target,
                               config.nuisance.clip_base);
  }
  return o;
}

std::string FormatCsv(const Report& report) {
  std::string out = "key1,key2,metric,value,stderr,trials\n";
  for (const auto& r : report.rows) {
    out += CsvField(r.key1) + "," + CsvField(r.key2) + "," + CsvField(r.metric) + "," +
           FormatNumber(r.value) + "," + FormatNumber(r.stderr_value) + "," +
           std::to_string(r.trials) + "\n";
  }
  return out;
}

std::string FormatTrialLog(const Report& report) {
  std::string out;
  for (const auto& line : report.trial_log) out += line + "\n";
  return out;
}

void WriteReport(const Report& report, const OutputConfig& output) {
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) Fail(ErrorCode::kIoError, "cannot write " + path);
    f << text;
    if (!f) Fail(ErrorCode::kIoError, "write failed: " + path);
  };
  if (!output.csv.empty()) write(output.csv, FormatCsv(report));
  if (!output.trials.empty()) write(output.trials, FormatTrialLog(report));
}

RmseSummary SummarizeErrors(const std::vector<double>& errors) {
  RmseSummary out;
  const int m = static_cast<int>(errors.size());
  if (m == 0) return out;
  std::vector<double> sq(m);
  for (int i = 0; i < m; ++i) sq[i] = errors[i] * errors[i];
  const double mse = CompensatedMean(sq);
  out.rmse = std::sqrt(mse);
  if (m > 1 && out.rmse > 0.0) {
    double var = 0.0;
    for (double x : sq) var += (x - mse) * (x - mse);
    var /= (m - 1);
    out.stderr_value = std::sqrt(var) / (std::sqrt(static_cast<double>(m)) * 2.0 * out.rmse);
  }
  return out;
}

MeanSummary SummarizeMean(const std::vector<double>& values) {
  MeanSummary out;
  const int m = static_cast<int>(values.size());
  if (m == 0) return out;
  out.mean = CompensatedMean(values);
  if (m > 1) {
    double var = 0.0;
    for (double x : values) var += (x - out.mean) * (x - out.mean);
    var /= (m - 1);
    out.stderr_value = std::sqrt(var / m);
  }
  return out;
}

void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_index = count;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

WinrateResult Winrate(const Game& game, const PolicyProfile& profile, int num_games,
                      std::uint64_t seed, int threads) {
  WinrateResult out;
  if (num_games < 1) return out;
  const Dataset data = Simulate(game, profile, num_games, seed, threads);
  int p1 = 0;
  int p2 = 0;
  for (const auto& traj : data.trajectories) {
    double ret = 0.0;
    for (const auto& step : traj.steps) ret += step.reward;
    if (ret > 0.0) {
      ++p1;
    } else if (ret < 0.0) {
      ++p2;
    }
  }
  out.p1 = static_cast<double>(p1) / num_games;
  out.p2 = static_cast<double>(p2) / num_games;
  out.draw = static_cast<double>(num_games - p1 - p2) / num_games;
  return out;
}

void CheckBudget(const ExperimentConfig& config, int horizon) {
  double volume = 0.0;
  for (int n : config.experiment.n) {
    volume += static_cast<double>(n) * horizon * config.experiment.trials;
  }
  if (volume > config.experiment.budget) {
    Fail(ErrorCode::kBudgetExceeded,
         "n * T * trials = " + FormatNumber(volume) + " exceeds budget " +
             FormatNumber(config.experiment.budget));
  }
}

Report RunOpeExperiment(const ExperimentConfig& config, int threads) {
  const ExperimentSetup setup = BuildSetup(config);
  CheckBudget(config, setup.game.horizon());
  const auto& e = config.experiment;
  const NuisanceOptions nuisance = ResolveNuisance(config, setup);
  const double truth = TrueClassExploitability(setup.game, setup.target, setup.class_p1,
                                               setup.class_p2, config.optimizer);
  const int methods = static_cast<int>(e.methods.size());
  const int jobs = static_cast<int>(e.n.size()) * e.trials;
  std::vector<std::vector<double>> estimates(jobs);
  ParallelFor(jobs, threads, [&](int j) {
    const int ni = j / e.trials;
    const int trial = j % e.trials;
    const std::uint64_t seed = DeriveSeed(DeriveSeed(e.seed, ni), trial);
    const TrialData td = MakeTrialData(setup, config, e.n[ni], seed);
    const CrossFitContext ctx(td.folded, setup.game.shape(), nuisance);
    estimates[j].resize(methods);
    for (int m = 0; m < methods; ++m) {
      estimates[j][m] = EstimateExploitability(ctx, setup.target, setup.class_p1,
                                               setup.class_p2, e.methods[m], config.optimizer)
                            .total;
    }
  });

  Report report;
  for (std::size_t ni = 0; ni < e.n.size(); ++ni) {
    for (int m = 0; m < methods; ++m) {
      std::vector<double> errors;
      std::vector<double> ests;
      for (int trial = 0; trial < e.trials; ++trial) {
        const double x = estimates[ni * e.trials + trial][m];
        ests.push_back(x);
        errors.push_back(x - truth);
      }
      const RmseSummary r = SummarizeErrors(errors);
      const MeanSummary mean = SummarizeMean(ests);
      const std::string key1 = std::to_string(e.n[ni]);
      const std::string key2(MethodName(e.methods[m]));
      report.rows.push_back({key1, key2, "rmse", r.rmse, r.stderr_value, e.trials});
      report.rows.push_back({key1, key2, "mean", mean.mean, mean.stderr_value, e.trials});
    }
  }
  report.rows.push_back({"truth", "-", "exploitability", truth, 0.0, e.trials});
  for (int j = 0; j < jobs; ++j) {
    for (int m = 0; m < methods; ++m) {
      Json line = {{"experiment", "ope"},
                   {"n", e.n[j / e.trials]},
                   {"trial", j % e.trials},
                   {"method", MethodName(e.methods[m])},
                   {"estimate", estimates[j][m]},
                   {"truth", truth}};
      report.trial_log.push_back(line.dump());
    }
  }
  return report;
}

Report RunSelectionExperiment(const ExperimentConfig& config, int threads) {
  const ExperimentSetup setup = BuildSetup(config);
  CheckBudget(config, setup.game.horizon());
  const auto& e = config.experiment;
  const NuisanceOptions nuisance = ResolveNuisance(config, setup);
  const int methods = static_cast<int>(e.methods.size());
  const int jobs = static_cast<int>(e.n.size()) * e.trials;
  struct Outcome {
    double exploitability;
    double gap;
    std::string solver;
  };
  std::vector<std::vector<Outcome>> outcomes(jobs);
  ParallelFor(jobs, threads, [&](int j) {
    const int ni = j / e.trials;
    const int trial = j % e.trials;
    const std::uint64_t seed = DeriveSeed(DeriveSeed(e.seed, ni), trial);
    const TrialData td = MakeTrialData(setup, config, e.n[ni], seed);
    const CrossFitContext ctx(td.folded, setup.game.shape(), nuisance);
    for (int m = 0; m < methods; ++m) {
      const SelectionResult sel = SelectBestProfile(ctx, setup.class_p1, setup.class_p2,
                                                    e.methods[m], config.optimizer);
      outcomes[j].push_back({Exploitability(setup.game, sel.profile), sel.diagnostics.gap,
                             sel.diagnostics.solver});
    }
  });

  Report report;
  const double behavior = Exploitability(setup.game, setup.behavior);
  for (std::size_t ni = 0; ni < e.n.size(); ++ni) {
    const std::string key2 = std::to_string(e.n[ni]);
    report.rows.push_back({"behavior", key2, "exploitability", behavior, 0.0, e.trials});
    for (int m = 0; m < methods; ++m) {
      std::vector<double> ex;
      std::vector<double> gap;
      for (int trial = 0; trial < e.trials; ++trial) {
        ex.push_back(outcomes[ni * e.trials + trial][m].exploitability);
        gap.push_back(outcomes[ni * e.trials + trial][m].gap);
      }
      const MeanSummary s = SummarizeMean(ex);
      const MeanSummary g = SummarizeMean(gap);
      const std::string key1(MethodName(e.methods[m]));
      report.rows.push_back({key1, key2, "exploitability", s.mean, s.stderr_value, e.trials});
      report.rows.push_back({key1, key2, "gap", g.mean, g.stderr_value, e.trials});
    }
  }
  for (int j = 0; j < jobs; ++j) {
    for (int m = 0; m < methods; ++m) {
      Json line = {{"experiment", "selection"},
                   {"n", e.n[j / e.trials]},
                   {"trial", j % e.trials},
                   {"method", MethodName(e.methods[m])},
                   {"exploitability", outcomes[j][m].exploitability},
                   {"gap", outcomes[j][m].gap},
                   {"solver", outcomes[j][m].solver}};
      report.trial_log.push_back(line.dump());
    }
  }
  return report;
}

Report RunSoccerExperiment(const ExperimentConfig& config, int threads) {
  const ExperimentSetup setup = BuildSetup(config);
  CheckBudget(config, setup.game.horizon());
  const auto& e = config.experiment;
  const NuisanceOptions nuisance = ResolveNuisance(config, setup);
  const int methods = static_cast<int>(e.methods.size());
  const int n = e.n.front();
  std::vector<std::vector<PolicyProfile>> selected(e.trials);
  ParallelFor(e.trials, threads, [&](int trial) {
    const std::uint64_t seed = DeriveSeed(DeriveSeed(e.seed, 0), trial);
    const TrialData td = MakeTrialData(setup, config, n, seed);
    const CrossFitContext ctx(td.folded, setup.game.shape(), nuisance);
    for (int m = 0; m < methods; ++m) {
      selected[trial].push_back(SelectBestProfile(ctx, setup.class_p1, setup.class_p2,
                                                  e.methods[m], config.optimizer)
                                    .profile);
    }
  });

  std::vector<std::string> names = {"behavior"};
  for (Method m : e.methods) names.emplace_back(MethodName(m));
  const int side = methods + 1;
  const int cells = side * side;
  std::vector<WinrateResult> rates(static_cast<std::size_t>(cells) * e.trials);
  ParallelFor(cells * e.trials, threads, [&](int job) {
    const int cell = job / e.trials;
    const int trial = job % e.trials;
    const int i = cell / side;
    const int j = cell % side;
    const MarkovPolicy& p1 = i == 0 ? setup.behavior.p1 : selected[trial][i - 1].p1;
    const MarkovPolicy& p2 = j == 0 ? setup.behavior.p2 : selected[trial][j - 1].p2;
    rates[job] = Winrate(setup.game, PolicyProfile(p1, p2), e.num_games,
                         DeriveSeed(DeriveSeed(e.seed, 1 + cell), trial));
  });

  Report report;
  for (int cell = 0; cell < cells; ++cell) {
    std::vector<double> win;
    std::vector<double> draw;
    for (int trial = 0; trial < e.trials; ++trial) {
      win.push_back(rates[cell * e.trials + trial].p1);
      draw.push_back(rates[cell * e.trials + trial].draw);
    }
    const MeanSummary w = SummarizeMean(win);
    const MeanSummary d = SummarizeMean(draw);
    const std::string& k1 = names[cell / side];
    const std::string& k2 = names[cell % side];
    report.rows.push_back({k1, k2, "winrate", w.mean, w.stderr_value, e.trials});
    report.rows.push_back({k1, k2, "draw_rate", d.mean, d.stderr_value, e.trials});
  }
  for (int job = 0; job < cells * e.trials; ++job) {
    const int cell = job / e.trials;
    Json line = {{"experiment", "soccer"},
                 {"p1", names[cell / side]},
                 {"p2", names[cell % side]},
                 {"trial", job % e.trials},
                 {"p1_win", rates[job].p1},
                 {"p2_win", rates[job].p2},
                 {"draw", rates[job].draw}};
    report.trial_log.push_back(line.dump());
  }
  return report;
}

Report RunExperiment(const ExperimentConfig& config, int threads) {
  switch (config.experiment.kind) {
    case ExperimentSection::Kind::kOpe:
      return RunOpeExperiment(config, threads);
    case ExperimentSection::Kind::kSelection:
      return RunSelectionExperiment(config, threads);
    case ExperimentSection::Kind::kSoccer:
      return RunSoccerExperiment(config, threads);
  }
  return {};
}

}  // namespace mgope
