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

#ifndef MGOPE_HARNESS_H_
#define MGOPE_HARNESS_H_

#include <string>
#include <vector>

#include "mgope/config.h"
#include "mgope/data.h"

namespace mgope {

struct ExperimentSetup {
  Game game;
  PolicyProfile pi_d;
  PolicyProfile behavior;
  PolicyProfile target;
  PolicyClass class_p1;
  PolicyClass class_p2;
};

Game BuildGame(const EnvironmentConfig& environment);

// "uniform", "rock" / "paper" / "scissors", or an action index.
MarkovPolicy AnchorPolicy(const std::string& anchor, Player player, const GameShape& shape);

ExperimentSetup BuildSetup(const ExperimentConfig& config);

// Nuisance options for one context, with the clip base resolved.
NuisanceOptions ResolveNuisance(const ExperimentConfig& config, const ExperimentSetup& setup);

struct ReportRow {
  std::string key1;
  std::string key2;
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;
  int trials = 0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<std::string> trial_log;  // one JSON object per line

  const ReportRow* Find(const std::string& key1, const std::string& key2,
                        const std::string& metric) const;
};

std::string FormatCsv(const Report& report);
std::string FormatTrialLog(const Report& report);
// Writes whichever of the configured outputs are non-empty.
void WriteReport(const Report& report, const OutputConfig& output);

// RMSE and its standard error sd(e^2) / (sqrt(m) * 2 * RMSE).
struct RmseSummary {
  double rmse = 0.0;
  double stderr_value = 0.0;
};
RmseSummary SummarizeErrors(const std::vector<double>& errors);

// Mean and sd / sqrt(m).
struct MeanSummary {
  double mean = 0.0;
  double stderr_value = 0.0;
};
MeanSummary SummarizeMean(const std::vector<double>& values);

struct WinrateResult {
  double p1 = 0.0;
  double p2 = 0.0;
  double draw = 0.0;
};
// Outcome of each episode is the sign of its undiscounted return.
WinrateResult Winrate(const Game& game, const PolicyProfile& profile, int num_games,
                      std::uint64_t seed, int threads = 1);

// Rows keyed (n, method): rmse and mean estimate; plus a (truth, -) row.
Report RunOpeExperiment(const ExperimentConfig& config, int threads = 1);
// Rows keyed (method, -): exploitability of the selection; plus behavior.
Report RunSelectionExperiment(const ExperimentConfig& config, int threads = 1);
// Rows keyed (policy_1, policy_2): player-1 win rate and draw rate.
Report RunSoccerExperiment(const ExperimentConfig& config, int threads = 1);
Report RunExperiment(const ExperimentConfig& config, int threads = 1);

// Throws kBudgetExceeded when the configured data volume is too large.
void CheckBudget(const ExperimentConfig& config, int horizon);

// Runs fn(0), ..., fn(count - 1) on `threads` workers.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

}  // namespace mgope

#endif  // MGOPE_HARNESS_H_
