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

// Command-line front end: simulate, estimate, exploit, select, experiment,
// truth. Exit codes: 0 ok, 1 other failure, 2 config error, 3 numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mgope/config.h"
#include "mgope/data.h"
#include "mgope/error.h"
#include "mgope/harness.h"

namespace {

using namespace mgope;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

ExperimentConfig Load(const Globals& g) {
  ExperimentConfig c = g.config.empty() ? ExperimentConfig{} : LoadConfig(g.config);
  if (g.seed) c.experiment.seed = *g.seed;
  return c;
}

void Emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIoError, "cannot write " + path);
  f << text;
}

CrossFitContext MakeContext(const ExperimentConfig& c, const ExperimentSetup& setup,
                            const std::string& data_path) {
  Dataset data = ReadDataset(data_path, &setup.game);
  // Files do not carry the logging profile; the configured behavior stands in.
  data.behavior_known = setup.behavior;
  return CrossFitContext(AssignFolds(std::move(data), c.experiment.folds,
                                     DeriveSeed(c.experiment.seed, 1)),
                         setup.game.shape(), ResolveNuisance(c, setup));
}

int Run(int argc, char** argv) {
  CLI::App app{"Off-policy evaluation and selection for two-player zero-sum Markov games"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "YAML experiment config");
  app.add_option("--seed", g.seed, "override experiment.seed");
  app.add_option("--out", g.out, "output path (directory for experiment and select)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "sample a dataset from the behavior profile");
  int sim_n = 0;
  simulate->add_option("--n", sim_n, "trajectories (default: first experiment.n)");

  std::string data_path;
  auto* estimate = app.add_subcommand("estimate", "estimate the target value from a dataset");
  estimate->add_option("--data", data_path, "dataset file")->required();
  auto* exploit = app.add_subcommand("exploit", "estimate the target's exploitability");
  exploit->add_option("--data", data_path, "dataset file")->required();
  auto* select = app.add_subcommand("select", "select a profile from a dataset per method");
  select->add_option("--data", data_path, "dataset file")->required();
  auto* experiment = app.add_subcommand("experiment", "run the configured experiment");
  auto* truth = app.add_subcommand("truth", "exact quantities of the configured setup");
  auto* dump = app.add_subcommand("config", "print the fully resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const ExperimentConfig c = Load(g);
  if (dump->parsed()) {
    Emit(DumpConfig(c), g.out);
    return 0;
  }
  const ExperimentSetup setup = BuildSetup(c);

  if (simulate->parsed()) {
    if (g.out.empty()) Fail(ErrorCode::kConfigError, "simulate needs --out");
    const int n = sim_n > 0 ? sim_n : c.experiment.n.front();
    WriteDataset(Simulate(setup.game, setup.behavior, n, c.experiment.seed, g.threads), g.out);
    return 0;
  }
  if (estimate->parsed()) {
    const CrossFitContext ctx = MakeContext(c, setup, data_path);
    Report report;
    for (Method m : c.experiment.methods) {
      const EstimatorResult r = Estimate(ctx, setup.target, m);
      const MeanSummary s = SummarizeMean(r.per_trajectory);
      report.rows.push_back({std::string(MethodName(m)), "-", "value", r.estimate,
                             s.stderr_value, 1});
    }
    Emit(FormatCsv(report), g.out);
    return 0;
  }
  if (exploit->parsed()) {
    const CrossFitContext ctx = MakeContext(c, setup, data_path);
    Report report;
    for (Method m : c.experiment.methods) {
      const auto est = EstimateExploitability(ctx, setup.target, setup.class_p1,
                                              setup.class_p2, m, c.optimizer);
      const std::string name(MethodName(m));
      report.rows.push_back({name, "-", "exploitability", est.total, 0.0, 1});
      report.rows.push_back({name, "p1", "max_value", est.max_p1_value, 0.0, 1});
      report.rows.push_back({name, "p2", "max_value", est.max_p2_value, 0.0, 1});
    }
    Emit(FormatCsv(report), g.out);
    return 0;
  }
  if (select->parsed()) {
    const CrossFitContext ctx = MakeContext(c, setup, data_path);
    if (!g.out.empty()) std::filesystem::create_directories(g.out);
    Report report;
    for (Method m : c.experiment.methods) {
      const auto sel = SelectBestProfile(ctx, setup.class_p1, setup.class_p2, m, c.optimizer);
      const std::string name(MethodName(m));
      report.rows.push_back({name, "-", "exploitability",
                             Exploitability(setup.game, sel.profile), 0.0, 1});
      report.rows.push_back({name, "-", "gap", sel.diagnostics.gap, 0.0, 1});
      if (!g.out.empty()) {
        WriteProfile(sel.profile, (std::filesystem::path(g.out) / (name + ".yaml")).string());
      }
    }
    Emit(FormatCsv(report),
         g.out.empty() ? "" : (std::filesystem::path(g.out) / "select.csv").string());
    return 0;
  }
  if (experiment->parsed()) {
    const Report report = RunExperiment(c, g.threads);
    OutputConfig out = c.output;
    if (!g.out.empty()) {
      std::filesystem::create_directories(g.out);
      out.csv = (std::filesystem::path(g.out) / "report.csv").string();
      out.trials = (std::filesystem::path(g.out) / "trials.jsonl").string();
    }
    WriteReport(report, out);
    if (out.csv.empty()) std::cout << FormatCsv(report);
    return 0;
  }
  if (truth->parsed()) {
    Report report;
    const Game& game = setup.game;
    const NashResult nash = NashEquilibrium(game);
    report.rows.push_back({"nash", "-", "value", nash.value, 0.0, 1});
    for (const auto& [name, profile] :
         {std::pair<std::string, const PolicyProfile*>{"pi_d", &setup.pi_d},
          {"behavior", &setup.behavior},
          {"target", &setup.target}}) {
      report.rows.push_back({name, "-", "value", EvaluateProfile(game, *profile).total, 0.0, 1});
      report.rows.push_back({name, "-", "exploitability", Exploitability(game, *profile), 0.0, 1});
    }
    report.rows.push_back({"target", "class", "exploitability",
                           TrueClassExploitability(game, setup.target, setup.class_p1,
                                                   setup.class_p2, c.optimizer),
                           0.0, 1});
    Emit(FormatCsv(report), g.out);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const mgope::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case mgope::ErrorCode::kConfigError:
      case mgope::ErrorCode::kBudgetExceeded:
        return 2;
      case mgope::ErrorCode::kNumericalFailure:
      case mgope::ErrorCode::kObjectiveFailure:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
