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

#ifndef MGOPE_CONFIG_H_
#define MGOPE_CONFIG_H_

#include <optional>
#include <string>
#include <vector>

#include "mgope/environments.h"
#include "mgope/estimators.h"
#include "mgope/exploitability.h"
#include "mgope/learning.h"
#include "mgope/nuisance.h"

namespace mgope {

struct EnvironmentConfig {
  enum class Kind { kRbrps1, kRbrps2, kSoccer };
  Kind kind = Kind::kRbrps1;
  // Full RBRPS description; starts from the default for the chosen kind.
  RbrpsConfig rbrps;
  SoccerConfig soccer;
};

struct PiDConfig {
  enum class Source { kNash, kMinimaxQ, kFile };
  Source source = Source::kNash;
  MinimaxQOptions minimax_q;
  std::string path;  // profile file for kFile
};

// weight * pi_d + (1 - weight) * anchor. Anchors: uniform, rock, paper,
// scissors, or an action index.
struct MixSpec {
  double weight = 1.0;
  std::string anchor = "uniform";
};

struct ClassConfig {
  enum class Kind { kFull, kMixture, kTarget, kBehavior };
  Kind kind = Kind::kFull;
  std::string anchor = "uniform";
  bool per_state = false;
};

struct ExperimentSection {
  enum class Kind { kOpe, kSelection, kSoccer };
  Kind kind = Kind::kOpe;
  std::vector<Method> methods = {Method::kIs, Method::kDm, Method::kDr, Method::kDrl};
  std::vector<int> n = {250};
  int trials = 10;
  int folds = 2;
  std::uint64_t seed = 1;
  // Upper bound on the sum over n of n * horizon * trials.
  double budget = 1e9;
  int num_games = 10000;
};

struct OutputConfig {
  std::string csv;
  std::string trials;  // JSON lines
};

struct ExperimentConfig {
  EnvironmentConfig environment;
  PiDConfig pi_d;
  MixSpec behavior_p1{1.0, "uniform"};
  MixSpec behavior_p2{1.0, "uniform"};
  MixSpec target_p1{1.0, "uniform"};
  MixSpec target_p2{1.0, "uniform"};
  ClassConfig class_p1;
  ClassConfig class_p2;
  ExperimentSection experiment;
  NuisanceOptions nuisance;
  bool auto_clip = false;
  OptimizerOptions optimizer;
  OutputConfig output;
};

// Unknown keys, malformed values and missing files raise kConfigError.
ExperimentConfig ParseConfig(const std::string& yaml_text);
ExperimentConfig LoadConfig(const std::string& path);

// Canonical YAML rendering; ParseConfig(DumpConfig(c)) reproduces c.
std::string DumpConfig(const ExperimentConfig& config);

// Profile files: {p1: <policy>, p2: <policy>} where a policy is
// {horizon, num_states, num_actions, rows: [[...], ...]} with rows ordered
// by t then s.
std::string DumpProfile(const PolicyProfile& profile);
PolicyProfile ParseProfile(const std::string& yaml_text);
void WriteProfile(const PolicyProfile& profile, const std::string& path);
PolicyProfile ReadProfile(const std::string& path);

}  // namespace mgope

#endif  // MGOPE_CONFIG_H_
