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

#include "mgope/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "mgope/error.h"
#include "mgope/rng.h"

namespace mgope {
namespace {

constexpr char kMagic[] = "mgope-v1";
constexpr std::uint64_t kFoldStream = 0xF01D000000000000ull;

enum Substream : std::uint64_t {
  kInitialState = 0,
  kActionP1 = 1,
  kActionP2 = 2,
  kTransition = 3,
  kRewardNoise = 4,
};

Outcome SampleOutcome(const TransitionModel& model, int cell, double u) {
  double cum = 0.0;
  const auto outcomes = model.outcomes(cell);
  for (const Outcome& o : outcomes) {
    cum += o.prob;
    if (u < cum) return o;
  }
  const double mass = model.uniform_mass(cell);
  if (mass > 0.0) {
    const int S = model.num_states();
    const int s = std::min(
        S - 1, static_cast<int>(std::max(0.0, u - cum) / mass * S));
    return {s, mass / S, model.uniform_reward(cell)};
  }
  // Round-off beyond the last outcome.
  for (auto it = outcomes.rbegin(); it != outcomes.rend(); ++it) {
    if (it->prob > 0.0) return *it;
  }
  return outcomes.back();
}

Trajectory SimulateOne(const Game& game, const PolicyProfile& behavior,
                       std::uint64_t seed, std::uint64_t index) {
  const GameSpec& spec = game.spec();
  Trajectory traj;
  traj.steps.reserve(spec.horizon);
  int s = CounterRng(seed, StreamId(index, 0, kInitialState))
              .Categorical(spec.initial_dist);
  for (int t = 0; t < spec.horizon; ++t) {
    Step step;
    step.state = s;
    step.a1 = CounterRng(seed, StreamId(index, t, kActionP1))
                  .Categorical(behavior.p1.row(t, s));
    step.a2 = CounterRng(seed, StreamId(index, t, kActionP2))
                  .Categorical(behavior.p2.row(t, s));
    const int cell = spec.Cell(s, step.a1, step.a2);
    CounterRng noise(seed, StreamId(index, t, kRewardNoise));
    const SampledTransition o = SampleTransition(
        game, cell, CounterRng(seed, StreamId(index, t, kTransition)).Uniform(),
        noise);
    step.reward = o.reward;
    traj.steps.push_back(step);
    s = o.next;
  }
  traj.terminal_state = s;
  return traj;
}

std::string FormatDouble(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(std::string_view field, const char* what) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    Fail(ErrorCode::kSchemaMismatch,
         std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t ParseHex(std::string_view field) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(),
                                   value, 16);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    Fail(ErrorCode::kSchemaMismatch, "malformed fingerprint");
  }
  return value;
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

SampledTransition SampleTransition(const Game& game, int cell, double u,
                                   CounterRng& noise_rng) {
  const GameSpec& spec = game.spec();
  const Outcome o = SampleOutcome(spec.transition, cell, u);
  double reward = o.reward;
  switch (spec.reward_noise.kind) {
    case RewardNoise::Kind::kDeterministic:
      break;
    case RewardNoise::Kind::kUniform:
      reward += spec.reward_noise.param * (2.0 * noise_rng.Uniform() - 1.0);
      break;
    case RewardNoise::Kind::kGaussian:
      reward += spec.reward_noise.param * noise_rng.Normal();
      break;
  }
  return {o.next, reward};
}

int FoldedDataset::fold_size(int k) const {
  return static_cast<int>(std::count(fold_of.begin(), fold_of.end(), k));
}

std::vector<int> FoldedDataset::indices_in(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
    if (fold_of[i] == k) out.push_back(i);
  }
  return out;
}

std::vector<int> FoldedDataset::indices_outside(int k) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i) {
    if (fold_of[i] != k) out.push_back(i);
  }
  return out;
}

Dataset Simulate(const Game& game, const PolicyProfile& behavior, int n,
                 std::uint64_t seed, int threads) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "simulate needs n >= 1");
  CheckProfileFits(game.shape(), behavior);
  Dataset data;
  data.game_fingerprint = game.fingerprint();
  data.behavior_known = behavior;
  data.seed = seed;
  data.trajectories.resize(n);
  threads = std::clamp(threads, 1, n);
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      data.trajectories[i] = SimulateOne(game, behavior, seed, i);
    }
  };
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back(work, n * w / threads, n * (w + 1) / threads);
    }
    for (auto& th : pool) th.join();
  }
  return data;
}

FoldedDataset AssignFolds(Dataset dataset, int num_folds, std::uint64_t seed) {
  const int n = dataset.size();
  if (num_folds < 2 || num_folds > n) {
    Fail(ErrorCode::kTooManyFolds, "need 2 <= K <= n, got K=" +
                                       std::to_string(num_folds) +
                                       ", n=" + std::to_string(n));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed, kFoldStream);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Below(static_cast<std::uint64_t>(i) + 1)]);
  }
  FoldedDataset out;
  out.num_folds = num_folds;
  out.fold_of.assign(n, 0);
  for (int pos = 0; pos < n; ++pos) out.fold_of[order[pos]] = pos % num_folds;
  out.dataset = std::move(dataset);
  return out;
}

std::string SerializeDataset(const Dataset& dataset) {
  const int T = dataset.horizon();
  std::string out;
  out += kMagic;
  out += ' ' + FingerprintHex(dataset.game_fingerprint) + ' ' +
         std::to_string(T) + ' ' + std::to_string(dataset.size()) + ' ' +
         std::to_string(dataset.seed) + '\n';
  for (int i = 0; i < dataset.size(); ++i) {
    const Trajectory& traj = dataset.trajectories[i];
    if (static_cast<int>(traj.steps.size()) != T) {
      Fail(ErrorCode::kSchemaMismatch, "trajectories differ in length");
    }
    for (int t = 0; t < T; ++t) {
      const Step& st = traj.steps[t];
      const int next = t + 1 < T ? traj.steps[t + 1].state : traj.terminal_state;
      out += std::to_string(i) + ',' + std::to_string(t + 1) + ',' +
             std::to_string(st.state) + ',' + std::to_string(st.a1) + ',' +
             std::to_string(st.a2) + ',' + FormatDouble(st.reward) + ',' +
             std::to_string(next) + '\n';
    }
  }
  return out;
}

Dataset ParseDataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kSchemaMismatch, "empty dataset");
  const auto header = Split(line, ' ');
  if (header.size() != 5 || header[0] != kMagic) {
    Fail(ErrorCode::kSchemaMismatch, "bad dataset header '" + line + "'");
  }
  Dataset data;
  data.game_fingerprint = ParseHex(header[1]);
  const int T = ParseNumber<int>(header[2], "horizon");
  const int n = ParseNumber<int>(header[3], "count");
  data.seed = ParseNumber<std::uint64_t>(header[4], "seed");
  if (T < 1 || n < 1) Fail(ErrorCode::kSchemaMismatch, "empty dataset");
  data.trajectories.assign(n, Trajectory{std::vector<Step>(T), 0});
  std::vector<int> next_state(T);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      if (!std::getline(in, line)) {
        Fail(ErrorCode::kSchemaMismatch, "dataset truncated at trajectory " +
                                             std::to_string(i));
      }
      const auto f = Split(line, ',');
      if (f.size() != 7) Fail(ErrorCode::kSchemaMismatch, "bad row '" + line + "'");
      if (ParseNumber<int>(f[0], "index") != i ||
          ParseNumber<int>(f[1], "step") != t + 1) {
        Fail(ErrorCode::kSchemaMismatch, "rows out of order at '" + line + "'");
      }
      Step& st = data.trajectories[i].steps[t];
      st.state = ParseNumber<int>(f[2], "state");
      st.a1 = ParseNumber<int>(f[3], "action");
      st.a2 = ParseNumber<int>(f[4], "action");
      st.reward = ParseNumber<double>(f[5], "reward");
      next_state[t] = ParseNumber<int>(f[6], "state");
      if (t > 0 && next_state[t - 1] != st.state) {
        Fail(ErrorCode::kSchemaMismatch, "s_next does not match next state");
      }
    }
    data.trajectories[i].terminal_state = next_state[T - 1];
  }
  while (std::getline(in, line)) {
    if (!line.empty()) Fail(ErrorCode::kSchemaMismatch, "trailing rows");
  }
  return data;
}

void WriteDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << SerializeDataset(dataset);
  if (!out) Fail(ErrorCode::kIoError, "write to " + path + " failed");
}

Dataset ReadDataset(const std::string& path, const Game* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset data = ParseDataset(buf.str());
  if (expected != nullptr) {
    if (data.game_fingerprint != expected->fingerprint()) {
      Fail(ErrorCode::kFingerprintMismatch,
           "dataset " + path + " was generated for game " +
               FingerprintHex(data.game_fingerprint) + ", not " +
               FingerprintHex(expected->fingerprint()));
    }
    if (data.horizon() != expected->horizon()) {
      Fail(ErrorCode::kHorizonMismatch, "dataset horizon differs from game");
    }
    for (const Trajectory& traj : data.trajectories) {
      for (const Step& st : traj.steps) {
        if (st.state < 0 || st.state >= expected->num_states() || st.a1 < 0 ||
            st.a1 >= expected->actions_p1() || st.a2 < 0 ||
            st.a2 >= expected->actions_p2()) {
          Fail(ErrorCode::kSchemaMismatch, "index out of range");
        }
      }
    }
  }
  return data;
}

double EmpiricalReturn(const Dataset& dataset, double discount) {
  double total = 0.0;
  for (const Trajectory& traj : dataset.trajectories) {
    double g = 0.0;
    double w = 1.0;
    for (const Step& st : traj.steps) {
      g += w * st.reward;
      w *= discount;
    }
    total += g;
  }
  return total / dataset.size();
}

std::vector<int> VisitCounts(const Dataset& dataset, const GameShape& shape,
                             const std::vector<int>& indices) {
  const int cells = shape.num_cells();
  std::vector<int> counts(static_cast<std::size_t>(shape.horizon) * cells, 0);
  for (int i : indices) {
    const auto& steps = dataset.trajectories[i].steps;
    for (int t = 0; t < shape.horizon; ++t) {
      ++counts[static_cast<std::size_t>(t) * cells +
               shape.Cell(steps[t].state, steps[t].a1, steps[t].a2)];
    }
  }
  return counts;
}

}  // namespace mgope
