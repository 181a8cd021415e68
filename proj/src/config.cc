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

#include "mgope/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mgope/error.h"

namespace mgope {
namespace {

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  Fail(ErrorCode::kConfigError, where + ": " + what);
}

void CheckKeys(const YAML::Node& node, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!node.IsMap()) Bad(where, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) Bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
T Get(const YAML::Node& node, const std::string& key, const std::string& where) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    Bad(where + "." + key, "malformed value");
  }
}

template <typename T>
void Read(const YAML::Node& node, const std::string& key, const std::string& where,
          T* out) {
  if (node[key]) *out = Get<T>(node, key, where);
}

const std::vector<std::pair<std::string, RpsOutcome>>& OutcomeNames() {
  static const std::vector<std::pair<std::string, RpsOutcome>> names = {
      {"draw", RpsOutcome::kDraw},         {"p1_rock", RpsOutcome::kP1Rock},
      {"p1_paper", RpsOutcome::kP1Paper},  {"p1_scissors", RpsOutcome::kP1Scissors},
      {"p2_rock", RpsOutcome::kP2Rock},    {"p2_paper", RpsOutcome::kP2Paper},
      {"p2_scissors", RpsOutcome::kP2Scissors}};
  return names;
}

RpsOutcome ParseOutcome(const std::string& s, const std::string& where) {
  for (const auto& [name, o] : OutcomeNames()) {
    if (name == s) return o;
  }
  Bad(where, "unknown outcome '" + s + "'");
}

std::string OutcomeName(RpsOutcome o) {
  for (const auto& [name, v] : OutcomeNames()) {
    if (v == o) return name;
  }
  return "draw";
}

void ParseEnvironment(const YAML::Node& node, EnvironmentConfig* env) {
  const std::string where = "environment";
  CheckKeys(node, where,
            {"kind", "horizon", "discount", "payoffs", "transitions", "init_pos_a",
             "init_pos_b", "init_ball"});
  const std::string kind = node["kind"] ? Get<std::string>(node, "kind", where) : "rbrps1";
  if (kind == "rbrps1") {
    env->kind = EnvironmentConfig::Kind::kRbrps1;
    env->rbrps = DefaultRbrps1Config();
  } else if (kind == "rbrps2") {
    env->kind = EnvironmentConfig::Kind::kRbrps2;
    env->rbrps = DefaultRbrps2Config();
  } else if (kind == "soccer") {
    env->kind = EnvironmentConfig::Kind::kSoccer;
  } else {
    Bad(where + ".kind", "expected rbrps1, rbrps2 or soccer");
  }
  const bool soccer = env->kind == EnvironmentConfig::Kind::kSoccer;
  if (soccer) {
    for (const char* k : {"payoffs", "transitions"}) {
      if (node[k]) Bad(where, std::string(k) + " is not a soccer option");
    }
    Read(node, "horizon", where, &env->soccer.horizon);
    Read(node, "discount", where, &env->soccer.discount);
    Read(node, "init_pos_a", where, &env->soccer.init_pos_a);
    Read(node, "init_pos_b", where, &env->soccer.init_pos_b);
    if (node["init_ball"]) {
      const std::string b = Get<std::string>(node, "init_ball", where);
      if (b == "p1") {
        env->soccer.init_ball = Player::kP1;
      } else if (b == "p2") {
        env->soccer.init_ball = Player::kP2;
      } else {
        Bad(where + ".init_ball", "expected p1 or p2");
      }
    }
    return;
  }
  for (const char* k : {"init_pos_a", "init_pos_b", "init_ball"}) {
    if (node[k]) Bad(where, std::string(k) + " is a soccer option");
  }
  Read(node, "horizon", where, &env->rbrps.horizon);
  Read(node, "discount", where, &env->rbrps.discount);
  if (node["payoffs"]) {
    const auto rows = Get<std::vector<std::vector<double>>>(node, "payoffs", where);
    env->rbrps.payoff_matrices.clear();
    for (const auto& r : rows) {
      if (r.size() != 9) Bad(where + ".payoffs", "each matrix needs 9 entries");
      std::array<double, 9> m{};
      std::copy(r.begin(), r.end(), m.begin());
      env->rbrps.payoff_matrices.push_back(m);
    }
  }
  if (node["transitions"]) {
    const YAML::Node list = node["transitions"];
    if (!list.IsSequence()) Bad(where + ".transitions", "expected a list");
    env->rbrps.transition_graph.clear();
    for (const auto& item : list) {
      const std::string w = where + ".transitions[]";
      CheckKeys(item, w, {"from", "outcome", "to"});
      const int from = Get<int>(item, "from", w);
      const RpsOutcome o = ParseOutcome(Get<std::string>(item, "outcome", w), w);
      env->rbrps.transition_graph[{from, o}] = Get<int>(item, "to", w);
    }
  }
}

void ParseMix(const YAML::Node& node, const std::string& where, MixSpec* mix) {
  CheckKeys(node, where, {"weight", "anchor"});
  Read(node, "weight", where, &mix->weight);
  Read(node, "anchor", where, &mix->anchor);
  if (!(mix->weight >= 0.0 && mix->weight <= 1.0)) Bad(where + ".weight", "must lie in [0, 1]");
}

void ParsePolicies(const YAML::Node& node, ExperimentConfig* c) {
  const std::string where = "policies";
  CheckKeys(node, where, {"pi_d", "behavior", "target"});
  if (node["pi_d"]) {
    const YAML::Node pd = node["pi_d"];
    const std::string w = where + ".pi_d";
    CheckKeys(pd, w, {"source", "episodes", "epsilon", "visit_scale", "seed", "path"});
    const std::string src = pd["source"] ? Get<std::string>(pd, "source", w) : "nash";
    if (src == "nash") {
      c->pi_d.source = PiDConfig::Source::kNash;
    } else if (src == "minimax_q") {
      c->pi_d.source = PiDConfig::Source::kMinimaxQ;
    } else if (src == "file") {
      c->pi_d.source = PiDConfig::Source::kFile;
    } else {
      Bad(w + ".source", "expected nash, minimax_q or file");
    }
    Read(pd, "episodes", w, &c->pi_d.minimax_q.episodes);
    Read(pd, "epsilon", w, &c->pi_d.minimax_q.epsilon);
    Read(pd, "visit_scale", w, &c->pi_d.minimax_q.visit_scale);
    Read(pd, "seed", w, &c->pi_d.minimax_q.seed);
    Read(pd, "path", w, &c->pi_d.path);
    if (c->pi_d.source == PiDConfig::Source::kFile && c->pi_d.path.empty()) {
      Bad(w + ".path", "required when source is file");
    }
  }
  for (const char* side : {"behavior", "target"}) {
    if (!node[side]) continue;
    const std::string w = where + "." + side;
    CheckKeys(node[side], w, {"p1", "p2"});
    const bool behavior = std::string(side) == "behavior";
    if (node[side]["p1"]) {
      ParseMix(node[side]["p1"], w + ".p1", behavior ? &c->behavior_p1 : &c->target_p1);
    }
    if (node[side]["p2"]) {
      ParseMix(node[side]["p2"], w + ".p2", behavior ? &c->behavior_p2 : &c->target_p2);
    }
  }
}

void ParseClass(const YAML::Node& node, const std::string& where, ClassConfig* cls) {
  CheckKeys(node, where, {"kind", "anchor", "per_state"});
  const std::string kind = node["kind"] ? Get<std::string>(node, "kind", where) : "full";
  if (kind == "full") {
    cls->kind = ClassConfig::Kind::kFull;
  } else if (kind == "mixture") {
    cls->kind = ClassConfig::Kind::kMixture;
  } else if (kind == "target") {
    cls->kind = ClassConfig::Kind::kTarget;
  } else if (kind == "behavior") {
    cls->kind = ClassConfig::Kind::kBehavior;
  } else {
    Bad(where + ".kind", "expected full, mixture, target or behavior");
  }
  Read(node, "anchor", where, &cls->anchor);
  Read(node, "per_state", where, &cls->per_state);
}

void ParseExperiment(const YAML::Node& node, ExperimentSection* e) {
  const std::string where = "experiment";
  CheckKeys(node, where,
            {"kind", "methods", "n", "trials", "folds", "seed", "budget", "num_games"});
  if (node["kind"]) {
    const std::string kind = Get<std::string>(node, "kind", where);
    if (kind == "ope") {
      e->kind = ExperimentSection::Kind::kOpe;
    } else if (kind == "selection") {
      e->kind = ExperimentSection::Kind::kSelection;
    } else if (kind == "soccer") {
      e->kind = ExperimentSection::Kind::kSoccer;
    } else {
      Bad(where + ".kind", "expected ope, selection or soccer");
    }
  }
  if (node["methods"]) {
    e->methods.clear();
    for (const auto& m : Get<std::vector<std::string>>(node, "methods", where)) {
      e->methods.push_back(ParseMethod(m));
    }
    if (e->methods.empty()) Bad(where + ".methods", "must not be empty");
  }
  if (node["n"]) {
    if (node["n"].IsSequence()) {
      e->n = Get<std::vector<int>>(node, "n", where);
    } else {
      e->n = {Get<int>(node, "n", where)};
    }
    if (e->n.empty()) Bad(where + ".n", "must not be empty");
    for (int n : e->n) {
      if (n < 1) Bad(where + ".n", "sizes must be positive");
    }
  }
  Read(node, "trials", where, &e->trials);
  Read(node, "folds", where, &e->folds);
  Read(node, "seed", where, &e->seed);
  Read(node, "budget", where, &e->budget);
  Read(node, "num_games", where, &e->num_games);
  if (e->trials < 1) Bad(where + ".trials", "must be >= 1");
  if (e->folds < 1) Bad(where + ".folds", "must be >= 1");
  if (e->num_games < 1) Bad(where + ".num_games", "must be >= 1");
}

void ParseNuisance(const YAML::Node& node, ExperimentConfig* c) {
  const std::string where = "nuisance";
  CheckKeys(node, where,
            {"transition_smoothing", "behavior_smoothing", "histogram_smoothing", "q_method",
             "td_learning_rate", "td_sweeps", "mu_denominator", "clip_base",
             "known_behavior"});
  NuisanceOptions& o = c->nuisance;
  Read(node, "transition_smoothing", where, &o.transition_smoothing);
  Read(node, "behavior_smoothing", where, &o.behavior_smoothing);
  Read(node, "histogram_smoothing", where, &o.histogram_smoothing);
  Read(node, "td_learning_rate", where, &o.td_learning_rate);
  Read(node, "td_sweeps", where, &o.td_sweeps);
  Read(node, "known_behavior", where, &o.use_known_behavior);
  if (node["q_method"]) {
    const std::string q = Get<std::string>(node, "q_method", where);
    if (q == "model") {
      o.q_method = NuisanceOptions::QMethod::kModel;
    } else if (q == "td") {
      o.q_method = NuisanceOptions::QMethod::kTd;
    } else {
      Bad(where + ".q_method", "expected model or td");
    }
  }
  if (node["mu_denominator"]) {
    const std::string m = Get<std::string>(node, "mu_denominator", where);
    if (m == "histogram") {
      o.mu_denominator = NuisanceOptions::MuDenominator::kHistogram;
    } else if (m == "model") {
      o.mu_denominator = NuisanceOptions::MuDenominator::kModel;
    } else {
      Bad(where + ".mu_denominator", "expected histogram or model");
    }
  }
  if (node["clip_base"]) {
    if (node["clip_base"].IsScalar() && node["clip_base"].as<std::string>() == "auto") {
      c->auto_clip = true;
    } else {
      c->auto_clip = false;
      o.clip_base = Get<double>(node, "clip_base", where);
      if (!(o.clip_base >= 1.0)) Bad(where + ".clip_base", "must be >= 1 or auto");
    }
  }
  for (double s : {o.transition_smoothing, o.behavior_smoothing, o.histogram_smoothing}) {
    if (!(s >= 0.0)) Bad(where, "smoothing must be non-negative");
  }
}

void ParseOptimizer(const YAML::Node& node, OptimizerOptions* o) {
  const std::string where = "optimizer";
  CheckKeys(node, where,
            {"grid_points", "golden_tolerance", "coordinate_sweeps", "restarts",
             "max_ascent_sweeps", "minimax_sweeps", "saddle_grid_points", "saddle_refine",
             "seed"});
  Read(node, "grid_points", where, &o->grid_points);
  Read(node, "golden_tolerance", where, &o->golden_tolerance);
  Read(node, "coordinate_sweeps", where, &o->coordinate_sweeps);
  Read(node, "restarts", where, &o->restarts);
  Read(node, "max_ascent_sweeps", where, &o->max_ascent_sweeps);
  Read(node, "minimax_sweeps", where, &o->minimax_sweeps);
  Read(node, "saddle_grid_points", where, &o->saddle_grid_points);
  Read(node, "saddle_refine", where, &o->saddle_refine);
  Read(node, "seed", where, &o->seed);
  if (o->grid_points < 2 || o->saddle_grid_points < 2) Bad(where, "grids need >= 2 points");
  if (!(o->golden_tolerance > 0.0)) Bad(where + ".golden_tolerance", "must be positive");
}

std::string ReadFile(const std::string& path, ErrorCode code) {
  std::ifstream in(path);
  if (!in) Fail(code, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* ClassKindName(ClassConfig::Kind k) {
  switch (k) {
    case ClassConfig::Kind::kFull: return "full";
    case ClassConfig::Kind::kMixture: return "mixture";
    case ClassConfig::Kind::kTarget: return "target";
    case ClassConfig::Kind::kBehavior: return "behavior";
  }
  return "full";
}

void EmitPolicy(YAML::Emitter& out, const MarkovPolicy& pi) {
  out << YAML::BeginMap;
  out << YAML::Key << "horizon" << YAML::Value << pi.horizon();
  out << YAML::Key << "num_states" << YAML::Value << pi.num_states();
  out << YAML::Key << "num_actions" << YAML::Value << pi.num_actions();
  out << YAML::Key << "rows" << YAML::Value << YAML::BeginSeq;
  for (int t = 0; t < pi.horizon(); ++t) {
    for (int s = 0; s < pi.num_states(); ++s) {
      out << YAML::Flow << YAML::BeginSeq;
      for (double p : pi.row(t, s)) out << p;
      out << YAML::EndSeq;
    }
  }
  out << YAML::EndSeq << YAML::EndMap;
}

MarkovPolicy ParsePolicy(const YAML::Node& node, Player player, const std::string& where) {
  CheckKeys(node, where, {"horizon", "num_states", "num_actions", "rows"});
  const int T = Get<int>(node, "horizon", where);
  const int S = Get<int>(node, "num_states", where);
  const int A = Get<int>(node, "num_actions", where);
  if (T < 1 || S < 1 || A < 1) Bad(where, "dimensions must be positive");
  const auto rows = Get<std::vector<std::vector<double>>>(node, "rows", where);
  if (rows.size() != static_cast<std::size_t>(T) * S) Bad(where + ".rows", "need horizon * num_states rows");
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(T) * S * A);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != A) Bad(where + ".rows", "row width must equal num_actions");
    table.insert(table.end(), r.begin(), r.end());
  }
  try {
    return MarkovPolicy::FromTable(player, T, S, A, std::move(table));
  } catch (const Error& e) {
    Bad(where, e.what());
  }
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    Fail(ErrorCode::kConfigError, std::string("invalid YAML: ") + e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  CheckKeys(root, "config",
            {"environment", "policies", "classes", "experiment", "nuisance", "optimizer",
             "output"});
  if (root["environment"]) ParseEnvironment(root["environment"], &c.environment);
  if (root["policies"]) ParsePolicies(root["policies"], &c);
  if (root["classes"]) {
    CheckKeys(root["classes"], "classes", {"p1", "p2"});
    if (root["classes"]["p1"]) ParseClass(root["classes"]["p1"], "classes.p1", &c.class_p1);
    if (root["classes"]["p2"]) ParseClass(root["classes"]["p2"], "classes.p2", &c.class_p2);
  }
  if (root["experiment"]) ParseExperiment(root["experiment"], &c.experiment);
  if (root["nuisance"]) ParseNuisance(root["nuisance"], &c);
  if (root["optimizer"]) ParseOptimizer(root["optimizer"], &c.optimizer);
  if (root["output"]) {
    CheckKeys(root["output"], "output", {"csv", "trials"});
    Read(root["output"], "csv", "output", &c.output.csv);
    Read(root["output"], "trials", "output", &c.output.trials);
  }
  if (c.pi_d.source == PiDConfig::Source::kFile) {
    std::ifstream probe(c.pi_d.path);
    if (!probe) Fail(ErrorCode::kConfigError, "pi_d file not found: " + c.pi_d.path);
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  return ParseConfig(ReadFile(path, ErrorCode::kConfigError));
}

std::string DumpConfig(const ExperimentConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  const auto& env = c.environment;
  if (env.kind == EnvironmentConfig::Kind::kSoccer) {
    out << YAML::Key << "kind" << YAML::Value << "soccer";
    out << YAML::Key << "horizon" << YAML::Value << env.soccer.horizon;
    out << YAML::Key << "discount" << YAML::Value << env.soccer.discount;
    out << YAML::Key << "init_pos_a" << YAML::Value << env.soccer.init_pos_a;
    out << YAML::Key << "init_pos_b" << YAML::Value << env.soccer.init_pos_b;
    out << YAML::Key << "init_ball" << YAML::Value
        << (env.soccer.init_ball == Player::kP1 ? "p1" : "p2");
  } else {
    out << YAML::Key << "kind" << YAML::Value
        << (env.kind == EnvironmentConfig::Kind::kRbrps1 ? "rbrps1" : "rbrps2");
    out << YAML::Key << "horizon" << YAML::Value << env.rbrps.horizon;
    out << YAML::Key << "discount" << YAML::Value << env.rbrps.discount;
    out << YAML::Key << "payoffs" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : env.rbrps.payoff_matrices) {
      out << YAML::Flow << YAML::BeginSeq;
      for (double x : m) out << x;
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "transitions" << YAML::Value << YAML::BeginSeq;
    for (const auto& [key, to] : env.rbrps.transition_graph) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << key.first
          << YAML::Key << "outcome" << YAML::Value << OutcomeName(key.second) << YAML::Key
          << "to" << YAML::Value << to << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  out << YAML::Key << "policies" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "pi_d" << YAML::Value << YAML::BeginMap;
  const char* src = c.pi_d.source == PiDConfig::Source::kNash        ? "nash"
                    : c.pi_d.source == PiDConfig::Source::kMinimaxQ ? "minimax_q"
                                                                     : "file";
  out << YAML::Key << "source" << YAML::Value << src;
  out << YAML::Key << "episodes" << YAML::Value << c.pi_d.minimax_q.episodes;
  out << YAML::Key << "epsilon" << YAML::Value << c.pi_d.minimax_q.epsilon;
  out << YAML::Key << "visit_scale" << YAML::Value << c.pi_d.minimax_q.visit_scale;
  out << YAML::Key << "seed" << YAML::Value << c.pi_d.minimax_q.seed;
  if (!c.pi_d.path.empty()) out << YAML::Key << "path" << YAML::Value << c.pi_d.path;
  out << YAML::EndMap;
  auto mix = [&](const char* name, const MixSpec& a, const MixSpec& b) {
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    for (const auto& [key, m] : {std::pair{"p1", &a}, std::pair{"p2", &b}}) {
      out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
          << "weight" << YAML::Value << m->weight << YAML::Key << "anchor" << YAML::Value
          << m->anchor << YAML::EndMap;
    }
    out << YAML::EndMap;
  };
  mix("behavior", c.behavior_p1, c.behavior_p2);
  mix("target", c.target_p1, c.target_p2);
  out << YAML::EndMap;

  out << YAML::Key << "classes" << YAML::Value << YAML::BeginMap;
  for (const auto& [key, cls] : {std::pair{"p1", &c.class_p1}, std::pair{"p2", &c.class_p2}}) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
        << "kind" << YAML::Value << ClassKindName(cls->kind) << YAML::Key << "anchor"
        << YAML::Value << cls->anchor << YAML::Key << "per_state" << YAML::Value
        << cls->per_state << YAML::EndMap;
  }
  out << YAML::EndMap;

  const auto& e = c.experiment;
  out << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value
      << (e.kind == ExperimentSection::Kind::kOpe         ? "ope"
          : e.kind == ExperimentSection::Kind::kSelection ? "selection"
                                                          : "soccer");
  out << YAML::Key << "methods" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Method m : e.methods) out << std::string(MethodName(m));
  out << YAML::EndSeq;
  out << YAML::Key << "n" << YAML::Value << YAML::Flow << e.n;
  out << YAML::Key << "trials" << YAML::Value << e.trials;
  out << YAML::Key << "folds" << YAML::Value << e.folds;
  out << YAML::Key << "seed" << YAML::Value << e.seed;
  out << YAML::Key << "budget" << YAML::Value << e.budget;
  out << YAML::Key << "num_games" << YAML::Value << e.num_games;
  out << YAML::EndMap;

  const auto& o = c.nuisance;
  out << YAML::Key << "nuisance" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "transition_smoothing" << YAML::Value << o.transition_smoothing;
  out << YAML::Key << "behavior_smoothing" << YAML::Value << o.behavior_smoothing;
  out << YAML::Key << "histogram_smoothing" << YAML::Value << o.histogram_smoothing;
  out << YAML::Key << "q_method" << YAML::Value
      << (o.q_method == NuisanceOptions::QMethod::kModel ? "model" : "td");
  out << YAML::Key << "td_learning_rate" << YAML::Value << o.td_learning_rate;
  out << YAML::Key << "td_sweeps" << YAML::Value << o.td_sweeps;
  out << YAML::Key << "mu_denominator" << YAML::Value
      << (o.mu_denominator == NuisanceOptions::MuDenominator::kHistogram ? "histogram"
                                                                          : "model");
  if (c.auto_clip) {
    out << YAML::Key << "clip_base" << YAML::Value << "auto";
  } else {
    out << YAML::Key << "clip_base" << YAML::Value << o.clip_base;
  }
  out << YAML::Key << "known_behavior" << YAML::Value << o.use_known_behavior;
  out << YAML::EndMap;

  const auto& p = c.optimizer;
  out << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "grid_points" << YAML::Value << p.grid_points;
  out << YAML::Key << "golden_tolerance" << YAML::Value << p.golden_tolerance;
  out << YAML::Key << "coordinate_sweeps" << YAML::Value << p.coordinate_sweeps;
  out << YAML::Key << "restarts" << YAML::Value << p.restarts;
  out << YAML::Key << "max_ascent_sweeps" << YAML::Value << p.max_ascent_sweeps;
  out << YAML::Key << "minimax_sweeps" << YAML::Value << p.minimax_sweeps;
  out << YAML::Key << "saddle_grid_points" << YAML::Value << p.saddle_grid_points;
  out << YAML::Key << "saddle_refine" << YAML::Value << p.saddle_refine;
  out << YAML::Key << "seed" << YAML::Value << p.seed;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "csv" << YAML::Value << c.output.csv;
  out << YAML::Key << "trials" << YAML::Value << c.output.trials;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string DumpProfile(const PolicyProfile& profile) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "p1" << YAML::Value;
  EmitPolicy(out, profile.p1);
  out << YAML::Key << "p2" << YAML::Value;
  EmitPolicy(out, profile.p2);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

PolicyProfile ParseProfile(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    Fail(ErrorCode::kConfigError, std::string("invalid YAML: ") + e.what());
  }
  CheckKeys(root, "profile", {"p1", "p2"});
  if (!root["p1"] || !root["p2"]) Bad("profile", "needs p1 and p2");
  return PolicyProfile(ParsePolicy(root["p1"], Player::kP1, "profile.p1"),
                       ParsePolicy(root["p2"], Player::kP2, "profile.p2"));
}

void WriteProfile(const PolicyProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  out << DumpProfile(profile);
  if (!out) Fail(ErrorCode::kIoError, "write failed: " + path);
}

PolicyProfile ReadProfile(const std::string& path) {
  return ParseProfile(ReadFile(path, ErrorCode::kIoError));
}

}  // namespace mgope
