// Copyright 2026 The chunkroute Authors
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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chunkroute/corpus.h"
#include "chunkroute/env.h"
#include "chunkroute/experiment.h"
#include "chunkroute/gateway.h"
#include "chunkroute/grad_check.h"
#include "chunkroute/pii.h"
#include "chunkroute/training.h"
#include "fake_model.h"
#include "json.hpp"
#include "op_cases.h"
#include "test_util.h"

namespace chunkroute {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Pinned thresholds.
constexpr double kRewardTol = 1e-12;
constexpr double kObjectiveGradTol = 1e-4;
constexpr double kOracleFraction = 0.9;
constexpr std::size_t kMaxChunks = 12;
constexpr double kInversionSlackPct = 1.0;
constexpr int kMaxInversions = 1;
constexpr double kSweepSpreadPct = 5.0;
constexpr double kQualityMarginPct = 5.0;
constexpr double kMinDependencyRate = 0.4;
constexpr double kMinSftAccuracy = 0.95;
constexpr double kMaxSftLeakagePct = 5.0;
constexpr double kCurveTol = 1e-9;
// Linear-penalty weight matched to the quadratic one at a 20% leak.
constexpr double kLinearLambdaScale = 0.2;

// Runtime budgets in seconds.
constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 120.0;
constexpr double kBudget3 = 30 * 60.0;
constexpr double kBudget4 = 3 * 3600.0;
constexpr double kBudget5 = 3600.0;
constexpr double kBudget6 = 3600.0;
constexpr double kBudget9 = 60.0;

const std::vector<double> kSweepLambdas = {1.0, 2.0, 5.0, 10.0, 20.0};
constexpr double kDefaultLambda = 5.0;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Sci(double v) {
  std::ostringstream out;
  out.setf(std::ios::scientific);
  out.precision(2);
  out << v;
  return out.str();
}

std::string Fmt(double v, int precision = 3) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Harness {
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  std::map<int, Outcome> results;

  void Save(const std::string& name, const std::string& text) const {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / name, std::ios::binary) << text;
  }
};

void Log(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

PpoProgress Progress(const std::string& tag) {
  return [tag](const PpoStepStats& s) {
    if (s.step % 32 == 0) {
      Log(tag + " step " + std::to_string(s.step) + " reward " +
          Fmt(s.mean_reward) + " entropy " + Fmt(s.entropy));
    }
  };
}

// A world: corpus split prepared at the default width, plus its world model.
struct World {
  std::vector<PreparedQuery> train, test;
  SimWorld sim;
  std::size_t max_chunks = 0;
  double dependency_rate = 0.0;
};

World MakeWorld(const std::string& profile) {
  CorpusSource src;
  src.profile = profile;
  const CorpusSplit split = LoadOrGenerateCorpus(src);
  const HashingEmbedder embedder(kDefaultEmbeddingDim);
  World w;
  w.train = PrepareQueries(split.train, embedder);
  w.test = PrepareQueries(split.test, embedder);
  double deps = 0;
  for (const auto* part : {&split.train, &split.test}) {
    for (const auto& q : *part) deps += !q.sim.dependencies.empty();
  }
  w.dependency_rate = deps / static_cast<double>(split.train.size() + split.test.size());
  for (const auto* part : {&w.train, &w.test}) {
    for (const auto& q : *part) w.max_chunks = std::max(w.max_chunks, q.episode.n());
  }
  return w;
}

// Overrides the rollout iteration count; only for checking the plumbing.
int g_smoke_steps = 0;

TrainConfig BaseTrain(std::size_t workers, double lambda = kDefaultLambda,
                      PenaltyMode mode = PenaltyMode::kQuadratic) {
  TrainConfig c;
  c.workers = workers;
  if (g_smoke_steps > 0) c.ppo.max_steps = g_smoke_steps;
  c.reward = {lambda, mode};
  return c;
}

Agent Warm(const World& w, PolicyVariant variant, const TrainConfig& c,
           SftReport* report = nullptr) {
  PolicyConfig pc;
  pc.variant = variant;
  Agent agent(pc, c.seed);
  const SftReport r = SftWarmup(agent, w.train, c);
  if (report) *report = r;
  return agent;
}

Agent Finetune(const Agent& warm, const World& w, const TrainConfig& c,
               const std::string& tag, PpoReport* report = nullptr) {
  Agent agent = warm;
  const PpoReport r = PpoFinetune(agent, w.train, w.sim, c, Progress(tag));
  if (report) *report = r;
  return agent;
}

// ---------------------------------------------------------------------------

Outcome MetricExactness() {
  const json data = json::parse(testing::ReadFile(testing::DataPath("leakage_cases.json")));
  std::size_t cases = 0, bad_leak = 0, bad_reward = 0;
  double worst = 0.0;
  for (const json& c : data.at("cases")) {
    ++cases;
    std::vector<PiiUnit> pii;
    for (const json& s : c.at("pii")) {
      pii.push_back({"u" + std::to_string(pii.size()), s.get<std::string>(),
                     PiiCategory::kPersonName, false, {}});
    }
    const auto chunks = c.at("chunks").get<std::vector<std::string>>();
    const std::string plan = c.at("plan");
    std::vector<std::string> prompts;
    for (std::size_t t = 0; t < chunks.size(); ++t) {
      if (plan[t] == '1') prompts.push_back(chunks[t]);
    }
    const LeakageReport r = ComputeLeakage(pii, prompts);
    const std::size_t leaked = c.at("leaked");
    const std::size_t total = c.at("total");
    const double expected =
        total == 0 ? 0.0 : static_cast<double>(leaked) / static_cast<double>(total);
    if (r.matched_pii.size() != leaked || r.fraction != expected ||
        r.no_pii != c.at("no_pii").get<bool>()) {
      ++bad_leak;
    }
    const int gain = c.at("task_gain");
    for (const auto& [lam, rewards] : c.at("rewards").items()) {
      const double err = std::abs(
          ComputeReward(gain, r.fraction, {std::stod(lam), PenaltyMode::kQuadratic}) -
          rewards.at("quadratic").get<double>());
      worst = std::max(worst, err);
      if (err > kRewardTol) ++bad_reward;
    }
  }
  return {cases == 50 && bad_leak == 0 && bad_reward == 0,
          std::to_string(cases) + " cases, " + std::to_string(bad_leak) +
              " leakage mismatches, max reward error " + Sci(worst)};
}

// Tiny nets keep finite differences cheap; the objectives are the same code.
PolicyConfig GradPolicy(PolicyVariant v) {
  PolicyConfig c;
  c.variant = v;
  c.d = 16;
  c.heads = 2;
  c.ff_mult = 2;
  return c;
}

Outcome GradientCorrectness() {
  std::size_t ops = 0, failed = 0;
  std::string worst_op;
  double worst_ratio = 0.0;
  for (const auto& c : nn::testing::AllOps()) {
    Rng rng(42);
    nn::ParameterSet inputs = c.make(rng);
    const auto r = nn::testing::CheckOp(c.op, inputs);
    const double tol = c.linear ? nn::testing::kLinearTol : nn::testing::kNonlinearTol;
    ++ops;
    if (!(r.max_rel_error < tol)) ++failed;
    if (r.max_rel_error / tol > worst_ratio) {
      worst_ratio = r.max_rel_error / tol;
      worst_op = c.name;
    }
  }

  const HashingEmbedder embedder(16);
  const auto corpus =
      PrepareQueries(GenerateCorpus(9, 2, GenerationProfile{}), embedder);
  double objective_err = 0.0;
  nn::GradCheckOptions opts;
  opts.max_coords_per_tensor = 24;
  for (PolicyVariant v : {PolicyVariant::kTransformer, PolicyVariant::kMlp}) {
    Agent agent(GradPolicy(v), 4);
    const PreparedQuery* batch[] = {&corpus[0], &corpus[1]};
    nn::ScalarFn sft = [&](nn::Tape& tape, std::span<const nn::Var> p) {
      return SftLoss(tape, agent.policy, batch, p);
    };
    objective_err =
        std::max(objective_err, nn::GradCheck(sft, agent.policy.params(), opts).max_rel_error);

    const std::size_t idx[] = {0, 1};
    const RolloutBatch rb =
        CollectRollouts(agent, corpus, idx, 1, 0, SimWorld{}, RewardConfig{}, 1);
    Rng rng(8);
    for (std::size_t i = 0; i < agent.policy.params().size(); ++i) {
      for (double& x : agent.policy.params()[i].values()) x += rng.Normal(0, 0.05);
    }
    PpoConfig pc;
    // The critic reads a detached state; its term carries no actor gradient.
    PpoConfig actor_pc = pc;
    actor_pc.value_coef = 0.0;
    nn::ScalarFn actor = [&](nn::Tape& tape, std::span<const nn::Var> p) {
      const auto critic = tape.Bind(agent.critic.params(), nullptr);
      return PpoLoss(tape, agent, rb, actor_pc, p, critic).loss;
    };
    nn::ScalarFn critic = [&](nn::Tape& tape, std::span<const nn::Var> p) {
      const auto a = tape.Bind(agent.policy.params(), nullptr);
      return PpoLoss(tape, agent, rb, pc, a, p).loss;
    };
    objective_err = std::max(
        objective_err, nn::GradCheck(actor, agent.policy.params(), opts).max_rel_error);
    objective_err = std::max(
        objective_err, nn::GradCheck(critic, agent.critic.params(), opts).max_rel_error);
  }
  return {failed == 0 && objective_err < kObjectiveGradTol,
          std::to_string(ops - failed) + "/" + std::to_string(ops) +
              " ops pass (worst " + worst_op + " at " + Fmt(worst_ratio, 3) +
              "x tol); objectives max rel err " + Sci(objective_err)};
}

// Shared state for the default-world criteria.
struct DefaultRun {
  World world;
  SftReport sft_report;
  std::optional<Agent> sft;
  std::map<double, Agent> ppo;
  std::map<double, EvalReport> ppo_eval;
  double sft_seconds = 0.0;
};

void EnsureSft(DefaultRun& run, const Harness& h) {
  if (run.sft) return;
  const auto start = Clock::now();
  Log("generating default world and running warm-up");
  run.world = MakeWorld("medical");
  run.sft = Warm(run.world, PolicyVariant::kTransformer, BaseTrain(h.workers),
                 &run.sft_report);
  run.sft_seconds = Seconds(start);
}

const EvalReport& EnsurePpo(DefaultRun& run, Harness& h, double lambda) {
  EnsureSft(run, h);
  if (!run.ppo.count(lambda)) {
    const TrainConfig c = BaseTrain(h.workers, lambda);
    PpoReport report;
    Agent agent = Finetune(*run.sft, run.world, c, "lambda " + Fmt(lambda, 0), &report);
    h.Save("reward_curve_lambda_" + Fmt(lambda, 0) + ".csv", report.RewardCurveCsv());
    EvalReport eval = Evaluate(Method::kPrivacyPad, run.world.test, &agent,
                               run.world.sim, c.reward);
    h.Save("eval_privacypad_lambda_" + Fmt(lambda, 0) + ".json", eval.ToJson());
    Log("lambda " + Fmt(lambda, 0) + ": quality " + Fmt(eval.quality_pct, 1) +
        "% leakage " + Fmt(eval.leakage_pct, 1) + "% reward " + Fmt(eval.mean_reward));
    run.ppo.emplace(lambda, std::move(agent));
    run.ppo_eval.emplace(lambda, std::move(eval));
  }
  return run.ppo_eval.at(lambda);
}

// Charged for the warm-up too, even when another criterion ran it first.
Outcome OracleNearOptimality(DefaultRun& run, Harness& h) {
  const auto start = Clock::now();
  const double earlier_warmup = run.sft ? run.sft_seconds : 0.0;
  EnsureSft(run, h);
  const EvalReport& ppo = EnsurePpo(run, h, kDefaultLambda);
  const double seconds = Seconds(start) + earlier_warmup;
  const RewardConfig reward{kDefaultLambda, PenaltyMode::kQuadratic};
  const EvalReport oracle = EvaluateOracle(run.world.test, run.world.sim, reward);
  const EvalReport sft = Evaluate(Method::kHeuristicSft, run.world.test,
                                  &*run.sft, run.world.sim, reward);
  h.Save("eval_oracle.json", oracle.ToJson());
  h.Save("eval_heuristic_sft.json", sft.ToJson());
  const bool sizes = run.world.train.size() == 500 && run.world.test.size() == 125 &&
                     run.world.max_chunks <= kMaxChunks;
  const bool pass = sizes && seconds <= kBudget3 &&
                    ppo.mean_reward >= kOracleFraction * oracle.mean_reward &&
                    ppo.mean_reward > sft.mean_reward;
  return {pass, "with warm-up " + Fmt(seconds, 0) + " s (budget " + Fmt(kBudget3, 0) +
                    " s); PPO test reward " + Fmt(ppo.mean_reward) + " vs oracle " +
                    Fmt(oracle.mean_reward) + " (need >= " +
                    Fmt(kOracleFraction * oracle.mean_reward) + "), SFT " +
                    Fmt(sft.mean_reward) + "; split " +
                    std::to_string(run.world.train.size()) + "/" +
                    std::to_string(run.world.test.size()) + ", max chunks " +
                    std::to_string(run.world.max_chunks)};
}

Outcome LambdaMonotonicity(DefaultRun& run, Harness& h) {
  std::vector<SweepRow> rows;
  for (double lam : kSweepLambdas) {
    const EvalReport& e = EnsurePpo(run, h, lam);
    rows.push_back({lam, e.quality_pct, e.leakage_pct, e.catastrophic_pct, e.mean_reward});
  }
  h.Save("lambda_sweep.csv", SweepCsv(rows));
  int inversions = 0;
  bool big_inversion = false;
  std::string leaks;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    leaks += (i ? " " : "") + Fmt(rows[i].leakage_pct, 1);
    if (i == 0) continue;
    const double rise = rows[i].leakage_pct - rows[i - 1].leakage_pct;
    if (rise > 0) {
      ++inversions;
      if (rise > kInversionSlackPct) big_inversion = true;
    }
  }
  const double spread = rows.front().leakage_pct - rows.back().leakage_pct;
  const bool pass = !big_inversion && inversions <= kMaxInversions &&
                    spread >= kSweepSpreadPct;
  return {pass, "leakage % by lambda {1,2,5,10,20}: " + leaks + "; inversions " +
                    std::to_string(inversions) + ", spread " + Fmt(spread, 1) +
                    " pp (need >= " + Fmt(kSweepSpreadPct, 0) + ")"};
}

Outcome QuadraticSafety(Harness& h) {
  Log("generating high-risk world");
  const World w = MakeWorld("high-risk");
  const TrainConfig quad = BaseTrain(h.workers, kDefaultLambda, PenaltyMode::kQuadratic);
  const TrainConfig lin = BaseTrain(h.workers, kDefaultLambda * kLinearLambdaScale,
                                    PenaltyMode::kLinear);
  const Agent warm = Warm(w, PolicyVariant::kTransformer, quad);
  const Agent a_quad = Finetune(warm, w, quad, "high-risk quadratic");
  const Agent a_lin = Finetune(warm, w, lin, "high-risk linear");
  const EvalReport e_quad = Evaluate(Method::kPrivacyPad, w.test, &a_quad, w.sim, quad.reward);
  const EvalReport e_lin =
      Evaluate(Method::kLinearPenalty, w.test, &a_lin, w.sim, lin.reward);
  h.Save("eval_high_risk_quadratic.json", e_quad.ToJson());
  h.Save("eval_high_risk_linear.json", e_lin.ToJson());
  return {e_quad.catastrophic_pct < e_lin.catastrophic_pct,
          "catastrophic % quadratic " + Fmt(e_quad.catastrophic_pct, 1) + " vs linear " +
              Fmt(e_lin.catastrophic_pct, 1) + " (leakage " +
              Fmt(e_quad.leakage_pct, 1) + " vs " + Fmt(e_lin.leakage_pct, 1) + ")"};
}

Outcome StatefulVsStateless(Harness& h) {
  Log("generating dependency-heavy world");
  const World w = MakeWorld("dependency-heavy");
  const TrainConfig c = BaseTrain(h.workers);
  const Agent tf = Finetune(Warm(w, PolicyVariant::kTransformer, c), w, c,
                            "dependency-heavy transformer");
  const Agent mlp = Finetune(Warm(w, PolicyVariant::kMlp, c), w, c, "dependency-heavy mlp");
  const EvalReport e_tf = Evaluate(Method::kPrivacyPad, w.test, &tf, w.sim, c.reward);
  const EvalReport e_mlp = Evaluate(Method::kStateless, w.test, &mlp, w.sim, c.reward);
  h.Save("eval_dependency_transformer.json", e_tf.ToJson());
  h.Save("eval_dependency_mlp.json", e_mlp.ToJson());
  const bool pass = w.dependency_rate >= kMinDependencyRate &&
                    e_tf.quality_pct >= e_mlp.quality_pct + kQualityMarginPct &&
                    e_tf.leakage_pct <= e_mlp.leakage_pct;
  return {pass, "quality % transformer " + Fmt(e_tf.quality_pct, 1) + " vs mlp " +
                    Fmt(e_mlp.quality_pct, 1) + ", leakage " + Fmt(e_tf.leakage_pct, 1) +
                    " vs " + Fmt(e_mlp.leakage_pct, 1) + ", dependency rate " +
                    Fmt(w.dependency_rate, 2)};
}

Outcome WarmupFidelity(DefaultRun& run, Harness& h) {
  EnsureSft(run, h);
  const EvalReport sft = Evaluate(Method::kHeuristicSft, run.world.test, &*run.sft,
                                  run.world.sim, {kDefaultLambda, PenaltyMode::kQuadratic});
  return {run.sft_report.accuracy >= kMinSftAccuracy && sft.leakage_pct <= kMaxSftLeakagePct,
          "train label accuracy " + Fmt(100 * run.sft_report.accuracy, 2) +
              "%, SFT test leakage " + Fmt(sft.leakage_pct, 1) + "%"};
}

Outcome BaselineBounds(DefaultRun& run, Harness& h) {
  EnsureSft(run, h);
  const RewardConfig reward{kDefaultLambda, PenaltyMode::kQuadratic};
  const auto& w = run.world;
  const EvalReport local = Evaluate(Method::kAlwaysLocal, w.test, nullptr, w.sim, reward);
  const EvalReport remote = Evaluate(Method::kAlwaysRemote, w.test, nullptr, w.sim, reward);
  h.Save("eval_always_local.json", local.ToJson());
  h.Save("eval_always_remote.json", remote.ToJson());
  bool pass = local.leakage_pct == 0.0 && remote.leakage_pct == 100.0;
  std::vector<std::pair<std::string, double>> learned = {
      {"heuristic_sft",
       Evaluate(Method::kHeuristicSft, w.test, &*run.sft, w.sim, reward).leakage_pct}};
  for (const auto& [lam, e] : run.ppo_eval) {
    learned.push_back({"privacypad(lambda " + Fmt(lam, 0) + ")", e.leakage_pct});
  }
  std::string detail = "local " + Fmt(local.leakage_pct, 1) + "%, remote " +
                       Fmt(remote.leakage_pct, 1) + "%";
  for (const auto& [name, leak] : learned) {
    const bool inside = leak > 0.0 && leak < 100.0;
    pass &= inside;
    detail += ", " + name + " " + Fmt(leak, 1) + "%" + (inside ? "" : " (not strictly inside)");
  }
  return {pass, detail};
}

Outcome GatewayIsolation() {
  // A warm-started and an untrained agent: the second routes PII chunks
  // remote too, which exercises non-zero leakage.
  const std::size_t d = 32;
  PolicyConfig pc;
  pc.d = d;
  pc.heads = 2;
  pc.ff_mult = 2;
  const HashingEmbedder embedder(d);
  Agent warm(pc, 2);
  TrainConfig tc;
  tc.sft.epochs = 3;
  SftWarmup(warm, PrepareQueries(GenerateCorpus(11, 300, GenerationProfile{}), embedder), tc);
  const std::vector<Agent> agents = {warm, Agent(pc, 5)};

  const auto queries = GenerateCorpus(21, 15, GenerationProfile{});
  const DetectorRuleSet rules = DetectorRuleSet::Default();
  std::size_t requests = 0, isolation_violations = 0, leak_mismatches = 0,
              remote_prompts = 0;
  double max_leak = 0.0;
  for (const Agent& agent : agents) {
    testing::FakeModel local("local"), remote("remote");
    GatewayConfig gc;
    gc.local = {"local", local.url(), "small", "", 5000, 0};
    gc.remote = {"remote", remote.url(), "large", "", 5000, 0};
    auto router = std::make_shared<const Router>(agent, rules, gc, MakeHttpTransport());
    GatewayServer server(router);
    const int port = server.Start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    for (const auto& q : queries) {
      const std::size_t before = remote.bodies().size();
      auto res = client.Post("/v1/route", json{{"text", q.query.text}}.dump(),
                             "application/json");
      ++requests;
      if (!res || res->status != 200) {
        ++isolation_violations;
        continue;
      }
      const json out = json::parse(res->body);
      const auto bodies = remote.bodies();
      std::vector<std::string> prompts;
      std::string joined;
      for (std::size_t i = before; i < bodies.size(); ++i) {
        prompts.push_back(json::parse(bodies[i])["messages"][0]["content"]);
        joined += bodies[i];
      }
      remote_prompts += prompts.size();
      std::vector<std::string> remote_texts;
      for (const auto& c : out["chunks"]) {
        if (c["action"] == "REMOTE") remote_texts.push_back(c["text"]);
      }
      for (const auto& c : out["chunks"]) {
        if (c["action"] != "LOCAL") continue;
        for (const auto& det : out["detected_pii"]) {
          const std::string surface = det["surface"];
          if (c["text"].get<std::string>().find(surface) == std::string::npos) continue;
          bool shared = false;
          for (const auto& t : remote_texts) shared |= t.find(surface) != std::string::npos;
          if (!shared && joined.find(surface) != std::string::npos) ++isolation_violations;
        }
      }
      const auto units = DetectionsToUnits(Detect(q.query.text, rules));
      const double offline = ComputeLeakage(units, prompts).fraction;
      if (out["detected_pii_leakage"].get<double>() != offline) ++leak_mismatches;
      max_leak = std::max(max_leak, offline);
    }
    server.Stop();
  }
  return {isolation_violations == 0 && leak_mismatches == 0 && remote_prompts > 0,
          std::to_string(requests) + " routed requests, " + std::to_string(remote_prompts) +
              " remote prompts, " + std::to_string(isolation_violations) +
              " isolation violations, " + std::to_string(leak_mismatches) +
              " leakage mismatches (max served leakage " + Fmt(max_leak, 2) + ")"};
}

Outcome Determinism(DefaultRun& run, const Harness& h) {
  std::vector<std::string> failures;
  auto corpus = [] {
    return SerializeCorpus(MakeSplit(GenerateCorpus(7, 625, GenerationProfile::Named("medical")),
                                     0.2, 7));
  };
  if (corpus() != corpus()) failures.push_back("gen-corpus");

  EnsureSft(run, h);
  const Agent again = Warm(run.world, PolicyVariant::kTransformer, BaseTrain(1));
  if (SerializeCheckpoint(again) != SerializeCheckpoint(*run.sft)) failures.push_back("sft");

  const RewardConfig reward{kDefaultLambda, PenaltyMode::kQuadratic};
  if (Evaluate(Method::kHeuristicSft, run.world.test, &again, run.world.sim, reward).ToJson() !=
      Evaluate(Method::kHeuristicSft, run.world.test, &*run.sft, run.world.sim, reward)
          .ToJson()) {
    failures.push_back("eval");
  }

  TrainConfig c = BaseTrain(1);
  c.ppo.max_steps = 4;
  Agent a = *run.sft, b = *run.sft;
  const PpoReport ra = PpoFinetune(a, run.world.train, run.world.sim, c);
  const PpoReport rb = PpoFinetune(b, run.world.train, run.world.sim, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < ra.steps.size(); ++i) {
    worst = std::max(worst, std::abs(ra.steps[i].mean_reward - rb.steps[i].mean_reward));
  }
  if (ra.steps.size() != rb.steps.size() || worst > kCurveTol) failures.push_back("ppo curve");

  std::string detail = failures.empty() ? "corpus, SFT checkpoint and eval report byte-equal"
                                        : "mismatch in:";
  for (const auto& f : failures) detail += " " + f;
  detail += "; reward-curve max diff " + Sci(worst);
  return {failures.empty(), detail};
}

const char* kNames[] = {"",
                        "metric exactness",
                        "gradient correctness",
                        "oracle near-optimality",
                        "lambda monotonicity",
                        "quadratic-penalty safety",
                        "stateful vs stateless",
                        "warm-up fidelity",
                        "baseline bounds",
                        "gateway isolation",
                        "determinism"};

int Main(int argc, char** argv) {
  CLI::App app{"chunkroute acceptance run"};
  std::vector<int> only;
  Harness h;
  app.add_option("--only", only, "Criteria to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 10));
  app.add_option("--out", h.out_dir, "Directory for reports and curves");
  app.add_option("--workers", h.workers, "Rollout threads")->check(CLI::PositiveNumber);
  bool smoke = false;
  app.add_flag("--smoke", smoke, "Two PPO iterations per agent (plumbing check only)");
  CLI11_PARSE(app, argc, argv);
  if (smoke) g_smoke_steps = 2;
  std::set<int> selected(only.begin(), only.end());
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.insert(i);
  }

  DefaultRun run;
  int failed = 0;
  auto report = [&](int id, const Outcome& o, double seconds, double budget) {
    const bool in_budget = budget <= 0 || seconds <= budget;
    const bool pass = o.pass && in_budget;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " (" << kNames[id]
              << "): " << o.detail << " [" << Fmt(seconds, 1) << " s"
              << (budget > 0 ? ", budget " + Fmt(budget, 0) + " s" : "")
              << (in_budget ? "" : ", OVER BUDGET") << "]" << std::endl;
  };
  auto timed = [&](int id, double budget, const std::function<Outcome()>& fn) {
    if (!selected.count(id)) return;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    report(id, o, Seconds(start), budget);
  };

  timed(1, kBudget1, MetricExactness);
  timed(2, kBudget2, GradientCorrectness);
  timed(7, 0, [&] { return WarmupFidelity(run, h); });
  timed(3, 0, [&] { return OracleNearOptimality(run, h); });
  timed(4, kBudget4, [&] { return LambdaMonotonicity(run, h); });
  timed(8, 0, [&] { return BaselineBounds(run, h); });
  timed(10, 0, [&] { return Determinism(run, h); });
  timed(9, kBudget9, GatewayIsolation);
  timed(5, kBudget5, [&] { return QuadraticSafety(h); });
  timed(6, kBudget6, [&] { return StatefulVsStateless(h); });

  std::cout << (selected.size() - failed) << "/" << selected.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace chunkroute

int main(int argc, char** argv) { return chunkroute::Main(argc, argv); }
