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


// chunkroute command-line tool: corpus generation, training, evaluation,
// lambda sweeps, one-off routing and the HTTP gateway.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chunkroute/corpus.h"
#include "chunkroute/errors.h"
#include "chunkroute/experiment.h"
#include "chunkroute/gateway.h"
#include "chunkroute/pii.h"
#include "chunkroute/policy.h"
#include "chunkroute/training.h"

namespace fs = std::filesystem;
using namespace chunkroute;

namespace {

constexpr const char* kSftCheckpoint = "sft_checkpoint.json";
constexpr const char* kPpoCheckpoint = "ppo_checkpoint.json";

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

struct Loaded {
  ExperimentConfig cfg;
  std::unique_ptr<EmbeddingProvider> embedder;
  std::vector<PreparedQuery> train;
  std::vector<PreparedQuery> test;
};

Loaded LoadExperiment(const std::string& config_path) {
  Loaded l;
  l.cfg = config_path.empty() ? ExperimentConfig{}
                              : ExperimentConfig::LoadFile(config_path);
  l.cfg.Validate();
  const CorpusSplit split = LoadOrGenerateCorpus(l.cfg.corpus);
  l.embedder = MakeEmbedder(l.cfg);
  l.train = PrepareQueries(split.train, *l.embedder);
  l.test = PrepareQueries(split.test, *l.embedder);
  std::fprintf(stderr, "corpus: %zu train / %zu test queries\n",
               l.train.size(), l.test.size());
  fs::create_directories(l.cfg.output_dir);
  WriteText(l.cfg.output_dir / "config.json", l.cfg.ToJson() + "\n");
  return l;
}

Agent LoadAgentFor(const Loaded& l, const fs::path& checkpoint) {
  Agent agent = LoadCheckpoint(checkpoint);
  if (agent.policy.config().d != l.embedder->dim()) {
    throw ConfigError("checkpoint width " +
                      std::to_string(agent.policy.config().d) +
                      " does not match the embedding width " +
                      std::to_string(l.embedder->dim()));
  }
  return agent;
}

fs::path OrDefault(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void PrintProgress(const PpoStepStats& s) {
  if (s.step == 1 || s.step % 16 == 0) {
    std::fprintf(stderr,
                 "ppo step %4d  reward %.4f  leak %.4f  entropy %.4f  "
                 "value_loss %.4f  clip %.3f\n",
                 s.step, s.mean_reward, s.mean_leak, s.entropy, s.value_loss,
                 s.clip_fraction);
  }
}

SftReport RunSft(Agent& agent, const Loaded& l) {
  const SftReport r = SftWarmup(agent, l.train, l.cfg.train);
  std::fprintf(stderr, "sft: %d steps, loss %.5f, label accuracy %.4f\n",
               r.optimizer_steps, r.final_loss, r.accuracy);
  return r;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

GatewayServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-aware chunk routing between a local and a remote model"};
  app.require_subcommand(1);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  std::uint64_t gen_seed = 7;
  std::size_t gen_n = 625;
  std::string gen_profile = "medical";
  double gen_test_fraction = 0.2;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--n", gen_n, "Number of queries")->capture_default_str();
  gen->add_option("--profile", gen_profile,
                  "medical | dependency-heavy | high-risk | pii-only")
      ->capture_default_str();
  gen->add_option("--test-fraction", gen_test_fraction, "Held-out share")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output JSONL path")->required();

  // shared options
  std::string config_path;
  std::string checkpoint;
  std::string out_path;

  auto* sft = app.add_subcommand("train-sft", "Supervised warm-up");
  sft->add_option("--config", config_path, "Experiment config JSON");
  sft->add_option("--out", out_path, "Checkpoint path");

  auto* ppo = app.add_subcommand("train-ppo", "PPO fine-tuning");
  std::string seeds_text;
  ppo->add_option("--config", config_path, "Experiment config JSON");
  ppo->add_option("--checkpoint", checkpoint,
                  "Warm-up checkpoint (warm-up runs first when absent)");
  ppo->add_option("--out", out_path, "Checkpoint path");
  ppo->add_option("--seeds", seeds_text,
                  "Comma-separated seeds: train one agent per seed from "
                  "scratch and summarize their test metrics");

  auto* eval = app.add_subcommand("eval", "Evaluate a routing method");
  std::string method_name = "privacypad";
  eval->add_option("--config", config_path, "Experiment config JSON");
  eval->add_option("--method", method_name,
                   "always_local | always_remote | heuristic_sft | "
                   "privacypad | stateless | linear_penalty | oracle")
      ->capture_default_str();
  eval->add_option("--checkpoint", checkpoint, "Checkpoint for learned methods");
  eval->add_option("--out", out_path, "EvalReport JSON path");

  auto* sweep = app.add_subcommand("sweep-lambda", "Train and evaluate per lambda");
  std::string lambdas_text;
  sweep->add_option("--config", config_path, "Experiment config JSON");
  sweep->add_option("--checkpoint", checkpoint, "Shared warm-up checkpoint");
  sweep->add_option("--lambdas", lambdas_text, "Comma-separated lambda values");
  sweep->add_option("--out", out_path, "Sweep CSV path");

  auto* route = app.add_subcommand("route", "Route one query");
  std::string route_text;
  std::string gateway_path;
  std::string rules_path;
  bool dry_run = false;
  route->add_option("--text", route_text, "Query text")->required();
  route->add_option("--checkpoint", checkpoint, "Policy checkpoint");
  route->add_option("--gateway", gateway_path, "Gateway config JSON");
  route->add_option("--rules", rules_path, "Detector rule JSON");
  route->add_flag("--dry-run", dry_run, "Plan only; no endpoint calls");

  auto* serve = app.add_subcommand("serve", "Run the HTTP gateway");
  serve->add_option("--gateway", gateway_path, "Gateway config JSON")->required();
  std::optional<int> port_override;
  serve->add_option("--port", port_override, "Listen port override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto queries =
          GenerateCorpus(gen_seed, gen_n, GenerationProfile::Named(gen_profile));
      SaveCorpus(MakeSplit(queries, gen_test_fraction, gen_seed), gen_out);
      std::fprintf(stderr, "wrote %zu queries to %s\n", queries.size(),
                   gen_out.c_str());
      return 0;
    }

    if (*sft) {
      Loaded l = LoadExperiment(config_path);
      Agent agent(l.cfg.policy, l.cfg.train.seed);
      RunSft(agent, l);
      const fs::path path = OrDefault(out_path, l.cfg.output_dir / kSftCheckpoint);
      SaveCheckpoint(agent, path);
      std::fprintf(stderr, "checkpoint: %s\n", path.string().c_str());
      return 0;
    }

    if (*ppo) {
      Loaded l = LoadExperiment(config_path);
      if (!seeds_text.empty()) {
        std::string csv = "seed,quality_pct,leakage_pct,catastrophic_pct,mean_reward\n";
        const Method method = l.cfg.policy.variant == PolicyVariant::kMlp
                                  ? Method::kStateless
                                  : Method::kPrivacyPad;
        for (double s : ParseList(seeds_text)) {
          TrainConfig tc = l.cfg.train;
          tc.seed = static_cast<std::uint64_t>(s);
          Agent agent(l.cfg.policy, tc.seed);
          SftWarmup(agent, l.train, tc);
          const PpoReport rep = PpoFinetune(agent, l.train, l.cfg.world, tc);
          const fs::path dir = l.cfg.output_dir / ("seed_" + std::to_string(tc.seed));
          SaveCheckpoint(agent, dir / kPpoCheckpoint);
          WriteText(dir / "reward_curve.csv", rep.RewardCurveCsv());
          const EvalReport r =
              Evaluate(method, l.test, &agent, l.cfg.world, tc.reward);
          char row[160];
          std::snprintf(row, sizeof row, "%llu,%.4f,%.4f,%.4f,%.6f\n",
                        static_cast<unsigned long long>(tc.seed), r.quality_pct,
                        r.leakage_pct, r.catastrophic_pct, r.mean_reward);
          csv += row;
          std::fprintf(stderr, "seed %s", row);
        }
        WriteText(OrDefault(out_path, l.cfg.output_dir / "multi_seed.csv"), csv);
        return 0;
      }
      Agent agent;
      if (checkpoint.empty()) {
        agent = Agent(l.cfg.policy, l.cfg.train.seed);
        RunSft(agent, l);
        SaveCheckpoint(agent, l.cfg.output_dir / kSftCheckpoint);
      } else {
        agent = LoadAgentFor(l, checkpoint);
      }
      const auto start = std::chrono::steady_clock::now();
      const PpoReport rep =
          PpoFinetune(agent, l.train, l.cfg.world, l.cfg.train, PrintProgress);
      std::fprintf(stderr,
                   "ppo: %d rollout iterations, %lld optimizer steps, %.1fs\n",
                   rep.rollout_iterations,
                   static_cast<long long>(rep.optimizer_steps),
                   std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start).count());
      const fs::path path = OrDefault(out_path, l.cfg.output_dir / kPpoCheckpoint);
      SaveCheckpoint(agent, path);
      WriteText(l.cfg.output_dir / "reward_curve.csv", rep.RewardCurveCsv());
      std::fprintf(stderr, "checkpoint: %s\n", path.string().c_str());
      return 0;
    }

    if (*eval) {
      Loaded l = LoadExperiment(config_path);
      EvalReport report;
      if (method_name == "oracle") {
        report = EvaluateOracle(l.test, l.cfg.world, l.cfg.train.reward);
      } else {
        const Method method = ParseMethod(method_name);
        std::optional<Agent> agent;
        if (IsLearned(method)) {
          if (checkpoint.empty()) {
            throw ConfigError("method " + method_name + " needs --checkpoint");
          }
          agent = LoadAgentFor(l, checkpoint);
        }
        report = Evaluate(method, l.test, agent ? &*agent : nullptr,
                          l.cfg.world, l.cfg.train.reward);
      }
      const fs::path path =
          OrDefault(out_path, l.cfg.output_dir / ("eval_" + method_name + ".json"));
      WriteText(path, report.ToJson() + "\n");
      std::printf("%s quality %.2f%% leakage %.2f%% catastrophic %.2f%% "
                  "reward %.4f\n",
                  report.method.c_str(), report.quality_pct, report.leakage_pct,
                  report.catastrophic_pct, report.mean_reward);
      return 0;
    }

    if (*sweep) {
      Loaded l = LoadExperiment(config_path);
      const std::vector<double> lambdas =
          lambdas_text.empty() ? l.cfg.lambdas : ParseList(lambdas_text);
      Agent warm;
      if (checkpoint.empty()) {
        warm = Agent(l.cfg.policy, l.cfg.train.seed);
        RunSft(warm, l);
        SaveCheckpoint(warm, l.cfg.output_dir / kSftCheckpoint);
      } else {
        warm = LoadAgentFor(l, checkpoint);
      }
      const auto rows = SweepLambda(lambdas, warm, l.train, l.test, l.cfg.world,
                                    l.cfg.train, PrintProgress);
      const std::string csv = SweepCsv(rows);
      WriteText(OrDefault(out_path, l.cfg.output_dir / "lambda_sweep.csv"), csv);
      std::cout << csv;
      return 0;
    }

    if (*route) {
      GatewayConfig gw;
      if (!gateway_path.empty()) {
        gw = GatewayConfig::LoadFile(gateway_path);
      } else if (!dry_run) {
        throw ConfigError("route without --dry-run needs --gateway");
      }
      if (!checkpoint.empty()) gw.checkpoint = checkpoint;
      if (!rules_path.empty()) gw.detector_rules = rules_path;
      if (gw.checkpoint.empty()) throw ConfigError("no policy checkpoint given");
      if (!dry_run) gw.Validate();
      DetectorRuleSet rules = gw.detector_rules.empty()
                                  ? DetectorRuleSet::Default()
                                  : DetectorRuleSet::LoadFile(gw.detector_rules);
      Agent agent = LoadCheckpoint(gw.checkpoint);
      std::shared_ptr<Transport> transport;
      if (!dry_run) transport = MakeHttpTransport();
      const Router router(std::move(agent), std::move(rules), gw, transport);
      std::cout << router.Route(route_text, dry_run).ToJson() << "\n";
      return 0;
    }

    if (*serve) {
      GatewayConfig gw = GatewayConfig::LoadFile(gateway_path);
      if (port_override) gw.port = *port_override;
      gw.Validate();
      if (gw.checkpoint.empty()) throw ConfigError("gateway config has no checkpoint");
      DetectorRuleSet rules = gw.detector_rules.empty()
                                  ? DetectorRuleSet::Default()
                                  : DetectorRuleSet::LoadFile(gw.detector_rules);
      auto router = std::make_shared<const Router>(
          LoadCheckpoint(gw.checkpoint), std::move(rules), gw,
          std::shared_ptr<Transport>(MakeHttpTransport()));
      GatewayServer server(router);
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::fprintf(stderr, "listening on %s:%d\n", gw.host.c_str(), gw.port);
      server.Run(gw.host, gw.port);
      g_server = nullptr;
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
