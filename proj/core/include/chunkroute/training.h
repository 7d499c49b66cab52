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


#ifndef CHUNKROUTE_TRAINING_H_
#define CHUNKROUTE_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/embedding.h"
#include "chunkroute/env.h"
#include "chunkroute/policy.h"
#include "chunkroute/query.h"

namespace chunkroute {

struct SftConfig {
  int epochs = 1;
  // Queries per optimizer step.
  std::size_t batch = 32;
  double lr = 3e-4;
};

struct PpoConfig {
  double lr = 1e-5;
  // Queries per rollout.
  std::size_t batch = 64;
  // Rollout iterations.
  int max_steps = 256;
  double clip_eps = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int ppo_epochs = 4;
  // Global gradient-norm clip for both networks; <= 0 disables.
  double max_grad_norm = 0.0;
};

struct TrainConfig {
  SftConfig sft;
  PpoConfig ppo;
  RewardConfig reward;
  std::uint64_t seed = 7;
  // Rollout worker threads. Results do not depend on this value.
  std::size_t workers = 1;

  void Validate() const;
};

// A query ready for training or evaluation.
struct PreparedQuery {
  Episode episode;
  EmbeddedQuery embedded;
  // Warm-up labels: 0 (LOCAL) for chunks with PII, else 1.
  std::vector<double> labels;
};

std::vector<PreparedQuery> PrepareQueries(std::span<const AnnotatedQuery> data,
                                          const EmbeddingProvider& provider);

// Risk-averse heuristic label per chunk.
std::vector<double> HeuristicLabels(std::span<const Chunk> chunks);

// ---------------------------------------------------------------------------
// Phase 1

// Sum over chunks of BCE(p_remote, label), averaged over the queries of the
// batch. `bound` holds the policy parameters bound on `tape`.
nn::Var SftLoss(nn::Tape& tape, const PolicyNetwork& policy,
                std::span<const PreparedQuery* const> batch,
                std::span<const nn::Var> bound);

struct SftReport {
  int optimizer_steps = 0;
  double final_loss = 0.0;
  // Greedy action vs label agreement over all training chunks.
  double accuracy = 0.0;
};

// Throws EmptyInputError on an empty corpus.
SftReport SftWarmup(Agent& agent, std::span<const PreparedQuery> corpus,
                    const TrainConfig& config);

double LabelAccuracy(const Agent& agent, std::span<const PreparedQuery> corpus);

// ---------------------------------------------------------------------------
// Phase 2

// Flattened per-chunk trajectories of one rollout batch.
struct RolloutBatch {
  PolicyBatch input;
  std::vector<std::size_t> actions;
  std::vector<double> old_log_probs;
  std::vector<double> values;
  // Episode reward R, repeated for every chunk of the episode.
  std::vector<double> returns;
  // R - V before normalization.
  std::vector<double> raw_advantages;
  std::vector<double> advantages;
  std::vector<double> episode_rewards;
  std::vector<double> episode_leaks;
};

// Normalizes to mean 0 and unit (population) variance when there is more
// than one value and the spread is non-zero; otherwise only centers.
std::vector<double> NormalizeAdvantages(std::span<const double> raw);

// L^CLIP term for one chunk: min(r A, clip(r, 1 - eps, 1 + eps) A).
double ClippedSurrogate(double ratio, double advantage, double clip_eps);

struct PpoLossTerms {
  nn::Var loss;
  // Means over chunks.
  nn::Var clip_objective;
  nn::Var value_loss;
  nn::Var entropy;
  nn::Var ratio;
};

// -mean(L^CLIP) + c1 mean((V - R)^2) - c2 mean(entropy). Advantages and
// returns enter as constants.
PpoLossTerms PpoLoss(nn::Tape& tape, const Agent& agent,
                     const RolloutBatch& batch, const PpoConfig& config,
                     std::span<const nn::Var> actor_bound,
                     std::span<const nn::Var> critic_bound);

// Samples one rollout batch. `step` and the query indices select the
// per-query seeds, so worker count never changes the result.
RolloutBatch CollectRollouts(const Agent& agent,
                             std::span<const PreparedQuery> corpus,
                             std::span<const std::size_t> indices,
                             std::uint64_t seed, int step, const SimWorld& world,
                             const RewardConfig& reward, std::size_t workers);

struct PpoStepStats {
  int step = 0;
  double mean_reward = 0.0;
  double mean_leak = 0.0;
  // max |r_t - 1| on the first optimization pass.
  double first_pass_ratio_dev = 0.0;
  double clip_fraction = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
};

struct PpoReport {
  std::vector<PpoStepStats> steps;
  int rollout_iterations = 0;
  std::int64_t optimizer_steps = 0;

  // (step, mean_reward) as CSV with a header line.
  std::string RewardCurveCsv() const;
};

using PpoProgress = std::function<void(const PpoStepStats&)>;

// Throws NumericsError (with step and ratio statistics) on a non-finite loss.
PpoReport PpoFinetune(Agent& agent, std::span<const PreparedQuery> corpus,
                      const SimWorld& world, const TrainConfig& config,
                      const PpoProgress& progress = {});

// ---------------------------------------------------------------------------
// Evaluation

enum class Method {
  kAlwaysLocal,
  kAlwaysRemote,
  kHeuristicSft,
  kPrivacyPad,
  kStateless,
  kLinearPenalty,
};

std::string_view MethodName(Method m);
Method ParseMethod(std::string_view name);
bool IsLearned(Method m);

struct QueryOutcome {
  std::string id;
  std::string actions;  // one character per chunk: L or R
  int task_gain = 0;
  double leak = 0.0;
  bool no_pii = false;
  double reward = 0.0;
};

struct EvalReport {
  std::string method;
  double quality_pct = 0.0;
  // Mean leak over queries that have PII.
  double leakage_pct = 0.0;
  // Share of PII-bearing queries leaking more than 80%.
  double catastrophic_pct = 0.0;
  double mean_reward = 0.0;
  std::size_t queries = 0;
  std::size_t pii_queries = 0;
  std::vector<QueryOutcome> per_query;

  std::string ToJson() const;
};

// Greedy evaluation. Learned methods require `agent`; a null agent throws
// ConfigError.
EvalReport Evaluate(Method method, std::span<const PreparedQuery> test,
                    const Agent* agent, const SimWorld& world,
                    const RewardConfig& reward);

// Evaluates arbitrary per-query plans under the same harness.
EvalReport EvaluatePlans(std::string method,
                         std::span<const PreparedQuery> test,
                         std::span<const std::vector<Action>> plans,
                         const SimWorld& world, const RewardConfig& reward);

// Per-query brute-force optimum over `test`.
EvalReport EvaluateOracle(std::span<const PreparedQuery> test,
                          const SimWorld& world, const RewardConfig& reward);

struct SweepRow {
  double lambda = 0.0;
  double quality_pct = 0.0;
  double leakage_pct = 0.0;
  double catastrophic_pct = 0.0;
  double mean_reward = 0.0;
};

// Trains one agent per lambda from the same warm-started agent and seed and
// evaluates it greedily on `test`. Rows are sorted by lambda. Throws
// ConfigError with fewer than two lambdas.
std::vector<SweepRow> SweepLambda(std::span<const double> lambdas,
                                  const Agent& warm_start,
                                  std::span<const PreparedQuery> train,
                                  std::span<const PreparedQuery> test,
                                  const SimWorld& world,
                                  const TrainConfig& config,
                                  const PpoProgress& progress = {});

std::string SweepCsv(std::span<const SweepRow> rows);

}  // namespace chunkroute

#endif  // CHUNKROUTE_TRAINING_H_
