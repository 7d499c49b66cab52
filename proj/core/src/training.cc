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


#include "chunkroute/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "chunkroute/adam.h"
#include "chunkroute/errors.h"
#include "chunkroute/ops.h"
#include "chunkroute/pii.h"
#include "chunkroute/rng.h"
#include "json.hpp"

namespace chunkroute {

using nn::Tensor;
using nn::Var;

namespace {

// Queries per network pass during rollouts and greedy evaluation. Fixed so
// that results never depend on the worker count.
constexpr std::size_t kRolloutShard = 16;
constexpr std::size_t kEvalShard = 64;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Tensor Column(std::span<const double> values) {
  return Tensor(values.size(), 1,
                std::vector<double>(values.begin(), values.end()));
}

std::vector<const EmbeddedQuery*> EmbeddedOf(
    std::span<const PreparedQuery* const> queries) {
  std::vector<const EmbeddedQuery*> out;
  out.reserve(queries.size());
  for (const PreparedQuery* q : queries) out.push_back(&q->embedded);
  return out;
}

// Greedy plans for every query, in shards.
std::vector<RoutingPlan> GreedyPlans(const Agent& agent,
                                     std::span<const PreparedQuery> corpus) {
  std::vector<RoutingPlan> plans;
  plans.reserve(corpus.size());
  for (std::size_t begin = 0; begin < corpus.size(); begin += kEvalShard) {
    const std::size_t end = std::min(corpus.size(), begin + kEvalShard);
    std::vector<const EmbeddedQuery*> shard;
    for (std::size_t i = begin; i < end; ++i) {
      shard.push_back(&corpus[i].embedded);
    }
    for (auto& p : agent.ActBatch(shard, ActMode::kGreedy, {})) {
      plans.push_back(std::move(p));
    }
  }
  return plans;
}

}  // namespace

void TrainConfig::Validate() const {
  if (sft.epochs < 0) throw ConfigError("sft.epochs must be >= 0");
  if (sft.batch == 0) throw ConfigError("sft.batch must be >= 1");
  if (!(sft.lr > 0.0)) throw ConfigError("sft.lr must be > 0");
  if (!(ppo.lr > 0.0)) throw ConfigError("ppo.lr must be > 0");
  if (ppo.batch == 0) throw ConfigError("ppo.batch must be >= 1");
  if (ppo.max_steps < 0) throw ConfigError("ppo.max_steps must be >= 0");
  if (!(ppo.clip_eps > 0.0)) throw ConfigError("ppo.clip_eps must be > 0");
  if (ppo.ppo_epochs < 1) throw ConfigError("ppo.ppo_epochs must be >= 1");
  if (!(ppo.value_coef >= 0.0) || !(ppo.entropy_coef >= 0.0)) {
    throw ConfigError("ppo coefficients must be >= 0");
  }
  if (workers == 0) throw ConfigError("workers must be >= 1");
  reward.Validate();
}

std::vector<double> HeuristicLabels(std::span<const Chunk> chunks) {
  std::vector<double> labels;
  labels.reserve(chunks.size());
  for (const Chunk& c : chunks) labels.push_back(c.has_pii() ? 0.0 : 1.0);
  return labels;
}

std::vector<PreparedQuery> PrepareQueries(std::span<const AnnotatedQuery> data,
                                          const EmbeddingProvider& provider) {
  std::vector<PreparedQuery> out;
  out.reserve(data.size());
  for (const AnnotatedQuery& aq : data) {
    PreparedQuery q;
    q.episode = Episode::Prepare(aq);
    q.embedded = Embed(q.episode.chunks, provider);
    q.labels = HeuristicLabels(q.episode.chunks);
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phase 1

Var SftLoss(nn::Tape& tape, const PolicyNetwork& policy,
            std::span<const PreparedQuery* const> batch,
            std::span<const Var> bound) {
  if (batch.empty()) throw EmptyInputError("sft loss: empty batch");
  const auto embedded = EmbeddedOf(batch);
  const PolicyBatch input = MakeBatch(policy.config(), embedded);
  std::vector<double> labels;
  for (const PreparedQuery* q : batch) {
    labels.insert(labels.end(), q->labels.begin(), q->labels.end());
  }
  const auto out = policy.Forward(tape, input, bound);
  Var p_remote = nn::SliceCols(nn::Softmax(out.logits), 1, 1);
  Var total = nn::BinaryCrossEntropy(p_remote, Column(labels),
                                     nn::Reduction::kSum);
  return nn::Scale(total, 1.0 / static_cast<double>(batch.size()));
}

double LabelAccuracy(const Agent& agent, std::span<const PreparedQuery> corpus) {
  const auto plans = GreedyPlans(agent, corpus);
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t t = 0; t < plans[i].size(); ++t) {
      const double predicted =
          plans[i].actions[t] == Action::kRemote ? 1.0 : 0.0;
      hits += predicted == corpus[i].labels[t] ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / total;
}

SftReport SftWarmup(Agent& agent, std::span<const PreparedQuery> corpus,
                    const TrainConfig& config) {
  config.Validate();
  if (corpus.empty()) throw EmptyInputError("sft warm-up: empty corpus");
  nn::ParameterSet& params = agent.policy.params();
  nn::Adam adam(params, {.lr = config.sft.lr});
  nn::Gradients grads = params.ZerosLike();
  SftReport report;
  std::vector<std::size_t> order(corpus.size());
  for (int epoch = 0; epoch < config.sft.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(SubSeed(config.seed, 0x5f7, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.Index(i)]);
    }
    for (std::size_t begin = 0; begin < order.size();
         begin += config.sft.batch) {
      const std::size_t end = std::min(order.size(), begin + config.sft.batch);
      std::vector<const PreparedQuery*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&corpus[order[i]]);
      nn::ZeroGradients(grads);
      nn::Tape tape;
      const auto bound = tape.Bind(params, &grads);
      Var loss = SftLoss(tape, agent.policy, batch, bound);
      tape.Backward(loss);
      adam.Step(params, grads);
      report.final_loss = loss.value().item();
      ++report.optimizer_steps;
    }
  }
  agent.sft_phase = true;
  report.accuracy = LabelAccuracy(agent, corpus);
  return report;
}

// ---------------------------------------------------------------------------
// Phase 2

std::vector<double> NormalizeAdvantages(std::span<const double> raw) {
  std::vector<double> out(raw.begin(), raw.end());
  if (out.empty()) return out;
  const double n = static_cast<double>(out.size());
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
  double var = 0.0;
  for (double& v : out) {
    v -= mean;
    var += v * v;
  }
  var /= n;
  if (out.size() > 1 && var > 1e-24) {
    const double inv = 1.0 / std::sqrt(var);
    for (double& v : out) v *= inv;
  }
  return out;
}

double ClippedSurrogate(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

PpoLossTerms PpoLoss(nn::Tape& tape, const Agent& agent,
                     const RolloutBatch& batch, const PpoConfig& config,
                     std::span<const Var> actor_bound,
                     std::span<const Var> critic_bound) {
  const auto out = agent.policy.Forward(tape, batch.input, actor_bound);
  Var log_probs = nn::LogSoftmax(out.logits);
  Var logp = nn::PickCols(log_probs, batch.actions);
  Var ratio =
      nn::Exp(nn::Sub(logp, tape.Constant(Column(batch.old_log_probs))));
  Var adv = tape.Constant(Column(batch.advantages));
  Var surr1 = nn::Mul(ratio, adv);
  Var surr2 = nn::Mul(
      nn::Clip(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps), adv);
  PpoLossTerms terms;
  terms.ratio = ratio;
  terms.clip_objective = nn::Mean(nn::Minimum(surr1, surr2));
  Var values = agent.critic.Forward(tape, out.state, critic_bound);
  terms.value_loss = nn::Mean(
      nn::Square(nn::Sub(values, tape.Constant(Column(batch.returns)))));
  Var plogp = nn::Mul(nn::Softmax(out.logits), log_probs);
  terms.entropy = nn::Scale(nn::Mean(nn::RowSum(plogp)), -1.0);
  terms.loss = nn::Add(
      nn::Add(nn::Scale(terms.clip_objective, -1.0),
              nn::Scale(terms.value_loss, config.value_coef)),
      nn::Scale(terms.entropy, -config.entropy_coef));
  return terms;
}

RolloutBatch CollectRollouts(const Agent& agent,
                             std::span<const PreparedQuery> corpus,
                             std::span<const std::size_t> indices,
                             std::uint64_t seed, int step, const SimWorld& world,
                             const RewardConfig& reward, std::size_t workers) {
  if (indices.empty()) throw EmptyInputError("rollout: empty batch");
  const std::size_t shards = (indices.size() + kRolloutShard - 1) / kRolloutShard;
  std::vector<std::vector<RoutingPlan>> shard_plans(shards);
  auto run_shard = [&](std::size_t s) {
    const std::size_t begin = s * kRolloutShard;
    const std::size_t end = std::min(indices.size(), begin + kRolloutShard);
    std::vector<const EmbeddedQuery*> embedded;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = begin; i < end; ++i) {
      embedded.push_back(&corpus[indices[i]].embedded);
      seeds.push_back(
          SubSeed(seed, static_cast<std::uint64_t>(step), indices[i]));
    }
    shard_plans[s] = agent.ActBatch(embedded, ActMode::kSample, seeds);
  };
  const std::size_t threads = std::min(workers, shards);
  if (threads <= 1) {
    for (std::size_t s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < shards; s += threads) run_shard(s);
      });
    }
    for (auto& th : pool) th.join();
  }

  RolloutBatch batch;
  std::vector<const EmbeddedQuery*> embedded;
  std::size_t qi = 0;
  for (const auto& plans : shard_plans) {
    for (const RoutingPlan& plan : plans) {
      const PreparedQuery& q = corpus[indices[qi++]];
      embedded.push_back(&q.embedded);
      const Score s = ScorePlan(q.episode, plan.actions, world, reward);
      batch.episode_rewards.push_back(s.reward);
      batch.episode_leaks.push_back(s.leak);
      for (std::size_t t = 0; t < plan.size(); ++t) {
        batch.actions.push_back(static_cast<std::size_t>(plan.actions[t]));
        batch.old_log_probs.push_back(plan.log_probs[t]);
        batch.values.push_back(plan.values[t]);
        batch.returns.push_back(s.reward);
        batch.raw_advantages.push_back(s.reward - plan.values[t]);
      }
    }
  }
  batch.input = MakeBatch(agent.policy.config(), embedded);
  batch.advantages = NormalizeAdvantages(batch.raw_advantages);
  return batch;
}

std::string PpoReport::RewardCurveCsv() const {
  std::string out = "step,mean_reward\n";
  for (const auto& s : steps) {
    out += std::to_string(s.step) + "," + FormatDouble(s.mean_reward) + "\n";
  }
  return out;
}

PpoReport PpoFinetune(Agent& agent, std::span<const PreparedQuery> corpus,
                      const SimWorld& world, const TrainConfig& config,
                      const PpoProgress& progress) {
  config.Validate();
  world.Validate();
  if (corpus.empty()) throw EmptyInputError("ppo: empty corpus");
  const PpoConfig& ppo = config.ppo;
  nn::ParameterSet& actor = agent.policy.params();
  nn::ParameterSet& critic = agent.critic.params();
  const nn::AdamOptions opts{.lr = ppo.lr, .max_grad_norm = ppo.max_grad_norm};
  nn::Adam actor_adam(actor, opts);
  nn::Adam critic_adam(critic, opts);
  nn::Gradients actor_grads = actor.ZerosLike();
  nn::Gradients critic_grads = critic.ZerosLike();

  // Batches walk through seeded permutations of the corpus.
  Rng order_rng(SubSeed(config.seed, 0x990));
  std::vector<std::size_t> order;
  std::size_t cursor = 0;
  auto next_index = [&] {
    if (cursor == order.size()) {
      order.resize(corpus.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[order_rng.Index(i)]);
      }
      cursor = 0;
    }
    return order[cursor++];
  };
  const std::size_t batch_size = std::min(ppo.batch, corpus.size());

  PpoReport report;
  for (int step = 1; step <= ppo.max_steps; ++step) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < batch_size; ++i) indices.push_back(next_index());
    const RolloutBatch batch =
        CollectRollouts(agent, corpus, indices, config.seed, step, world,
                        config.reward, config.workers);

    PpoStepStats stats;
    stats.step = step;
    stats.mean_reward =
        std::accumulate(batch.episode_rewards.begin(),
                        batch.episode_rewards.end(), 0.0) /
        static_cast<double>(batch.episode_rewards.size());
    stats.mean_leak = std::accumulate(batch.episode_leaks.begin(),
                                      batch.episode_leaks.end(), 0.0) /
                      static_cast<double>(batch.episode_leaks.size());

    for (int epoch = 0; epoch < ppo.ppo_epochs; ++epoch) {
      nn::ZeroGradients(actor_grads);
      nn::ZeroGradients(critic_grads);
      nn::Tape tape;
      const auto actor_bound = tape.Bind(actor, &actor_grads);
      const auto critic_bound = tape.Bind(critic, &critic_grads);
      PpoLossTerms terms;
      try {
        terms = PpoLoss(tape, agent, batch, ppo, actor_bound, critic_bound);
      } catch (const NumericsError& e) {
        throw NumericsError("ppo step " + std::to_string(step) + " epoch " +
                            std::to_string(epoch) + ": " + e.what());
      }
      const Tensor& ratio = terms.ratio.value();
      double rmin = ratio[0], rmax = ratio[0], rdev = 0.0;
      std::size_t clipped = 0;
      for (double r : ratio.values()) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        rdev = std::max(rdev, std::abs(r - 1.0));
        if (std::abs(r - 1.0) > ppo.clip_eps) ++clipped;
      }
      const double loss = terms.loss.value().item();
      if (!std::isfinite(loss)) {
        throw NumericsError("ppo step " + std::to_string(step) + " epoch " +
                            std::to_string(epoch) +
                            ": non-finite loss (ratio min " +
                            FormatDouble(rmin) + ", max " + FormatDouble(rmax) +
                            ")");
      }
      if (epoch == 0) {
        stats.first_pass_ratio_dev = rdev;
        stats.entropy = terms.entropy.value().item();
        stats.value_loss = terms.value_loss.value().item();
      }
      stats.clip_fraction =
          static_cast<double>(clipped) / static_cast<double>(ratio.size());
      tape.Backward(terms.loss);
      actor_adam.Step(actor, actor_grads);
      critic_adam.Step(critic, critic_grads);
    }
    report.steps.push_back(stats);
    report.rollout_iterations = step;
    report.optimizer_steps = actor_adam.steps();
    if (progress) progress(stats);
  }
  agent.sft_phase = false;
  Rng state_rng(SubSeed(config.seed, 0x57a7e,
                        static_cast<std::uint64_t>(report.rollout_iterations)));
  agent.rng_state = state_rng.State();
  return report;
}

// ---------------------------------------------------------------------------
// Evaluation

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kAlwaysLocal:
      return "always_local";
    case Method::kAlwaysRemote:
      return "always_remote";
    case Method::kHeuristicSft:
      return "heuristic_sft";
    case Method::kPrivacyPad:
      return "privacypad";
    case Method::kStateless:
      return "stateless";
    case Method::kLinearPenalty:
      return "linear_penalty";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kAlwaysLocal, Method::kAlwaysRemote,
                   Method::kHeuristicSft, Method::kPrivacyPad,
                   Method::kStateless, Method::kLinearPenalty}) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

bool IsLearned(Method m) {
  return m != Method::kAlwaysLocal && m != Method::kAlwaysRemote;
}

std::string EvalReport::ToJson() const {
  nlohmann::json j;
  j["method"] = method;
  j["quality_pct"] = quality_pct;
  j["leakage_pct"] = leakage_pct;
  j["catastrophic_pct"] = catastrophic_pct;
  j["mean_reward"] = mean_reward;
  j["queries"] = queries;
  j["pii_queries"] = pii_queries;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& q : per_query) {
    rows.push_back({{"id", q.id},
                    {"actions", q.actions},
                    {"task_gain", q.task_gain},
                    {"leak", q.leak},
                    {"no_pii", q.no_pii},
                    {"reward", q.reward}});
  }
  j["per_query"] = std::move(rows);
  return j.dump(2);
}

EvalReport EvaluatePlans(std::string method,
                         std::span<const PreparedQuery> test,
                         std::span<const std::vector<Action>> plans,
                         const SimWorld& world, const RewardConfig& reward) {
  if (plans.size() != test.size()) {
    throw ValidationError("evaluate: one plan per query is required");
  }
  EvalReport report;
  report.method = std::move(method);
  report.queries = test.size();
  std::vector<double> leaks;
  double gain = 0.0, total_reward = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const EpisodeOutcome o = Execute(test[i].episode, plans[i], world, reward);
    QueryOutcome q;
    q.id = test[i].episode.data.query.id;
    for (Action a : plans[i]) q.actions += a == Action::kRemote ? 'R' : 'L';
    q.task_gain = o.task_gain;
    q.leak = o.leak;
    q.no_pii = o.no_pii;
    q.reward = o.reward;
    gain += o.task_gain;
    total_reward += o.reward;
    if (!o.no_pii) leaks.push_back(o.leak);
    report.per_query.push_back(std::move(q));
  }
  report.pii_queries = leaks.size();
  if (!test.empty()) {
    report.quality_pct = 100.0 * gain / static_cast<double>(test.size());
    report.mean_reward = total_reward / static_cast<double>(test.size());
  }
  if (!leaks.empty()) {
    report.leakage_pct = 100.0 *
                         std::accumulate(leaks.begin(), leaks.end(), 0.0) /
                         static_cast<double>(leaks.size());
    report.catastrophic_pct = 100.0 * CatastrophicRate(leaks);
  }
  return report;
}

EvalReport Evaluate(Method method, std::span<const PreparedQuery> test,
                    const Agent* agent, const SimWorld& world,
                    const RewardConfig& reward) {
  std::vector<std::vector<Action>> plans;
  if (IsLearned(method)) {
    if (agent == nullptr) {
      throw ConfigError("method " + std::string(MethodName(method)) +
                        " needs a checkpoint");
    }
    for (auto& p : GreedyPlans(*agent, test)) plans.push_back(std::move(p.actions));
  } else {
    const Action a =
        method == Method::kAlwaysLocal ? Action::kLocal : Action::kRemote;
    for (const auto& q : test) plans.emplace_back(q.episode.n(), a);
  }
  return EvaluatePlans(std::string(MethodName(method)), test, plans, world,
                       reward);
}

EvalReport EvaluateOracle(std::span<const PreparedQuery> test,
                          const SimWorld& world, const RewardConfig& reward) {
  std::vector<std::vector<Action>> plans;
  for (const auto& q : test) {
    plans.push_back(BruteForceBest(q.episode, world, reward).actions);
  }
  return EvaluatePlans("oracle", test, plans, world, reward);
}

std::vector<SweepRow> SweepLambda(std::span<const double> lambdas,
                                  const Agent& warm_start,
                                  std::span<const PreparedQuery> train,
                                  std::span<const PreparedQuery> test,
                                  const SimWorld& world,
                                  const TrainConfig& config,
                                  const PpoProgress& progress) {
  if (lambdas.size() < 2) throw ConfigError("sweep needs at least two lambdas");
  std::vector<double> sorted(lambdas.begin(), lambdas.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  for (double lambda : sorted) {
    TrainConfig cfg = config;
    cfg.reward.lambda = lambda;
    Agent agent = warm_start;
    PpoFinetune(agent, train, world, cfg, progress);
    const EvalReport r =
        Evaluate(Method::kPrivacyPad, test, &agent, world, cfg.reward);
    rows.push_back({lambda, r.quality_pct, r.leakage_pct, r.catastrophic_pct,
                    r.mean_reward});
  }
  return rows;
}

std::string SweepCsv(std::span<const SweepRow> rows) {
  std::string out =
      "lambda,quality_pct,leakage_pct,catastrophic_pct,mean_reward\n";
  for (const auto& r : rows) {
    out += FormatDouble(r.lambda) + "," + FormatDouble(r.quality_pct) + "," +
           FormatDouble(r.leakage_pct) + "," +
           FormatDouble(r.catastrophic_pct) + "," +
           FormatDouble(r.mean_reward) + "\n";
  }
  return out;
}

}  // namespace chunkroute
