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


#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "chunkroute/corpus.h"
#include "chunkroute/errors.h"
#include "chunkroute/grad_check.h"
#include "chunkroute/training.h"
#include "test_util.h"

namespace chunkroute {
namespace {

PolicyConfig Tiny(PolicyVariant v = PolicyVariant::kTransformer) {
  PolicyConfig c;
  c.variant = v;
  c.d = 16;
  c.heads = 2;
  c.layers = 2;
  c.ff_mult = 2;
  return c;
}

std::vector<PreparedQuery> TinyCorpus(std::size_t n, std::uint64_t seed = 3,
                                      std::size_t d = 16) {
  const HashingEmbedder e(d);
  return PrepareQueries(GenerateCorpus(seed, n, GenerationProfile{}), e);
}

TrainConfig TinyTrain() {
  TrainConfig c;
  c.sft.batch = 8;
  c.ppo.batch = 8;
  c.ppo.max_steps = 4;
  c.ppo.lr = 1e-3;
  c.ppo.ppo_epochs = 2;
  return c;
}

TEST(NormalizeAdvantages, ZeroMeanUnitVariance) {
  Rng rng(1);
  std::vector<double> raw(257);
  for (double& v : raw) v = rng.Normal(3.0, 7.0);
  const auto a = NormalizeAdvantages(raw);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= a.size();
  EXPECT_LT(std::abs(mean), 1e-9);
  EXPECT_NEAR(var, 1.0, 1e-6);
}

TEST(NormalizeAdvantages, ConstantInputIsCenteredNotNan) {
  const auto a = NormalizeAdvantages(std::vector<double>(5, 2.5));
  for (double v : a) EXPECT_EQ(v, 0.0);
}

TEST(ClippedSurrogate, Examples) {
  EXPECT_DOUBLE_EQ(ClippedSurrogate(1.5, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(ClippedSurrogate(1.0, 0.7, 0.2), 0.7);
  EXPECT_DOUBLE_EQ(ClippedSurrogate(1.0, -0.7, 0.2), -0.7);
  EXPECT_DOUBLE_EQ(ClippedSurrogate(0.5, -1.0, 0.2), -0.8);
  EXPECT_DOUBLE_EQ(ClippedSurrogate(0.9, 1.0, 0.2), 0.9);
}

TEST(HeuristicLabels, PiiChunksLocalOthersRemote) {
  const auto q = GenerateCorpus(2, 1, GenerationProfile{})[0];
  const Episode ep = Episode::Prepare(q);
  const auto labels = HeuristicLabels(ep.chunks);
  for (std::size_t t = 0; t < ep.n(); ++t) {
    EXPECT_EQ(labels[t], ep.chunks[t].has_pii() ? 0.0 : 1.0);
  }
}

// Gradient of the warm-up loss on a two-query micro-batch.
TEST(ObjectiveGradients, SftLossPassesFiniteDifferences) {
  Agent agent(Tiny(), 2);
  const auto corpus = TinyCorpus(2);
  const PreparedQuery* batch[] = {&corpus[0], &corpus[1]};
  nn::ScalarFn f = [&](nn::Tape& tape, std::span<const nn::Var> bound) {
    return SftLoss(tape, agent.policy, batch, bound);
  };
  nn::GradCheckOptions o;
  o.max_coords_per_tensor = 24;
  o.seed = 5;
  const auto r = nn::GradCheck(f, agent.policy.params(), o);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << " " << r.worst_analytic
                                   << " vs " << r.worst_numeric;
}

// Rollouts from one agent, scored by a perturbed one so the ratios move off 1
// and both sides of the clip are exercised.
struct PpoFixture {
  Agent agent{Tiny(), 4};
  std::vector<PreparedQuery> corpus = TinyCorpus(2, 9);
  RolloutBatch batch;
  PpoConfig config;

  PpoFixture() {
    const std::size_t idx[] = {0, 1};
    batch = CollectRollouts(agent, corpus, idx, 1, 0, SimWorld{},
                            RewardConfig{}, 1);
    Rng rng(8);
    for (std::size_t i = 0; i < agent.policy.params().size(); ++i) {
      for (double& v : agent.policy.params()[i].values()) v += rng.Normal(0, 0.05);
    }
    config.clip_eps = 0.05;
  }
};

// The critic reads a detached state, so the value term carries no actor
// gradient by construction; drop it from the actor check.
TEST(ObjectiveGradients, PpoObjectiveActorPassesFiniteDifferences) {
  PpoFixture fx;
  fx.config.value_coef = 0.0;
  nn::ScalarFn f = [&](nn::Tape& tape, std::span<const nn::Var> actor) {
    const auto critic = tape.Bind(fx.agent.critic.params(), nullptr);
    return PpoLoss(tape, fx.agent, fx.batch, fx.config, actor, critic).loss;
  };
  nn::GradCheckOptions o;
  o.max_coords_per_tensor = 24;
  o.seed = 6;
  const auto r = nn::GradCheck(f, fx.agent.policy.params(), o);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << " " << r.worst_analytic << " vs " << r.worst_numeric << " abs " << r.max_abs_error;
}

TEST(ObjectiveGradients, PpoObjectiveCriticPassesFiniteDifferences) {
  PpoFixture fx;
  nn::ScalarFn f = [&](nn::Tape& tape, std::span<const nn::Var> critic) {
    const auto actor = tape.Bind(fx.agent.policy.params(), nullptr);
    return PpoLoss(tape, fx.agent, fx.batch, fx.config, actor, critic).loss;
  };
  nn::GradCheckOptions o;
  o.max_coords_per_tensor = 24;
  const auto r = nn::GradCheck(f, fx.agent.critic.params(), o);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << " " << r.worst_analytic << " vs " << r.worst_numeric << " abs " << r.max_abs_error;
}

TEST(ObjectiveGradients, MlpPpoObjectivePassesFiniteDifferences) {
  Agent agent(Tiny(PolicyVariant::kMlp), 4);
  const auto corpus = TinyCorpus(2, 9);
  const std::size_t idx[] = {0, 1};
  const RolloutBatch batch =
      CollectRollouts(agent, corpus, idx, 3, 0, SimWorld{}, RewardConfig{}, 1);
  nn::ScalarFn f = [&](nn::Tape& tape, std::span<const nn::Var> actor) {
    const auto critic = tape.Bind(agent.critic.params(), nullptr);
    return PpoLoss(tape, agent, batch, PpoConfig{}, actor, critic).loss;
  };
  const auto r = nn::GradCheck(f, agent.policy.params(), {});
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << " " << r.worst_analytic << " vs " << r.worst_numeric << " abs " << r.max_abs_error;
}

TEST(PpoLoss, AdvantagesAreConstantsInTheSurrogate) {
  PpoFixture fx;
  nn::Tape tape;
  nn::Var adv = tape.Variable(nn::Tensor(fx.batch.advantages.size(), 1, 0.0));
  // PpoLoss reads advantages from the batch as data; a tape variable that is
  // never wired in must receive exactly zero gradient.
  nn::Gradients g = fx.agent.policy.params().ZerosLike();
  const auto actor = tape.Bind(fx.agent.policy.params(), &g);
  const auto critic = tape.Bind(fx.agent.critic.params(), nullptr);
  tape.Backward(PpoLoss(tape, fx.agent, fx.batch, fx.config, actor, critic).loss);
  EXPECT_EQ(tape.Grad(adv), nn::Tensor(fx.batch.advantages.size(), 1, 0.0));
}

TEST(CollectRollouts, AdvantageIsReturnMinusValue) {
  PpoFixture fx;
  for (std::size_t i = 0; i < fx.batch.returns.size(); ++i) {
    EXPECT_DOUBLE_EQ(fx.batch.raw_advantages[i],
                     fx.batch.returns[i] - fx.batch.values[i]);
  }
  const auto norm = NormalizeAdvantages(fx.batch.raw_advantages);
  EXPECT_EQ(fx.batch.advantages, norm);
}

TEST(CollectRollouts, SerialAndParallelBatchesAreIdentical) {
  const Agent agent(Tiny(), 6);
  const auto corpus = TinyCorpus(40);
  std::vector<std::size_t> idx(40);
  std::iota(idx.begin(), idx.end(), 0);
  const auto a = CollectRollouts(agent, corpus, idx, 7, 3, SimWorld{}, {}, 1);
  const auto b = CollectRollouts(agent, corpus, idx, 7, 3, SimWorld{}, {}, 3);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_EQ(a.old_log_probs, b.old_log_probs);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.episode_rewards, b.episode_rewards);
}

TEST(SftWarmup, DeterministicCheckpoint) {
  const auto corpus = TinyCorpus(24);
  Agent a(Tiny(), 1), b(Tiny(), 1);
  SftWarmup(a, corpus, TinyTrain());
  SftWarmup(b, corpus, TinyTrain());
  EXPECT_EQ(SerializeCheckpoint(a), SerializeCheckpoint(b));
  EXPECT_TRUE(a.sft_phase);
}

TEST(SftWarmup, DefaultConfigReachesLabelAccuracy) {
  const auto data = GenerateCorpus(7, 500, GenerationProfile{});
  const auto corpus = PrepareQueries(data, HashingEmbedder(kDefaultEmbeddingDim));
  Agent agent(PolicyConfig{}, 7);
  const SftReport r = SftWarmup(agent, corpus, TrainConfig{});
  EXPECT_GE(r.accuracy, 0.95);
  EXPECT_DOUBLE_EQ(r.accuracy, LabelAccuracy(agent, corpus));
}

TEST(PpoFinetune, FirstPassRatiosAreOne) {
  const auto corpus = TinyCorpus(24);
  Agent agent(Tiny(), 1);
  const PpoReport r = PpoFinetune(agent, corpus, SimWorld{}, TinyTrain());
  ASSERT_EQ(r.steps.size(), 4u);
  for (const auto& s : r.steps) EXPECT_LT(s.first_pass_ratio_dev, 1e-9);
  EXPECT_EQ(r.rollout_iterations, 4);
  EXPECT_EQ(r.optimizer_steps, 8);
  EXPECT_FALSE(agent.sft_phase);
}

TEST(PpoFinetune, RewardCurveIsReproducible) {
  const auto corpus = TinyCorpus(24);
  Agent a(Tiny(), 1), b(Tiny(), 1);
  const auto ra = PpoFinetune(a, corpus, SimWorld{}, TinyTrain());
  const auto rb = PpoFinetune(b, corpus, SimWorld{}, TinyTrain());
  ASSERT_EQ(ra.steps.size(), rb.steps.size());
  for (std::size_t i = 0; i < ra.steps.size(); ++i) {
    EXPECT_NEAR(ra.steps[i].mean_reward, rb.steps[i].mean_reward, 1e-9);
  }
  EXPECT_EQ(ra.RewardCurveCsv(), rb.RewardCurveCsv());
  EXPECT_EQ(ra.RewardCurveCsv().rfind("step,mean_reward\n", 0), 0u);
}

// On a world where every chunk is beyond local reach and nothing is
// private, all-REMOTE is optimal; PPO must push the policy towards it.
TEST(PpoFinetune, LearnsTheObviousRoutingOnAPiiFreeHardWorld) {
  std::vector<PreparedQuery> corpus;
  const HashingEmbedder e(16);
  for (int i = 0; i < 16; ++i) {
    AnnotatedQuery q;
    q.query.id = "h" + std::to_string(i);
    q.query.text = "Is fever number " + std::to_string(i) + " bad? What helps?";
    q.query.domain_tag = "medical";
    q.sim.difficulty = {0.8, 0.8};
    corpus.push_back(PrepareQueries(std::vector<AnnotatedQuery>{q}, e)[0]);
  }
  Agent agent(Tiny(), 3);
  auto mean_p = [&] {
    double s = 0;
    for (const auto& q : corpus) {
      for (double p : agent.Act(q.embedded, ActMode::kGreedy).p_remote) s += p;
    }
    return s / 32.0;
  };
  const double before = mean_p();
  TrainConfig c = TinyTrain();
  c.ppo.max_steps = 30;
  c.ppo.lr = 3e-3;
  PpoFinetune(agent, corpus, SimWorld{}, c);
  EXPECT_GT(mean_p(), before + 0.2);
  EXPECT_GT(mean_p(), 0.8);
}

TEST(Evaluate, BaselineBounds) {
  const auto corpus = TinyCorpus(30);
  const auto local = Evaluate(Method::kAlwaysLocal, corpus, nullptr, SimWorld{}, {});
  const auto remote = Evaluate(Method::kAlwaysRemote, corpus, nullptr, SimWorld{}, {});
  EXPECT_EQ(local.leakage_pct, 0.0);
  EXPECT_EQ(remote.leakage_pct, 100.0);
  EXPECT_EQ(remote.catastrophic_pct, 100.0);
  EXPECT_EQ(local.queries, 30u);
}

TEST(Evaluate, LearnedMethodWithoutAgentIsConfigError) {
  const auto corpus = TinyCorpus(2);
  EXPECT_THROW(Evaluate(Method::kPrivacyPad, corpus, nullptr, SimWorld{}, {}),
               ConfigError);
}

TEST(Evaluate, ReportJsonIsDeterministic) {
  const auto corpus = TinyCorpus(10);
  const Agent agent(Tiny(), 2);
  const auto a = Evaluate(Method::kHeuristicSft, corpus, &agent, SimWorld{}, {});
  const auto b = Evaluate(Method::kHeuristicSft, corpus, &agent, SimWorld{}, {});
  EXPECT_EQ(a.ToJson(), b.ToJson());
}

TEST(Evaluate, OracleDominatesBaselines) {
  const auto corpus = TinyCorpus(40);
  const auto oracle = EvaluateOracle(corpus, SimWorld{}, {});
  for (Method m : {Method::kAlwaysLocal, Method::kAlwaysRemote}) {
    EXPECT_GE(oracle.mean_reward,
              Evaluate(m, corpus, nullptr, SimWorld{}, {}).mean_reward);
  }
}

TEST(SweepLambda, NeedsTwoLambdasAndSortsRows) {
  const auto corpus = TinyCorpus(16);
  const Agent warm(Tiny(), 1);
  TrainConfig c = TinyTrain();
  c.ppo.max_steps = 1;
  const double one[] = {5.0};
  EXPECT_THROW(SweepLambda(one, warm, corpus, corpus, SimWorld{}, c), ConfigError);
  const double lams[] = {5.0, 1.0};
  const auto rows = SweepLambda(lams, warm, corpus, corpus, SimWorld{}, c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].lambda, 1.0);
  EXPECT_EQ(rows[1].lambda, 5.0);
  const std::string csv = SweepCsv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(TrainConfig, RejectsInvalidValues) {
  TrainConfig c;
  c.ppo.clip_eps = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.ppo.lr = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.reward.lambda = -1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(ParseMethod("random"), ConfigError);
}

}  // namespace
}  // namespace chunkroute
