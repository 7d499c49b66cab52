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


#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "chunkroute/chunker.h"
#include "chunkroute/corpus.h"
#include "chunkroute/embedding.h"
#include "chunkroute/env.h"
#include "chunkroute/ops.h"
#include "chunkroute/pii.h"
#include "chunkroute/policy.h"
#include "chunkroute/rng.h"
#include "chunkroute/tape.h"
#include "chunkroute/training.h"

namespace chunkroute {
namespace {

nn::Tensor Random(std::size_t r, std::size_t c, Rng& rng) {
  nn::Tensor t(r, c);
  for (double& v : t.values()) v = rng.Normal(0.0, 1.0);
  return t;
}

void BM_MatMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const nn::Tensor a = Random(n, 384, rng), b = Random(384, 384, rng);
  for (auto _ : state) {
    nn::Tape tape;
    benchmark::DoNotOptimize(
        nn::MatMul(tape.Constant(a), tape.Constant(b)).value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MatMul)->Arg(16)->Arg(128)->Arg(512);

const std::vector<AnnotatedQuery>& Corpus() {
  static const auto corpus = GenerateCorpus(7, 256, GenerationProfile{});
  return corpus;
}

void BM_SegmentAndDetect(benchmark::State& state) {
  const DetectorRuleSet rules = DetectorRuleSet::Default();
  std::size_t i = 0;
  for (auto _ : state) {
    const std::string& text = Corpus()[i++ % Corpus().size()].query.text;
    benchmark::DoNotOptimize(Segment(text));
    benchmark::DoNotOptimize(Detect(text, rules));
  }
}
BENCHMARK(BM_SegmentAndDetect);

void BM_HashingEmbed(benchmark::State& state) {
  const HashingEmbedder embedder;
  std::size_t i = 0;
  for (auto _ : state) {
    const Episode ep = Episode::Prepare(Corpus()[i++ % Corpus().size()]);
    benchmark::DoNotOptimize(Embed(ep.chunks, embedder));
  }
}
BENCHMARK(BM_HashingEmbed);

std::vector<PreparedQuery> Prepared(std::size_t n) {
  const HashingEmbedder embedder;
  std::vector<AnnotatedQuery> slice(Corpus().begin(),
                                    Corpus().begin() + static_cast<std::ptrdiff_t>(n));
  return PrepareQueries(slice, embedder);
}

void BM_PolicyForward(benchmark::State& state) {
  PolicyConfig pc;
  pc.variant = state.range(1) ? PolicyVariant::kMlp : PolicyVariant::kTransformer;
  const Agent agent(pc, 1);
  const auto corpus = Prepared(static_cast<std::size_t>(state.range(0)));
  std::vector<const EmbeddedQuery*> batch;
  for (const auto& q : corpus) batch.push_back(&q.embedded);
  const std::vector<std::uint64_t> seeds(batch.size(), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.ActBatch(batch, ActMode::kGreedy, seeds));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PolicyForward)->Args({1, 0})->Args({64, 0})->Args({64, 1});

// One PPO optimisation pass (forward and backward of the full objective).
void BM_PpoObjectiveBackward(benchmark::State& state) {
  const Agent agent(PolicyConfig{}, 1);
  const auto corpus = Prepared(64);
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  const RolloutBatch batch =
      CollectRollouts(agent, corpus, idx, 1, 0, SimWorld{}, RewardConfig{}, 1);
  auto actor_grads = agent.policy.params().ZerosLike();
  auto critic_grads = agent.critic.params().ZerosLike();
  for (auto _ : state) {
    nn::Tape tape;
    const auto actor = tape.Bind(agent.policy.params(), &actor_grads);
    const auto critic = tape.Bind(agent.critic.params(), &critic_grads);
    tape.Backward(PpoLoss(tape, agent, batch, PpoConfig{}, actor, critic).loss);
  }
}
BENCHMARK(BM_PpoObjectiveBackward)->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Episode* pick = nullptr;
  static std::vector<Episode> episodes;
  if (episodes.empty()) {
    for (const auto& q : GenerateCorpus(3, 2000, GenerationProfile::Named("high-risk"))) {
      episodes.push_back(Episode::Prepare(q));
    }
  }
  for (const auto& ep : episodes) {
    if (ep.n() == n) pick = &ep;
  }
  if (pick == nullptr) {
    state.SkipWithError("no episode with that many chunks");
    return;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(BruteForceBest(*pick, SimWorld{}, RewardConfig{}));
  }
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 10, 2);

}  // namespace
}  // namespace chunkroute

BENCHMARK_MAIN();
