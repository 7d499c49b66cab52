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


#ifndef CHUNKROUTE_ENV_H_
#define CHUNKROUTE_ENV_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/chunker.h"
#include "chunkroute/pii.h"
#include "chunkroute/policy.h"
#include "chunkroute/query.h"

namespace chunkroute {

// Capabilities of the simulated local and remote models. A chunk is within a
// model's reach when its difficulty does not exceed the capability.
struct SimWorld {
  double kappa_local = 0.55;
  double kappa_remote = 0.95;

  // Requires both in [0, 1] and kappa_remote > kappa_local.
  void Validate() const;
};

enum class PenaltyMode { kQuadratic, kLinear };

std::string_view PenaltyName(PenaltyMode mode);
PenaltyMode ParsePenalty(std::string_view name);

struct RewardConfig {
  double lambda = 5.0;
  PenaltyMode penalty = PenaltyMode::kQuadratic;

  void Validate() const;
};

// task_gain - lambda * leak^2 (quadratic) or task_gain - lambda * leak.
double ComputeReward(int task_gain, double leak, const RewardConfig& reward);

struct EpisodeOutcome {
  int task_gain = 0;
  double leak = 0.0;
  // The query has no PII; leak is 0 by convention.
  bool no_pii = false;
  double reward = 0.0;
  RemoteExposure exposure;
  std::vector<bool> per_chunk_handled;
};

// A query chunked and indexed for repeated execution. `exposed_by[u]` lists
// the chunks whose text contains the surface of PII unit u under the leakage
// matcher, so the leak of a plan is a lookup rather than a text scan.
struct Episode {
  AnnotatedQuery data;
  std::vector<Chunk> chunks;
  std::vector<std::vector<std::size_t>> exposed_by;

  std::size_t n() const { return chunks.size(); }
  // Throws ValidationError when the annotation does not fit the chunking.
  static Episode Prepare(AnnotatedQuery data);
};

// Per-chunk HANDLED flags. LOCAL: kappa_local >= difficulty. REMOTE:
// kappa_remote >= difficulty and every dependency source also REMOTE.
std::vector<bool> HandledChunks(const SimAnnotation& annotation,
                                std::span<const Action> actions,
                                const SimWorld& world);
// 1 iff every chunk is handled.
int QualityOracle(const SimAnnotation& annotation,
                  std::span<const Action> actions, const SimWorld& world);

// Dispatches REMOTE chunks as one prompt each, measures leakage over those
// prompts and scores the episode. Throws ValidationError on a plan/chunk
// length mismatch.
EpisodeOutcome Execute(const Episode& episode, std::span<const Action> actions,
                       const SimWorld& world, const RewardConfig& reward);
EpisodeOutcome Execute(const AnnotatedQuery& query,
                       std::span<const Action> actions, const SimWorld& world,
                       const RewardConfig& reward);

// Same numbers as Execute without building the exposure record.
struct Score {
  int task_gain = 0;
  double leak = 0.0;
  double reward = 0.0;
};
Score ScorePlan(const Episode& episode, std::span<const Action> actions,
                const SimWorld& world, const RewardConfig& reward);

inline constexpr std::size_t kBruteForceMaxChunks = 20;

struct BruteForceResult {
  std::vector<Action> actions;
  double reward = 0.0;
  double leak = 0.0;
  int task_gain = 0;
};

// Enumerates all 2^n routings in lexicographic order (LOCAL < REMOTE, chunk
// 0 most significant) and keeps the first maximum, so more-local plans win
// ties. Throws SizeError when n > 20.
BruteForceResult BruteForceBest(const Episode& episode, const SimWorld& world,
                                const RewardConfig& reward);

}  // namespace chunkroute

#endif  // CHUNKROUTE_ENV_H_
