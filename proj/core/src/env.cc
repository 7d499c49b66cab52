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


#include "chunkroute/env.h"

#include <cstdint>

#include "chunkroute/errors.h"

namespace chunkroute {

void SimWorld::Validate() const {
  if (!(kappa_local >= 0.0 && kappa_local <= 1.0) ||
      !(kappa_remote >= 0.0 && kappa_remote <= 1.0)) {
    throw ConfigError("world capabilities must lie in [0, 1]");
  }
  if (!(kappa_remote > kappa_local)) {
    throw ConfigError("world.kappa_remote must exceed world.kappa_local");
  }
}

std::string_view PenaltyName(PenaltyMode mode) {
  return mode == PenaltyMode::kQuadratic ? "quadratic" : "linear";
}

PenaltyMode ParsePenalty(std::string_view name) {
  if (name == "quadratic") return PenaltyMode::kQuadratic;
  if (name == "linear") return PenaltyMode::kLinear;
  throw ConfigError("unknown penalty mode '" + std::string(name) + "'");
}

void RewardConfig::Validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

double ComputeReward(int task_gain, double leak, const RewardConfig& reward) {
  const double penalty =
      reward.penalty == PenaltyMode::kQuadratic ? leak * leak : leak;
  return static_cast<double>(task_gain) - reward.lambda * penalty;
}

Episode Episode::Prepare(AnnotatedQuery data) {
  Episode ep;
  ep.chunks = ChunkQuery(data.query);
  const std::size_t n = ep.chunks.size();
  if (data.sim.difficulty.size() != n) {
    throw ValidationError("query '" + data.query.id + "': difficulty has " +
                          std::to_string(data.sim.difficulty.size()) +
                          " entries for " + std::to_string(n) + " chunks");
  }
  for (const auto& [d, s] : data.sim.dependencies) {
    if (d >= n || s >= n || d == s) {
      throw ValidationError("query '" + data.query.id +
                            "': invalid dependency");
    }
  }
  std::vector<std::string> normalized;
  for (const Chunk& c : ep.chunks) normalized.push_back(NormalizeForMatch(c.text));
  for (const PiiUnit& unit : data.query.pii) {
    std::vector<std::size_t> hits;
    for (std::size_t t = 0; t < n; ++t) {
      if (SurfaceExposed(unit.surface, std::span(&normalized[t], 1))) {
        hits.push_back(t);
      }
    }
    ep.exposed_by.push_back(std::move(hits));
  }
  ep.data = std::move(data);
  return ep;
}

std::vector<bool> HandledChunks(const SimAnnotation& annotation,
                                std::span<const Action> actions,
                                const SimWorld& world) {
  const std::size_t n = actions.size();
  if (annotation.difficulty.size() != n) {
    throw ValidationError("plan has " + std::to_string(n) +
                          " actions for " +
                          std::to_string(annotation.difficulty.size()) +
                          " chunks");
  }
  std::vector<bool> handled(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (actions[t] == Action::kLocal) {
      handled[t] = world.kappa_local >= annotation.difficulty[t];
    } else {
      handled[t] = world.kappa_remote >= annotation.difficulty[t];
    }
  }
  for (const auto& [dependent, source] : annotation.dependencies) {
    if (actions[dependent] == Action::kRemote &&
        actions[source] != Action::kRemote) {
      handled[dependent] = false;
    }
  }
  return handled;
}

int QualityOracle(const SimAnnotation& annotation,
                  std::span<const Action> actions, const SimWorld& world) {
  for (bool h : HandledChunks(annotation, actions, world)) {
    if (!h) return 0;
  }
  return 1;
}

EpisodeOutcome Execute(const Episode& episode, std::span<const Action> actions,
                       const SimWorld& world, const RewardConfig& reward) {
  if (actions.size() != episode.n()) {
    throw ValidationError("plan has " + std::to_string(actions.size()) +
                          " actions for " + std::to_string(episode.n()) +
                          " chunks");
  }
  EpisodeOutcome out;
  std::vector<std::string> prompts;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    if (actions[t] == Action::kRemote) prompts.push_back(episode.chunks[t].text);
  }
  const auto& pii = episode.data.query.pii;
  out.exposure = Expose(pii, std::move(prompts));
  const LeakageReport leak = ComputeLeakage(pii, out.exposure.prompts);
  out.leak = leak.fraction;
  out.no_pii = leak.no_pii;
  out.per_chunk_handled = HandledChunks(episode.data.sim, actions, world);
  out.task_gain = 1;
  for (bool h : out.per_chunk_handled) {
    if (!h) out.task_gain = 0;
  }
  out.reward = ComputeReward(out.task_gain, out.leak, reward);
  return out;
}

EpisodeOutcome Execute(const AnnotatedQuery& query,
                       std::span<const Action> actions, const SimWorld& world,
                       const RewardConfig& reward) {
  return Execute(Episode::Prepare(query), actions, world, reward);
}

namespace {

double FastLeak(const Episode& episode, std::span<const Action> actions) {
  const std::size_t units = episode.exposed_by.size();
  if (units == 0) return 0.0;
  std::size_t exposed = 0;
  for (const auto& hits : episode.exposed_by) {
    for (std::size_t t : hits) {
      if (actions[t] == Action::kRemote) {
        ++exposed;
        break;
      }
    }
  }
  return static_cast<double>(exposed) / static_cast<double>(units);
}

}  // namespace

Score ScorePlan(const Episode& episode, std::span<const Action> actions,
                const SimWorld& world, const RewardConfig& reward) {
  if (actions.size() != episode.n()) {
    throw ValidationError("plan has " + std::to_string(actions.size()) +
                          " actions for " + std::to_string(episode.n()) +
                          " chunks");
  }
  Score s;
  s.task_gain = QualityOracle(episode.data.sim, actions, world);
  s.leak = FastLeak(episode, actions);
  s.reward = ComputeReward(s.task_gain, s.leak, reward);
  return s;
}

BruteForceResult BruteForceBest(const Episode& episode, const SimWorld& world,
                                const RewardConfig& reward) {
  const std::size_t n = episode.n();
  if (n > kBruteForceMaxChunks) {
    throw SizeError("brute force limited to " +
                    std::to_string(kBruteForceMaxChunks) + " chunks, got " +
                    std::to_string(n));
  }
  BruteForceResult best;
  std::vector<Action> actions(n, Action::kLocal);
  bool have = false;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t t = 0; t < n; ++t) {
      actions[t] = ((mask >> (n - 1 - t)) & 1U) != 0 ? Action::kRemote
                                                    : Action::kLocal;
    }
    const Score s = ScorePlan(episode, actions, world, reward);
    if (!have || s.reward > best.reward) {
      have = true;
      best.actions = actions;
      best.reward = s.reward;
      best.leak = s.leak;
      best.task_gain = s.task_gain;
    }
  }
  return best;
}

}  // namespace chunkroute
