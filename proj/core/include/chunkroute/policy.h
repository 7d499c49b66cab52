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


#ifndef CHUNKROUTE_POLICY_H_
#define CHUNKROUTE_POLICY_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/embedding.h"
#include "chunkroute/ops.h"
#include "chunkroute/tape.h"
#include "chunkroute/tensor.h"

namespace chunkroute {

enum class Action : std::uint8_t { kLocal = 0, kRemote = 1 };

std::string_view ActionName(Action a);

enum class PolicyVariant { kTransformer, kMlp };

std::string_view VariantName(PolicyVariant v);
// Throws ConfigError on unknown names.
PolicyVariant ParseVariant(std::string_view name);

struct PolicyConfig {
  PolicyVariant variant = PolicyVariant::kTransformer;
  std::size_t d = kDefaultEmbeddingDim;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ff_mult = 4;
  // Add sinusoidal encodings to the transformer input. The MLP never sees
  // them.
  bool use_positions = true;

  void Validate() const;
};

// Rows of several queries stacked for one network pass.
struct PolicyBatch {
  nn::Tensor input;
  std::vector<std::size_t> lengths;

  std::size_t rows() const { return input.rows(); }
};

PolicyBatch MakeBatch(const PolicyConfig& config,
                      std::span<const EmbeddedQuery* const> queries);
PolicyBatch MakeBatch(const PolicyConfig& config, const EmbeddedQuery& query);

// Actor: pre-LN transformer encoder (or per-row MLP) followed by the linear
// action head softmax(h W + b).
class PolicyNetwork {
 public:
  PolicyNetwork() = default;
  PolicyNetwork(const PolicyConfig& config, std::uint64_t seed);

  const PolicyConfig& config() const { return config_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  struct Output {
    // N x 2 action logits.
    nn::Var logits;
    // N x d per-chunk state fed (detached) to the critic: the final hidden
    // state for the transformer, the input row for the MLP.
    nn::Var state;
  };
  // `grads` may be null, in which case parameters act as constants.
  Output Forward(nn::Tape& tape, const PolicyBatch& batch,
                 nn::Gradients* grads) const;
  // Same, with parameters already bound on `tape` (aligned with params()).
  Output Forward(nn::Tape& tape, const PolicyBatch& batch,
                 std::span<const nn::Var> bound) const;

  // n x 2 action probabilities for one query.
  nn::Tensor Probabilities(const EmbeddedQuery& query) const;

 private:
  PolicyConfig config_;
  nn::ParameterSet params_;
};

// Feed-forward value function with two hidden ReLU layers of width d.
class CriticNetwork {
 public:
  CriticNetwork() = default;
  CriticNetwork(std::size_t d, std::uint64_t seed);

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  // N x 1 values for N x d states.
  nn::Var Forward(nn::Tape& tape, nn::Var states, nn::Gradients* grads) const;
  nn::Var Forward(nn::Tape& tape, nn::Var states,
                  std::span<const nn::Var> bound) const;

 private:
  nn::ParameterSet params_;
};

struct RoutingPlan {
  std::vector<Action> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> entropy;
  // Probability of REMOTE per chunk.
  std::vector<double> p_remote;

  std::size_t size() const { return actions.size(); }
};

enum class ActMode { kGreedy, kSample };

struct Agent {
  PolicyNetwork policy;
  CriticNetwork critic;
  bool sft_phase = false;
  std::string rng_state;

  Agent() = default;
  Agent(const PolicyConfig& config, std::uint64_t seed);

  // Greedy: REMOTE iff its logit is strictly larger (ties go LOCAL).
  // Sample: A_t ~ Bernoulli(p_remote) from a generator seeded with `seed`.
  RoutingPlan Act(const EmbeddedQuery& query, ActMode mode,
                  std::uint64_t seed = 0) const;
  // One network pass over several queries; seeds[i] drives query i.
  std::vector<RoutingPlan> ActBatch(std::span<const EmbeddedQuery* const> queries,
                                    ActMode mode,
                                    std::span<const std::uint64_t> seeds) const;
};

inline constexpr int kCheckpointVersion = 1;

// JSON {version, variant, d, heads, layers, parameters, sft_phase,
// rng_state}. Critic tensors are stored under "critic/..." names.
std::string SerializeCheckpoint(const Agent& agent);
Agent ParseCheckpoint(std::string_view json_text);
void SaveCheckpoint(const Agent& agent, const std::filesystem::path& path);
Agent LoadCheckpoint(const std::filesystem::path& path);

}  // namespace chunkroute

#endif  // CHUNKROUTE_POLICY_H_
