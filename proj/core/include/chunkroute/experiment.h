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


// Experiment configuration file shared by the command-line tool and the
// acceptance harness.

#ifndef CHUNKROUTE_EXPERIMENT_H_
#define CHUNKROUTE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/corpus.h"
#include "chunkroute/embedding.h"
#include "chunkroute/env.h"
#include "chunkroute/policy.h"
#include "chunkroute/training.h"

namespace chunkroute {

struct CorpusSource {
  // Existing JSONL corpus. When empty the corpus is generated.
  std::filesystem::path path;
  std::uint64_t seed = 7;
  std::size_t n = 625;
  std::string profile = "medical";
  double test_fraction = 0.2;
};

// {
//   "corpus": {"path": "..."} | {"generate": {"seed", "n", "profile",
//              "test_fraction"}},
//   "embeddings": "<precomputed vectors JSON>",            (optional)
//   "world": {"kappa_local", "kappa_remote"},
//   "policy": {"variant", "d", "heads", "layers", "ff_mult", "use_positions"},
//   "train": {"seed", "workers", "lambda", "penalty",
//             "sft": {"epochs", "batch", "lr"},
//             "ppo": {"lr", "batch", "max_steps", "clip_eps", "entropy_coef",
//                     "value_coef", "ppo_epochs", "max_grad_norm"}},
//   "lambdas": [1, 2, 5, 10, 20],
//   "output_dir": "runs/default"
// }
// Every section and key is optional; unknown keys are rejected.
struct ExperimentConfig {
  CorpusSource corpus;
  std::filesystem::path embeddings;
  SimWorld world;
  PolicyConfig policy;
  TrainConfig train;
  std::vector<double> lambdas = {1.0, 2.0, 5.0, 10.0, 20.0};
  std::filesystem::path output_dir = "runs/default";

  // Relative paths inside the file resolve against `base_dir`.
  static ExperimentConfig FromJsonText(std::string_view json_text,
                                       const std::filesystem::path& base_dir = {});
  static ExperimentConfig LoadFile(const std::filesystem::path& path);
  std::string ToJson() const;

  void Validate() const;
};

// Loads or generates the corpus described by `source`.
CorpusSplit LoadOrGenerateCorpus(const CorpusSource& source);

// Precomputed vectors when `cfg.embeddings` is set, else the hashing
// embedder at the policy width.
std::unique_ptr<EmbeddingProvider> MakeEmbedder(const ExperimentConfig& cfg);

}  // namespace chunkroute

#endif  // CHUNKROUTE_EXPERIMENT_H_
