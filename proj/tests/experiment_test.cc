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

#include "chunkroute/errors.h"
#include "chunkroute/experiment.h"

namespace chunkroute {
namespace {

TEST(ExperimentConfig, EmptyObjectGivesDefaults) {
  const auto c = ExperimentConfig::FromJsonText("{}");
  EXPECT_EQ(c.train.reward.lambda, 5.0);
  EXPECT_EQ(c.train.ppo.lr, 1e-5);
  EXPECT_EQ(c.train.ppo.batch, 64u);
  EXPECT_EQ(c.train.sft.lr, 3e-4);
  EXPECT_EQ(c.policy.d, kDefaultEmbeddingDim);
  EXPECT_EQ(c.lambdas, (std::vector<double>{1, 2, 5, 10, 20}));
}

TEST(ExperimentConfig, RoundTripsThroughJson) {
  const auto a = ExperimentConfig::FromJsonText(R"({
    "corpus": {"generate": {"seed": 3, "n": 50, "profile": "high-risk",
                            "test_fraction": 0.4}},
    "world": {"kappa_local": 0.5, "kappa_remote": 0.9},
    "policy": {"variant": "mlp", "d": 64, "heads": 2},
    "train": {"seed": 9, "workers": 2, "lambda": 2.0, "penalty": "linear",
              "ppo": {"max_steps": 3, "entropy_coef": 0.02}},
    "lambdas": [1, 3],
    "output_dir": "out"})",
                                                "/base");
  EXPECT_EQ(a.output_dir, std::filesystem::path("/base/out"));
  EXPECT_EQ(a.policy.variant, PolicyVariant::kMlp);
  EXPECT_EQ(a.train.reward.penalty, PenaltyMode::kLinear);
  const auto b = ExperimentConfig::FromJsonText(a.ToJson(), "/elsewhere");
  EXPECT_EQ(a.ToJson(), b.ToJson());
}

TEST(ExperimentConfig, UnknownKeysAreRejected) {
  EXPECT_THROW(ExperimentConfig::FromJsonText(R"({"trian": {}})"), ConfigError);
  EXPECT_THROW(ExperimentConfig::FromJsonText(R"({"train": {"ppo": {"lr ": 1}}})"),
               ConfigError);
}

TEST(ExperimentConfig, InvalidValuesAreRejected) {
  EXPECT_THROW(ExperimentConfig::FromJsonText(R"({"policy": {"d": 30, "heads": 4}})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::FromJsonText(R"({"train": {"lambda": -1}})"),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::FromJsonText("[1,"), ConfigError);
}

TEST(LoadOrGenerateCorpus, GeneratedSplitIsDeterministic) {
  CorpusSource s;
  s.n = 40;
  const auto a = LoadOrGenerateCorpus(s);
  const auto b = LoadOrGenerateCorpus(s);
  EXPECT_EQ(a.train.size(), 32u);
  EXPECT_EQ(a.test.size(), 8u);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace chunkroute
