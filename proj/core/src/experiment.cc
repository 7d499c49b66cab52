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


#include "chunkroute/experiment.h"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "chunkroute/errors.h"
#include "json.hpp"

namespace chunkroute {

using nlohmann::json;

namespace {

void RequireKeys(const json& j, std::string_view where,
                 std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

}  // namespace

ExperimentConfig ExperimentConfig::FromJsonText(
    std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    RequireKeys(j, "experiment config",
                {"corpus", "embeddings", "world", "policy", "train", "lambdas",
                 "output_dir"});
    if (j.contains("corpus")) {
      const json& cj = j.at("corpus");
      RequireKeys(cj, "corpus", {"path", "generate"});
      if (cj.contains("path") && cj.contains("generate")) {
        throw ConfigError("corpus: give either path or generate, not both");
      }
      if (cj.contains("path")) {
        c.corpus.path = Resolve(base_dir, cj.at("path").get<std::string>());
      }
      if (cj.contains("generate")) {
        const json& g = cj.at("generate");
        RequireKeys(g, "corpus.generate",
                    {"seed", "n", "profile", "test_fraction"});
        Read(g, "seed", c.corpus.seed);
        Read(g, "n", c.corpus.n);
        Read(g, "profile", c.corpus.profile);
        Read(g, "test_fraction", c.corpus.test_fraction);
      }
    }
    if (j.contains("embeddings")) {
      c.embeddings = Resolve(base_dir, j.at("embeddings").get<std::string>());
    }
    if (j.contains("world")) {
      const json& w = j.at("world");
      RequireKeys(w, "world", {"kappa_local", "kappa_remote"});
      Read(w, "kappa_local", c.world.kappa_local);
      Read(w, "kappa_remote", c.world.kappa_remote);
    }
    if (j.contains("policy")) {
      const json& p = j.at("policy");
      RequireKeys(p, "policy",
                  {"variant", "d", "heads", "layers", "ff_mult",
                   "use_positions"});
      if (p.contains("variant")) {
        c.policy.variant = ParseVariant(p.at("variant").get<std::string>());
      }
      Read(p, "d", c.policy.d);
      Read(p, "heads", c.policy.heads);
      Read(p, "layers", c.policy.layers);
      Read(p, "ff_mult", c.policy.ff_mult);
      Read(p, "use_positions", c.policy.use_positions);
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      RequireKeys(t, "train",
                  {"seed", "workers", "lambda", "penalty", "sft", "ppo"});
      Read(t, "seed", c.train.seed);
      Read(t, "workers", c.train.workers);
      Read(t, "lambda", c.train.reward.lambda);
      if (t.contains("penalty")) {
        c.train.reward.penalty = ParsePenalty(t.at("penalty").get<std::string>());
      }
      if (t.contains("sft")) {
        const json& s = t.at("sft");
        RequireKeys(s, "train.sft", {"epochs", "batch", "lr"});
        Read(s, "epochs", c.train.sft.epochs);
        Read(s, "batch", c.train.sft.batch);
        Read(s, "lr", c.train.sft.lr);
      }
      if (t.contains("ppo")) {
        const json& p = t.at("ppo");
        RequireKeys(p, "train.ppo",
                    {"lr", "batch", "max_steps", "clip_eps", "entropy_coef",
                     "value_coef", "ppo_epochs", "max_grad_norm"});
        PpoConfig& o = c.train.ppo;
        Read(p, "lr", o.lr);
        Read(p, "batch", o.batch);
        Read(p, "max_steps", o.max_steps);
        Read(p, "clip_eps", o.clip_eps);
        Read(p, "entropy_coef", o.entropy_coef);
        Read(p, "value_coef", o.value_coef);
        Read(p, "ppo_epochs", o.ppo_epochs);
        Read(p, "max_grad_norm", o.max_grad_norm);
      }
    }
    Read(j, "lambdas", c.lambdas);
    if (j.contains("output_dir")) {
      c.output_dir = Resolve(base_dir, j.at("output_dir").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open experiment config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str(), path.parent_path());
}

std::string ExperimentConfig::ToJson() const {
  json j;
  if (!corpus.path.empty()) {
    j["corpus"] = {{"path", corpus.path.string()}};
  } else {
    j["corpus"] = {{"generate",
                    {{"seed", corpus.seed},
                     {"n", corpus.n},
                     {"profile", corpus.profile},
                     {"test_fraction", corpus.test_fraction}}}};
  }
  if (!embeddings.empty()) j["embeddings"] = embeddings.string();
  j["world"] = {{"kappa_local", world.kappa_local},
                {"kappa_remote", world.kappa_remote}};
  j["policy"] = {{"variant", std::string(VariantName(policy.variant))},
                 {"d", policy.d},
                 {"heads", policy.heads},
                 {"layers", policy.layers},
                 {"ff_mult", policy.ff_mult},
                 {"use_positions", policy.use_positions}};
  const PpoConfig& p = train.ppo;
  j["train"] = {
      {"seed", train.seed},
      {"workers", train.workers},
      {"lambda", train.reward.lambda},
      {"penalty", std::string(PenaltyName(train.reward.penalty))},
      {"sft",
       {{"epochs", train.sft.epochs},
        {"batch", train.sft.batch},
        {"lr", train.sft.lr}}},
      {"ppo",
       {{"lr", p.lr},
        {"batch", p.batch},
        {"max_steps", p.max_steps},
        {"clip_eps", p.clip_eps},
        {"entropy_coef", p.entropy_coef},
        {"value_coef", p.value_coef},
        {"ppo_epochs", p.ppo_epochs},
        {"max_grad_norm", p.max_grad_norm}}}};
  j["lambdas"] = lambdas;
  j["output_dir"] = output_dir.string();
  return j.dump(2);
}

void ExperimentConfig::Validate() const {
  if (corpus.path.empty()) {
    if (corpus.n == 0) throw ConfigError("corpus.generate.n must be > 0");
    if (!(corpus.test_fraction >= 0.0 && corpus.test_fraction < 1.0)) {
      throw ConfigError("corpus.generate.test_fraction must be in [0, 1)");
    }
    GenerationProfile::Named(corpus.profile).Validate();
  }
  world.Validate();
  policy.Validate();
  train.Validate();
}

CorpusSplit LoadOrGenerateCorpus(const CorpusSource& source) {
  if (!source.path.empty()) return LoadCorpus(source.path);
  return MakeSplit(GenerateCorpus(source.seed, source.n,
                                  GenerationProfile::Named(source.profile)),
                   source.test_fraction, source.seed);
}

std::unique_ptr<EmbeddingProvider> MakeEmbedder(const ExperimentConfig& cfg) {
  if (!cfg.embeddings.empty()) {
    auto pre = std::make_unique<PrecomputedEmbedder>(
        PrecomputedEmbedder::LoadFile(cfg.embeddings));
    if (pre->dim() != cfg.policy.d) {
      throw ConfigError("precomputed embedding width " +
                        std::to_string(pre->dim()) + " != policy d " +
                        std::to_string(cfg.policy.d));
    }
    return pre;
  }
  return std::make_unique<HashingEmbedder>(cfg.policy.d);
}

}  // namespace chunkroute
