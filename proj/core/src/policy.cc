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


#include "chunkroute/policy.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "chunkroute/errors.h"
#include "chunkroute/rng.h"
#include "json.hpp"

namespace chunkroute {

using nn::Tensor;
using nn::Var;

std::string_view ActionName(Action a) {
  return a == Action::kLocal ? "LOCAL" : "REMOTE";
}

std::string_view VariantName(PolicyVariant v) {
  return v == PolicyVariant::kTransformer ? "transformer" : "mlp";
}

PolicyVariant ParseVariant(std::string_view name) {
  if (name == "transformer") return PolicyVariant::kTransformer;
  if (name == "mlp" || name == "stateless") return PolicyVariant::kMlp;
  throw ConfigError("unknown policy variant '" + std::string(name) + "'");
}

void PolicyConfig::Validate() const {
  if (d == 0) throw ConfigError("policy.d must be >= 1");
  if (variant == PolicyVariant::kTransformer) {
    if (heads == 0 || d % heads != 0) {
      throw ConfigError("policy.d must be divisible by policy.heads");
    }
    if (layers == 0) throw ConfigError("policy.layers must be >= 1");
    if (ff_mult == 0) throw ConfigError("policy.ff_mult must be >= 1");
  }
}

namespace {

Tensor RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols,
                    double stddev) {
  Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.Normal(0.0, stddev);
  return t;
}

double FanIn(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

// Name-indexed view of bound parameters.
class Bound {
 public:
  Bound(const nn::ParameterSet& params, std::span<const Var> vars)
      : params_(params), vars_(vars) {
    if (vars.size() != params.size()) {
      throw ValidationError("bound parameter count does not match network");
    }
  }

  Var operator()(const std::string& name) const {
    auto i = params_.Find(name);
    if (!i) throw ValidationError("missing parameter '" + name + "'");
    return vars_[*i];
  }

 private:
  const nn::ParameterSet& params_;
  std::span<const Var> vars_;
};

constexpr double kHeadInitStd = 0.01;

}  // namespace

PolicyBatch MakeBatch(const PolicyConfig& config,
                      std::span<const EmbeddedQuery* const> queries) {
  std::size_t rows = 0;
  for (const EmbeddedQuery* q : queries) {
    if (q->dim() != config.d) {
      throw ConfigError("embedding width " + std::to_string(q->dim()) +
                        " does not match policy d " + std::to_string(config.d));
    }
    if (q->n() == 0) throw EmptyInputError("policy input has no chunks");
    rows += q->n();
  }
  if (rows == 0) throw EmptyInputError("policy batch is empty");
  const bool positions =
      config.variant == PolicyVariant::kTransformer && config.use_positions;
  PolicyBatch batch;
  batch.input = Tensor(rows, config.d);
  std::size_t offset = 0;
  for (const EmbeddedQuery* q : queries) {
    const Tensor x = q->Input(positions);
    std::copy(x.values().begin(), x.values().end(),
              batch.input.data() + offset * config.d);
    offset += q->n();
    batch.lengths.push_back(q->n());
  }
  return batch;
}

PolicyBatch MakeBatch(const PolicyConfig& config, const EmbeddedQuery& query) {
  const EmbeddedQuery* one[] = {&query};
  return MakeBatch(config, one);
}

PolicyNetwork::PolicyNetwork(const PolicyConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.Validate();
  Rng rng(SubSeed(seed, 0xac7));
  const std::size_t d = config_.d;
  if (config_.variant == PolicyVariant::kTransformer) {
    const std::size_t ff = config_.ff_mult * d;
    const double residual =
        FanIn(d) / std::sqrt(2.0 * static_cast<double>(config_.layers));
    for (std::size_t l = 0; l < config_.layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + "/";
      for (const char* m : {"q", "k", "v"}) {
        params_.Add(p + "w" + m, RandomMatrix(rng, d, d, FanIn(d)));
        params_.Add(p + "b" + m, Tensor(1, d));
      }
      params_.Add(p + "wo", RandomMatrix(rng, d, d, residual));
      params_.Add(p + "bo", Tensor(1, d));
      params_.Add(p + "w1", RandomMatrix(rng, d, ff, FanIn(d)));
      params_.Add(p + "b1", Tensor(1, ff));
      params_.Add(p + "w2",
                  RandomMatrix(rng, ff, d,
                               FanIn(ff) / std::sqrt(2.0 * config_.layers)));
      params_.Add(p + "b2", Tensor(1, d));
    }
  } else {
    params_.Add("mlp/w1", RandomMatrix(rng, d, d, FanIn(d) * std::sqrt(2.0)));
    params_.Add("mlp/b1", Tensor(1, d));
    params_.Add("mlp/w2", RandomMatrix(rng, d, d, FanIn(d) * std::sqrt(2.0)));
    params_.Add("mlp/b2", Tensor(1, d));
  }
  params_.Add("head/w", RandomMatrix(rng, d, 2, kHeadInitStd));
  params_.Add("head/b", Tensor(1, 2));
}

PolicyNetwork::Output PolicyNetwork::Forward(nn::Tape& tape,
                                             const PolicyBatch& batch,
                                             nn::Gradients* grads) const {
  const std::vector<Var> bound = tape.Bind(params_, grads);
  return Forward(tape, batch, bound);
}

PolicyNetwork::Output PolicyNetwork::Forward(
    nn::Tape& tape, const PolicyBatch& batch,
    std::span<const Var> bound) const {
  if (batch.rows() == 0) throw EmptyInputError("policy forward: n = 0");
  if (batch.input.cols() != config_.d) {
    throw ConfigError("policy forward: input width " +
                      std::to_string(batch.input.cols()) + ", expected " +
                      std::to_string(config_.d));
  }
  const Bound p(params_, bound);
  Var x = tape.Constant(batch.input);
  Var state;
  Var h;
  if (config_.variant == PolicyVariant::kTransformer) {
    for (std::size_t l = 0; l < config_.layers; ++l) {
      const std::string n = "layer" + std::to_string(l) + "/";
      Var a = nn::LayerNorm(x);
      Var q = nn::Linear(a, p(n + "wq"), p(n + "bq"));
      Var k = nn::Linear(a, p(n + "wk"), p(n + "bk"));
      Var v = nn::Linear(a, p(n + "wv"), p(n + "bv"));
      Var att = nn::BlockAttention(q, k, v, batch.lengths, config_.heads);
      x = nn::Add(x, nn::Linear(att, p(n + "wo"), p(n + "bo")));
      Var f = nn::LayerNorm(x);
      Var hidden = nn::Gelu(nn::Linear(f, p(n + "w1"), p(n + "b1")));
      x = nn::Add(x, nn::Linear(hidden, p(n + "w2"), p(n + "b2")));
    }
    h = nn::LayerNorm(x);
    state = nn::Detach(h);
  } else {
    state = x;
    Var h1 = nn::Relu(nn::Linear(x, p("mlp/w1"), p("mlp/b1")));
    h = nn::Relu(nn::Linear(h1, p("mlp/w2"), p("mlp/b2")));
  }
  return {nn::Linear(h, p("head/w"), p("head/b")), state};
}

Tensor PolicyNetwork::Probabilities(const EmbeddedQuery& query) const {
  nn::Tape tape;
  Output out = Forward(tape, MakeBatch(config_, query), nullptr);
  return nn::Softmax(out.logits).value();
}

CriticNetwork::CriticNetwork(std::size_t d, std::uint64_t seed) {
  Rng rng(SubSeed(seed, 0xc417));
  params_.Add("w1", RandomMatrix(rng, d, d, FanIn(d) * std::sqrt(2.0)));
  params_.Add("b1", Tensor(1, d));
  params_.Add("w2", RandomMatrix(rng, d, d, FanIn(d) * std::sqrt(2.0)));
  params_.Add("b2", Tensor(1, d));
  params_.Add("w3", RandomMatrix(rng, d, 1, kHeadInitStd));
  params_.Add("b3", Tensor(1, 1));
}

Var CriticNetwork::Forward(nn::Tape& tape, Var states,
                           nn::Gradients* grads) const {
  const std::vector<Var> bound = tape.Bind(params_, grads);
  return Forward(tape, states, bound);
}

Var CriticNetwork::Forward(nn::Tape&, Var states,
                           std::span<const Var> bound) const {
  const Bound p(params_, bound);
  Var h1 = nn::Relu(nn::Linear(states, p("w1"), p("b1")));
  Var h2 = nn::Relu(nn::Linear(h1, p("w2"), p("b2")));
  return nn::Linear(h2, p("w3"), p("b3"));
}

Agent::Agent(const PolicyConfig& config, std::uint64_t seed)
    : policy(config, seed), critic(config.d, seed) {
  Rng rng(SubSeed(seed, 0x5eed));
  rng_state = rng.State();
}

RoutingPlan Agent::Act(const EmbeddedQuery& query, ActMode mode,
                       std::uint64_t seed) const {
  const EmbeddedQuery* one[] = {&query};
  const std::uint64_t seeds[] = {seed};
  return std::move(ActBatch(one, mode, seeds).front());
}

std::vector<RoutingPlan> Agent::ActBatch(
    std::span<const EmbeddedQuery* const> queries, ActMode mode,
    std::span<const std::uint64_t> seeds) const {
  if (mode == ActMode::kSample && seeds.size() != queries.size()) {
    throw ConfigError("act: one seed per query is required when sampling");
  }
  nn::Tape tape;
  tape.set_check_finite(false);
  const PolicyBatch batch = MakeBatch(policy.config(), queries);
  PolicyNetwork::Output out = policy.Forward(tape, batch, nullptr);
  const Tensor& logits = out.logits.value();
  const Tensor log_probs = nn::LogSoftmax(out.logits).value();
  const Tensor values = critic.Forward(tape, out.state, nullptr).value();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) {
      throw NumericsError("policy produced a non-finite logit");
    }
  }

  std::vector<RoutingPlan> plans(queries.size());
  std::size_t row = 0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    RoutingPlan& plan = plans[qi];
    Rng rng(mode == ActMode::kSample ? seeds[qi] : 0);
    for (std::size_t t = 0; t < batch.lengths[qi]; ++t, ++row) {
      const double lp_local = log_probs(row, 0);
      const double lp_remote = log_probs(row, 1);
      const double p_local = std::exp(lp_local);
      const double p_remote = std::exp(lp_remote);
      Action a;
      if (mode == ActMode::kGreedy) {
        a = logits(row, 1) > logits(row, 0) ? Action::kRemote : Action::kLocal;
      } else {
        a = rng.Uniform() < p_remote ? Action::kRemote : Action::kLocal;
      }
      plan.actions.push_back(a);
      plan.log_probs.push_back(a == Action::kRemote ? lp_remote : lp_local);
      plan.values.push_back(values(row, 0));
      double entropy = 0.0;
      if (p_local > 0.0) entropy -= p_local * lp_local;
      if (p_remote > 0.0) entropy -= p_remote * lp_remote;
      plan.entropy.push_back(entropy);
      plan.p_remote.push_back(p_remote);
    }
  }
  return plans;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

nlohmann::json TensorToJson(const Tensor& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void LoadInto(nn::ParameterSet& params, const nlohmann::json& stored,
              const std::string& prefix) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string key = prefix + params.name(i);
    if (!stored.contains(key)) {
      throw ParseError("checkpoint: missing parameter '" + key + "'");
    }
    const auto& rows = stored.at(key);
    Tensor& t = params[i];
    if (!rows.is_array() || rows.size() != t.rows()) {
      throw ParseError("checkpoint: parameter '" + key + "' has wrong shape, "
                       "expected " + t.ShapeString());
    }
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != t.cols()) {
        throw ParseError("checkpoint: parameter '" + key +
                         "' has wrong shape, expected " + t.ShapeString());
      }
      for (std::size_t c = 0; c < t.cols(); ++c) {
        t(r, c) = rows[r][c].get<double>();
      }
    }
  }
}

}  // namespace

std::string SerializeCheckpoint(const Agent& agent) {
  const PolicyConfig& cfg = agent.policy.config();
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["variant"] = std::string(VariantName(cfg.variant));
  j["d"] = cfg.d;
  j["heads"] = cfg.heads;
  j["layers"] = cfg.layers;
  j["ff_mult"] = cfg.ff_mult;
  j["use_positions"] = cfg.use_positions;
  nlohmann::json params = nlohmann::json::object();
  const auto& actor = agent.policy.params();
  for (std::size_t i = 0; i < actor.size(); ++i) {
    params[actor.name(i)] = TensorToJson(actor[i]);
  }
  const auto& critic = agent.critic.params();
  for (std::size_t i = 0; i < critic.size(); ++i) {
    params["critic/" + critic.name(i)] = TensorToJson(critic[i]);
  }
  j["parameters"] = std::move(params);
  j["sft_phase"] = agent.sft_phase;
  j["rng_state"] = agent.rng_state;
  return j.dump();
}

Agent ParseCheckpoint(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version");
    }
    PolicyConfig cfg;
    cfg.variant = ParseVariant(j.at("variant").get<std::string>());
    cfg.d = j.at("d").get<std::size_t>();
    cfg.heads = j.at("heads").get<std::size_t>();
    cfg.layers = j.at("layers").get<std::size_t>();
    cfg.ff_mult = j.value("ff_mult", std::size_t{4});
    cfg.use_positions = j.value("use_positions", true);
    Agent agent(cfg, 0);
    LoadInto(agent.policy.params(), j.at("parameters"), "");
    LoadInto(agent.critic.params(), j.at("parameters"), "critic/");
    agent.sft_phase = j.value("sft_phase", false);
    agent.rng_state = j.value("rng_state", "");
    return agent;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const Agent& agent, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << SerializeCheckpoint(agent);
}

Agent LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCheckpoint(buf.str());
}

}  // namespace chunkroute
