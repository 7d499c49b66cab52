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


#ifndef CHUNKROUTE_GATEWAY_H_
#define CHUNKROUTE_GATEWAY_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/embedding.h"
#include "chunkroute/errors.h"
#include "chunkroute/pii.h"
#include "chunkroute/policy.h"

namespace chunkroute {

// A chat-completion-compatible model endpoint. Requests go to
// base_url + "/chat/completions" with {"model", "messages"}.
struct EndpointConfig {
  std::string role;  // "local" or "remote"
  std::string base_url;
  std::string model;
  // Environment variable holding a bearer token; empty for none.
  std::string auth_env;
  int timeout_ms = 30000;
  int max_retries = 1;

  void Validate() const;
};

inline constexpr std::string_view kDefaultCompositionTemplate =
    "Answer the user's query. Partial answers for each part of the query "
    "are listed in order.\n\n{responses}\n\nQuery:\n{query}";

struct GatewayConfig {
  EndpointConfig local;
  EndpointConfig remote;
  std::filesystem::path checkpoint;
  // Empty means the built-in rule set.
  std::filesystem::path detector_rules;
  // {responses} and {query} are substituted.
  std::string composition_template = std::string(kDefaultCompositionTemplate);
  std::string host = "127.0.0.1";
  int port = 8080;

  static GatewayConfig FromJsonText(std::string_view json_text);
  // Relative checkpoint and rule paths resolve against the file's directory.
  static GatewayConfig LoadFile(const std::filesystem::path& path);
  void Validate() const;
};

struct HttpReply {
  // 0 when the request never got a response.
  int status = 0;
  std::string body;
  std::string error;
};

// Outbound HTTP used by the router. Implementations must be safe to call
// from several threads.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpReply PostJson(const EndpointConfig& endpoint,
                             const std::string& path,
                             const std::string& body) = 0;
};

// Plain-HTTP client with per-endpoint timeout, retries and bearer token.
std::unique_ptr<Transport> MakeHttpTransport();

// {"model": ..., "messages": [{"role": "user", "content": prompt}]}
std::string ChatRequestBody(const std::string& model, const std::string& prompt);
// choices[0].message.content; throws ParseError when absent.
std::string ChatResponseContent(std::string_view body);

// The local model failed; the service answers 502.
class UpstreamError : public Error {
 public:
  using Error::Error;
};

struct ChunkRoute {
  std::string text;
  Action action = Action::kLocal;
  // "local", "remote", "local-fallback", or "none" on dry runs.
  std::string model_used;
  std::string output;
  double latency_ms = 0.0;
};

struct RouteResult {
  bool dry_run = false;
  std::string final_text;
  std::vector<ChunkRoute> chunks;
  std::vector<Detection> detected_pii;
  // Leakage against the detector's findings, over the bodies sent remote.
  double leakage = 0.0;
  bool no_pii = false;
  std::vector<std::string> warnings;
  // Remote request bodies, in send order (failed attempts included).
  std::vector<std::string> remote_bodies;
  double total_ms = 0.0;

  std::string ToJson() const;
};

// Applies a trained policy to live text. Immutable after construction and
// safe to share across request threads.
class Router {
 public:
  // `transport` may be null, in which case only dry runs are possible.
  Router(Agent agent, DetectorRuleSet rules, GatewayConfig config,
         std::shared_ptr<Transport> transport);

  // Throws EmptyInputError on blank text, AlignmentError when a detected
  // PII span crosses a sentence boundary, UpstreamError when the local
  // endpoint fails.
  RouteResult Route(std::string_view text, bool dry_run) const;

  const GatewayConfig& config() const { return config_; }

 private:
  std::string Call(const EndpointConfig& endpoint, const std::string& prompt,
                   std::vector<std::string>* sent_bodies,
                   std::string* error) const;

  Agent agent_;
  DetectorRuleSet rules_;
  GatewayConfig config_;
  HashingEmbedder embedder_;
  std::shared_ptr<Transport> transport_;
};

// POST /v1/route {text, dry_run?} and GET /healthz.
class GatewayServer {
 public:
  explicit GatewayServer(std::shared_ptr<const Router> router);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chunkroute

#endif  // CHUNKROUTE_GATEWAY_H_
