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


#include "chunkroute/gateway.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "chunkroute/chunker.h"
#include "httplib.h"
#include "json.hpp"

namespace chunkroute {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

EndpointConfig EndpointFromJson(const json& j, const std::string& role) {
  EndpointConfig e;
  e.role = role;
  e.base_url = j.at("base_url").get<std::string>();
  e.model = j.value("model", "");
  e.auth_env = j.value("auth_env", "");
  e.timeout_ms = j.value("timeout_ms", 30000);
  e.max_retries = j.value("max_retries", 1);
  return e;
}

// "http://host:port/prefix" -> ("http://host:port", "/prefix").
std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

class HttpTransport final : public Transport {
 public:
  HttpReply PostJson(const EndpointConfig& endpoint, const std::string& path,
                     const std::string& body) override {
    const auto [origin, prefix] = SplitUrl(endpoint.base_url);
    httplib::Client client(origin);
    const auto ms = std::chrono::milliseconds(endpoint.timeout_ms);
    client.set_connection_timeout(ms);
    client.set_read_timeout(ms);
    client.set_write_timeout(ms);
    httplib::Headers headers;
    if (!endpoint.auth_env.empty()) {
      if (const char* token = std::getenv(endpoint.auth_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }
    HttpReply reply;
    auto res = client.Post(prefix + path, headers, body, "application/json");
    if (!res) {
      reply.error = httplib::to_string(res.error());
      return reply;
    }
    reply.status = res->status;
    reply.body = res->body;
    return reply;
  }
};

std::string ReplaceAll(std::string text, std::string_view key,
                       const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

void EndpointConfig::Validate() const {
  if (base_url.empty()) throw ConfigError(role + " endpoint: base_url is empty");
  if (base_url.rfind("http://", 0) != 0) {
    throw ConfigError(role + " endpoint: only http:// URLs are supported");
  }
  if (timeout_ms <= 0) throw ConfigError(role + " endpoint: timeout_ms must be > 0");
  if (max_retries < 0) throw ConfigError(role + " endpoint: max_retries must be >= 0");
}

GatewayConfig GatewayConfig::FromJsonText(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("gateway config: ") + e.what());
  }
  try {
    GatewayConfig c;
    c.local = EndpointFromJson(j.at("local"), "local");
    c.remote = EndpointFromJson(j.at("remote"), "remote");
    c.checkpoint = j.value("checkpoint", "");
    c.detector_rules = j.value("detector_rules", "");
    c.composition_template =
        j.value("composition_template", std::string(kDefaultCompositionTemplate));
    c.host = j.value("host", "127.0.0.1");
    c.port = j.value("port", 8080);
    c.Validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("gateway config: ") + e.what());
  }
}

GatewayConfig GatewayConfig::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open gateway config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  GatewayConfig c = FromJsonText(buf.str());
  const std::filesystem::path base = path.parent_path();
  for (std::filesystem::path* p : {&c.checkpoint, &c.detector_rules}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return c;
}

void GatewayConfig::Validate() const {
  local.Validate();
  remote.Validate();
  if (port < 0 || port > 65535) throw ConfigError("gateway port out of range");
}

std::unique_ptr<Transport> MakeHttpTransport() {
  return std::make_unique<HttpTransport>();
}

std::string ChatRequestBody(const std::string& model, const std::string& prompt) {
  json j;
  j["model"] = model;
  j["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  return j.dump();
}

std::string ChatResponseContent(std::string_view body) {
  try {
    const json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("chat response: ") + e.what());
  }
}

std::string RouteResult::ToJson() const {
  json j;
  j["dry_run"] = dry_run;
  j["final_text"] = final_text;
  json chunk_rows = json::array();
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const ChunkRoute& c = chunks[i];
    chunk_rows.push_back({{"index", i},
                          {"text", c.text},
                          {"action", std::string(ActionName(c.action))},
                          {"model_used", c.model_used},
                          {"output", c.output},
                          {"latency_ms", c.latency_ms}});
  }
  j["chunks"] = std::move(chunk_rows);
  json pii = json::array();
  for (const Detection& d : detected_pii) {
    pii.push_back({{"category", std::string(CategoryName(d.category))},
                   {"surface", d.surface},
                   {"span", {d.span.start, d.span.end}}});
  }
  j["detected_pii"] = std::move(pii);
  j["detected_pii_leakage"] = leakage;
  j["no_pii"] = no_pii;
  j["warnings"] = warnings;
  j["remote_requests"] = remote_bodies.size();
  j["timing"] = {{"total_ms", total_ms}};
  return j.dump();
}

Router::Router(Agent agent, DetectorRuleSet rules, GatewayConfig config,
               std::shared_ptr<Transport> transport)
    : agent_(std::move(agent)),
      rules_(std::move(rules)),
      config_(std::move(config)),
      embedder_(agent_.policy.config().d),
      transport_(std::move(transport)) {}

std::string Router::Call(const EndpointConfig& endpoint,
                         const std::string& prompt,
                         std::vector<std::string>* sent_bodies,
                         std::string* error) const {
  const std::string body = ChatRequestBody(endpoint.model, prompt);
  error->clear();
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (sent_bodies != nullptr) sent_bodies->push_back(body);
    const HttpReply reply =
        transport_->PostJson(endpoint, "/chat/completions", body);
    if (reply.status == 200) {
      try {
        return ChatResponseContent(reply.body);
      } catch (const ParseError& e) {
        *error = endpoint.role + " endpoint: " + e.what();
        return {};
      }
    }
    *error = endpoint.role + " endpoint: " +
             (reply.status == 0 ? reply.error
                                : "HTTP " + std::to_string(reply.status));
    // Client errors will not improve on retry.
    if (reply.status >= 400 && reply.status < 500) break;
  }
  return {};
}

RouteResult Router::Route(std::string_view text, bool dry_run) const {
  const auto start = Clock::now();
  RouteResult result;
  result.dry_run = dry_run;
  std::vector<Chunk> chunks = Segment(text);
  result.detected_pii = Detect(text, rules_);
  const std::vector<PiiUnit> units = DetectionsToUnits(result.detected_pii);
  chunks = AttachPii(std::move(chunks), units);
  const EmbeddedQuery embedded = Embed(chunks, embedder_);
  const RoutingPlan plan = agent_.Act(embedded, ActMode::kGreedy);

  std::vector<std::string> remote_prompts;
  for (std::size_t t = 0; t < chunks.size(); ++t) {
    ChunkRoute c;
    c.text = chunks[t].text;
    c.action = plan.actions[t];
    c.model_used = "none";
    result.chunks.push_back(std::move(c));
  }

  if (dry_run) {
    for (const ChunkRoute& c : result.chunks) {
      if (c.action == Action::kRemote) remote_prompts.push_back(c.text);
    }
  } else {
    if (!transport_) throw ConfigError("router has no transport configured");
    std::string error;
    for (ChunkRoute& c : result.chunks) {
      const auto chunk_start = Clock::now();
      if (c.action == Action::kRemote) {
        // Only this chunk's own text goes into the remote body.
        const std::size_t before = result.remote_bodies.size();
        c.output = Call(config_.remote, c.text, &result.remote_bodies, &error);
        for (std::size_t i = before; i < result.remote_bodies.size(); ++i) {
          remote_prompts.push_back(c.text);
        }
        if (error.empty()) {
          c.model_used = "remote";
        } else {
          result.warnings.push_back(error + "; chunk answered locally");
          c.output = Call(config_.local, c.text, nullptr, &error);
          if (!error.empty()) throw UpstreamError(error);
          c.model_used = "local-fallback";
        }
      } else {
        c.output = Call(config_.local, c.text, nullptr, &error);
        if (!error.empty()) throw UpstreamError(error);
        c.model_used = "local";
      }
      c.latency_ms = MillisSince(chunk_start);
    }
    std::string responses;
    for (std::size_t i = 0; i < result.chunks.size(); ++i) {
      if (i > 0) responses += "\n";
      responses += "[" + std::to_string(i + 1) + "] " + result.chunks[i].output;
    }
    std::string prompt =
        ReplaceAll(config_.composition_template, "{responses}", responses);
    prompt = ReplaceAll(std::move(prompt), "{query}", std::string(text));
    result.final_text = Call(config_.local, prompt, nullptr, &error);
    if (!error.empty()) throw UpstreamError(error);
  }

  const LeakageReport leak = ComputeLeakage(units, remote_prompts);
  result.leakage = leak.fraction;
  result.no_pii = leak.no_pii;
  result.total_ms = MillisSince(start);
  return result;
}

// ---------------------------------------------------------------------------
// HTTP service

struct GatewayServer::Impl {
  std::shared_ptr<const Router> router;
  httplib::Server server;
  std::thread thread;
};

namespace {

std::string ErrorBody(const std::string& kind, const std::string& message) {
  return json{{"error", {{"type", kind}, {"message", message}}}}.dump();
}

}  // namespace

GatewayServer::GatewayServer(std::shared_ptr<const Router> router)
    : impl_(std::make_unique<Impl>()) {
  impl_->router = std::move(router);
  const Router* r = impl_->router.get();
  impl_->server.Get("/healthz", [](const httplib::Request&,
                                   httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  impl_->server.Post("/v1/route", [r](const httplib::Request& req,
                                      httplib::Response& res) {
    std::string text;
    bool dry_run = false;
    try {
      const json body = json::parse(req.body);
      text = body.at("text").get<std::string>();
      dry_run = body.value("dry_run", false);
    } catch (const json::exception& e) {
      res.status = 400;
      res.set_content(ErrorBody("bad_request", e.what()), "application/json");
      return;
    }
    try {
      const RouteResult result = r->Route(text, dry_run);
      res.set_content(result.ToJson(), "application/json");
    } catch (const UpstreamError& e) {
      res.status = 502;
      res.set_content(ErrorBody("local_endpoint_failed", e.what()),
                      "application/json");
    } catch (const EmptyInputError& e) {
      res.status = 400;
      res.set_content(ErrorBody("empty_input", e.what()), "application/json");
    } catch (const AlignmentError& e) {
      res.status = 422;
      res.set_content(ErrorBody("pii_crosses_sentence", e.what()),
                      "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(ErrorBody("internal", e.what()), "application/json");
    }
  });
}

GatewayServer::~GatewayServer() { Stop(); }

int GatewayServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void GatewayServer::Run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void GatewayServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace chunkroute
