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


#include "chunkroute/embedding.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chunkroute/errors.h"
#include "chunkroute/rng.h"
#include "json.hpp"

namespace chunkroute {
namespace {

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kWordBasis = 0x84222325cbf29ce4ULL;

void AddFeature(std::vector<double>& out, std::uint64_t h) {
  const std::size_t bucket = static_cast<std::size_t>(h % out.size());
  out[bucket] += (h >> 63) != 0 ? -1.0 : 1.0;
}

void Normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ConfigError("embedding dimension must be >= 1");
}

std::vector<double> HashingEmbedder::EmbedText(std::string_view text) const {
  std::string lower = " ";
  for (char c : text) {
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  lower += ' ';
  std::vector<double> out(dim_, 0.0);
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= lower.size(); ++i) {
      AddFeature(out, Mix64(Fnv1a64(lower.data() + i, n, kFnvBasis) + n));
    }
  }
  std::size_t i = 0;
  while (i < lower.size()) {
    while (i < lower.size() &&
           !std::isalnum(static_cast<unsigned char>(lower[i]))) {
      ++i;
    }
    const std::size_t start = i;
    while (i < lower.size() &&
           std::isalnum(static_cast<unsigned char>(lower[i]))) {
      ++i;
    }
    if (i > start) {
      AddFeature(out, Mix64(Fnv1a64(lower.data() + start, i - start,
                                    kWordBasis)));
    }
  }
  Normalize(out);
  return out;
}

PrecomputedEmbedder PrecomputedEmbedder::FromJsonText(
    std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("embedding sidecar: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("vectors") ||
      !j["vectors"].is_object()) {
    throw ParseError("embedding sidecar: expected {dim, vectors}");
  }
  PrecomputedEmbedder out(j["dim"].get<std::size_t>());
  for (const auto& [text, vec] : j["vectors"].items()) {
    out.Add(text, vec.get<std::vector<double>>());
  }
  return out;
}

PrecomputedEmbedder PrecomputedEmbedder::LoadFile(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding sidecar " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str());
}

void PrecomputedEmbedder::Add(std::string text, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw ConfigError("precomputed vector for '" + text + "' has length " +
                      std::to_string(vector.size()) + ", expected " +
                      std::to_string(dim_));
  }
  std::vector<double> v(vector.begin(), vector.end());
  Normalize(v);
  vectors_[std::move(text)] = std::move(v);
}

std::vector<double> PrecomputedEmbedder::EmbedText(std::string_view text) const {
  auto it = vectors_.find(text);
  if (it == vectors_.end()) {
    throw LookupError("no precomputed embedding for chunk '" +
                      std::string(text) + "'");
  }
  return it->second;
}

nn::Tensor SinusoidalPositions(std::size_t n, std::size_t d) {
  nn::Tensor pe(n, d);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; 2 * k < d; ++k) {
      const double angle =
          static_cast<double>(t) /
          std::pow(10000.0, static_cast<double>(2 * k) / static_cast<double>(d));
      pe(t, 2 * k) = std::sin(angle);
      if (2 * k + 1 < d) pe(t, 2 * k + 1) = std::cos(angle);
    }
  }
  return pe;
}

nn::Tensor EmbeddedQuery::Input(bool with_positions) const {
  nn::Tensor x = vectors;
  const double scale = std::sqrt(static_cast<double>(dim()));
  for (double& v : x.values()) v *= scale;
  if (with_positions) x.AddInPlace(positional);
  return x;
}

EmbeddedQuery Embed(std::span<const Chunk> chunks,
                    const EmbeddingProvider& provider) {
  if (chunks.empty()) throw EmptyInputError("embed: no chunks");
  const std::size_t d = provider.dim();
  EmbeddedQuery out;
  out.vectors = nn::Tensor(chunks.size(), d);
  for (std::size_t t = 0; t < chunks.size(); ++t) {
    const std::vector<double> v = provider.EmbedText(chunks[t].text);
    std::copy(v.begin(), v.end(), out.vectors.data() + t * d);
  }
  out.positional = SinusoidalPositions(chunks.size(), d);
  return out;
}

}  // namespace chunkroute
