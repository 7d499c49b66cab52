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


#ifndef CHUNKROUTE_EMBEDDING_H_
#define CHUNKROUTE_EMBEDDING_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/chunker.h"
#include "chunkroute/tensor.h"

namespace chunkroute {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

// Frozen per-chunk feature extractor. Implementations return L2-normalized
// vectors of length dim().
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> EmbedText(std::string_view text) const = 0;
};

// Signed feature hashing of lowercased character 3- to 5-grams and word
// unigrams. The text is padded with one space on each side so that word
// boundaries show up in the character grams.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = kDefaultEmbeddingDim);
  std::size_t dim() const override { return dim_; }
  std::vector<double> EmbedText(std::string_view text) const override;

 private:
  std::size_t dim_;
};

// Vectors computed offline and keyed by exact chunk text. Sidecar format:
// {"dim": d, "vectors": {"<chunk text>": [v0, v1, ...], ...}}.
class PrecomputedEmbedder final : public EmbeddingProvider {
 public:
  explicit PrecomputedEmbedder(std::size_t dim) : dim_(dim) {}
  static PrecomputedEmbedder FromJsonText(std::string_view json_text);
  static PrecomputedEmbedder LoadFile(const std::filesystem::path& path);

  // Stores a normalized copy. Throws ConfigError on a length mismatch.
  void Add(std::string text, std::span<const double> vector);
  std::size_t dim() const override { return dim_; }
  // Throws LookupError naming the chunk when the text is unknown.
  std::vector<double> EmbedText(std::string_view text) const override;

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<double>, std::less<>> vectors_;
};

// Standard sinusoidal encodings: row t, columns 2k and 2k+1 hold
// sin(t / 10000^(2k/d)) and cos(t / 10000^(2k/d)).
nn::Tensor SinusoidalPositions(std::size_t n, std::size_t d);

struct EmbeddedQuery {
  // n x d, one L2-normalized row per chunk.
  nn::Tensor vectors;
  // n x d sinusoidal encodings.
  nn::Tensor positional;

  std::size_t n() const { return vectors.rows(); }
  std::size_t dim() const { return vectors.cols(); }
  // Network input: sqrt(d) * vectors, plus positional when requested.
  nn::Tensor Input(bool with_positions) const;
};

// Throws EmptyInputError on zero chunks.
EmbeddedQuery Embed(std::span<const Chunk> chunks,
                    const EmbeddingProvider& provider);

}  // namespace chunkroute

#endif  // CHUNKROUTE_EMBEDDING_H_
