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

#ifndef CHUNKROUTE_CHUNKER_H_
#define CHUNKROUTE_CHUNKER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/query.h"

namespace chunkroute {

struct Chunk {
  std::size_t index = 0;
  std::string text;
  Span span;
  std::vector<std::string> pii_ids;

  bool has_pii() const { return !pii_ids.empty(); }
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Rule-based sentence segmentation.
//
// A sentence ends at '.', '?' or '!' (plus any trailing terminators and
// closing quotes or brackets) when followed by whitespace and then an
// uppercase letter, digit or opening quote. A period closing a known
// abbreviation ("Dr.", "e.g.", "St.", ...) never ends a sentence. Chunk spans
// start at the first non-whitespace character and are non-overlapping.
//
// Throws EmptyInputError when `text` is empty or whitespace-only.
std::vector<Chunk> Segment(std::string_view text);

// Lowercased abbreviations (with their final period) that never end a
// sentence.
std::span<const std::string_view> Abbreviations();

// Fills pii_ids by span intersection. Throws AlignmentError naming the unit
// if a PII span intersects more than one chunk or none.
std::vector<Chunk> AttachPii(std::vector<Chunk> chunks,
                             std::span<const PiiUnit> pii);

// Segment + AttachPii for an annotated query.
std::vector<Chunk> ChunkQuery(const Query& query);

// Collapses whitespace runs to single spaces and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

}  // namespace chunkroute

#endif  // CHUNKROUTE_CHUNKER_H_
