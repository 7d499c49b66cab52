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

#include "chunkroute/chunker.h"

#include <algorithm>
#include <array>

#include "chunkroute/errors.h"

namespace chunkroute {
namespace {

constexpr std::array<std::string_view, 22> kAbbreviations = {
    "dr.",  "mr.",  "mrs.", "ms.",  "prof.", "sr.",  "jr.",  "st.",
    "ave.", "no.",  "e.g.", "i.e.", "vs.",   "etc.", "approx.", "dept.",
    "inc.", "ltd.", "mt.",  "ft.",  "u.s.",  "a.m.",
};

// ASCII-only classification; locale-independent so segmentation is
// byte-identical everywhere.
bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }
char ToLower(char c) { return IsUpper(c) ? static_cast<char>(c + 32) : c; }

bool IsTerminator(char c) { return c == '.' || c == '?' || c == '!'; }
bool IsCloser(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']';
}
bool IsOpener(char c) { return c == '"' || c == '\'' || c == '('; }

// True when the token ending at `period` (inclusive) is an abbreviation.
bool EndsWithAbbreviation(std::string_view text, std::size_t period) {
  std::size_t begin = period;
  while (begin > 0 && !IsSpace(text[begin - 1]) && text[begin - 1] != '(' &&
         text[begin - 1] != '"') {
    --begin;
  }
  std::string token;
  for (std::size_t i = begin; i <= period; ++i) token += ToLower(text[i]);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) !=
         kAbbreviations.end();
}

}  // namespace

std::span<const std::string_view> Abbreviations() { return kAbbreviations; }

std::vector<Chunk> Segment(std::string_view text) {
  const std::size_t n = text.size();
  std::size_t first = 0;
  while (first < n && IsSpace(text[first])) ++first;
  if (first == n) throw EmptyInputError("segment: empty or whitespace-only text");

  std::vector<Chunk> chunks;
  auto emit = [&](std::size_t start, std::size_t end) {
    while (end > start && IsSpace(text[end - 1])) --end;
    if (end == start) return;
    Chunk c;
    c.index = chunks.size();
    c.span = {start, end};
    c.text = std::string(text.substr(start, end - start));
    chunks.push_back(std::move(c));
  };

  std::size_t start = first;
  std::size_t i = first;
  while (i < n) {
    if (!IsTerminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t terminator = i;
    std::size_t j = i + 1;
    while (j < n && (IsTerminator(text[j]) || IsCloser(text[j]))) ++j;
    if (j >= n || !IsSpace(text[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < n && IsSpace(text[k])) ++k;
    if (k >= n) break;
    const char next = text[k];
    const bool starts_sentence = IsUpper(next) || IsDigit(next) || IsOpener(next);
    const bool abbreviation =
        text[terminator] == '.' && j == terminator + 1 &&
        EndsWithAbbreviation(text, terminator);
    if (starts_sentence && !abbreviation) {
      emit(start, j);
      start = k;
    }
    i = k;
  }
  emit(start, n);
  return chunks;
}

std::vector<Chunk> AttachPii(std::vector<Chunk> chunks,
                             std::span<const PiiUnit> pii) {
  for (auto& c : chunks) c.pii_ids.clear();
  for (const PiiUnit& unit : pii) {
    std::size_t owner = chunks.size();
    std::size_t hits = 0;
    for (const Chunk& c : chunks) {
      if (c.span.Intersects(unit.span)) {
        ++hits;
        owner = c.index;
      }
    }
    if (hits != 1 || !chunks[owner].span.Contains(unit.span)) {
      throw AlignmentError("pii unit '" + unit.id + "' (\"" + unit.surface +
                           "\") is not contained in exactly one chunk");
    }
    chunks[owner].pii_ids.push_back(unit.id);
  }
  return chunks;
}

std::vector<Chunk> ChunkQuery(const Query& query) {
  return AttachPii(Segment(query.text), query.pii);
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace chunkroute
