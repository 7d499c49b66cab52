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

#ifndef CHUNKROUTE_CORPUS_H_
#define CHUNKROUTE_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/query.h"

namespace chunkroute {

// Knobs of the synthetic PII-dense corpus.
struct GenerationProfile {
  std::string domain = "medical";
  // Target mean number of PII units per query.
  double mean_pii = 4.6;
  // Target mean number of sentences (chunks) per query; at most 12.
  double mean_chunks = 6.0;
  // Probability that a PII-bearing sentence is one whose handling needs the
  // PII (a hard, task-critical sentence).
  double task_critical_fraction = 0.25;
  // Probability that a query contains a cross-sentence dependency.
  double dependency_rate = 0.3;
  // Probability that a dependent sentence is hard rather than easy.
  double dependent_hard_fraction = 0.7;
  // Probability that a PII-free filler sentence is hard.
  double hard_fraction = 0.35;
  // Difficulty bands of easy and hard sentences.
  double easy_min = 0.10, easy_max = 0.45;
  double hard_min = 0.65, hard_max = 0.90;
  // Every sentence carries PII (no PII-free fillers).
  bool pii_in_every_sentence = false;

  // Throws ConfigError on out-of-range or unachievable settings.
  void Validate() const;

  // Named presets: "medical" (the default), "dependency-heavy",
  // "high-risk" (hard, PII-dense queries), "pii-only".
  static GenerationProfile Named(std::string_view name);
};

// Largest mean PII count the template bank can realize.
double MaxAchievablePii(const GenerationProfile& profile);

// Deterministic function of (seed, n, profile). Every query has at least one
// PII unit, spans that match the text, and a SimAnnotation aligned with
// Segment().
std::vector<AnnotatedQuery> GenerateCorpus(std::uint64_t seed, std::size_t n,
                                           const GenerationProfile& profile);

// Seeded shuffle into train/test with |test| = floor(n * test_fraction).
// Queries keep their original relative order within each side.
CorpusSplit MakeSplit(std::vector<AnnotatedQuery> queries,
                      double test_fraction, std::uint64_t seed);

inline constexpr int kCorpusSchemaVersion = 1;

// One JSON object per line. Lines carry a "split" field ("train"/"test").
void SaveCorpus(const CorpusSplit& split, const std::filesystem::path& path);
std::string SerializeCorpus(const CorpusSplit& split);
// Missing "split" means train. An empty file is an empty corpus. Throws
// ParseError (with line number and field) on malformed lines and
// ValidationError (with query id) on invariant violations.
CorpusSplit LoadCorpus(const std::filesystem::path& path);
CorpusSplit ParseCorpus(std::string_view jsonl);

enum class LintRule { kConsistency, kCoherence, kAlignment };

struct LintViolation {
  LintRule rule;
  std::string message;
};

std::string_view LintRuleName(LintRule rule);

// Machine-checkable quality rules:
//  - consistency: a single-valued attribute (date of birth, record number,
//    insurance, patient name) given two different values, an age that
//    contradicts the date of birth, or a PII surface repeated elsewhere;
//  - coherence: a PII category placed in a template slot that does not allow
//    it (generated queries only);
//  - alignment: annotation length, dependency indices or PII spans that do
//    not line up with the canonical chunking.
std::vector<LintViolation> LintInstance(const Query& query,
                                        const SimAnnotation& annotation);

// Reference year used for age / date-of-birth consistency.
inline constexpr int kReferenceYear = 2024;

}  // namespace chunkroute

#endif  // CHUNKROUTE_CORPUS_H_
