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

#ifndef CHUNKROUTE_PII_H_
#define CHUNKROUTE_PII_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkroute/query.h"

namespace chunkroute {

enum class RuleKind { kRegex, kGazetteer };

struct DetectorRule {
  PiiCategory category = PiiCategory::kPersonName;
  RuleKind kind = RuleKind::kRegex;
  // ECMAScript regex, for kRegex.
  std::string pattern;
  // Case-insensitive whole-phrase entries, for kGazetteer.
  std::vector<std::string> entries;
};

// Immutable, compiled set of detection rules. Copies share the compiled
// state; concurrent Detect() calls on one set are safe.
class DetectorRuleSet {
 public:
  // Throws ConfigError if a category has no rule or a pattern does not
  // compile.
  DetectorRuleSet(std::string version, std::vector<DetectorRule> rules);

  // Rules matched to the synthetic corpus value grammars.
  static DetectorRuleSet Default();

  // {version, rules:[{category, kind: "regex"|"gazetteer", pattern|entries}]}
  static DetectorRuleSet FromJsonText(std::string_view json);
  static DetectorRuleSet LoadFile(const std::filesystem::path& path);
  std::string ToJsonText() const;

  const std::string& version() const;
  const std::vector<DetectorRule>& rules() const;

 private:
  struct Compiled;
  std::shared_ptr<const Compiled> compiled_;

  friend struct DetectorAccess;
};

struct Detection {
  PiiCategory category = PiiCategory::kPersonName;
  Span span;
  std::string surface;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Non-overlapping detections: among overlapping candidates the leftmost
// wins, then the longest, then the earliest rule.
std::vector<Detection> Detect(std::string_view text,
                              const DetectorRuleSet& rules);

// Detections as PII units with ids "d0", "d1", ... (task_critical unknown,
// reported as false).
std::vector<PiiUnit> DetectionsToUnits(const std::vector<Detection>& found);

// Prompts that reached the remote model during one episode, and the ids of
// the query's PII units found in any of them.
struct RemoteExposure {
  std::vector<std::string> prompts;
  std::vector<std::string> matched_pii;
};

struct LeakageReport {
  double fraction = 0.0;
  // Set when the query has no PII; fraction is then 0 by convention.
  bool no_pii = false;
  std::vector<std::string> matched_pii;
};

// Lowercase + whitespace normalization used by the membership test.
std::string NormalizeForMatch(std::string_view text);

// True when the normalized `surface` occurs in any normalized prompt.
bool SurfaceExposed(std::string_view surface,
                    std::span<const std::string> normalized_prompts);

// Builds the exposure record for `prompts`.
RemoteExposure Expose(std::span<const PiiUnit> pii,
                      std::vector<std::string> prompts);

// Fraction of units whose full surface occurs (case-insensitive,
// whitespace-normalized) in at least one remote prompt.
LeakageReport ComputeLeakage(std::span<const PiiUnit> pii,
                             std::span<const std::string> prompts);
double Leakage(std::span<const PiiUnit> pii, const RemoteExposure& exposure);

// Share of episodes whose leakage is strictly above 0.8. Throws
// EmptyInputError for an empty list and ValidationError for values outside
// [0, 1].
double CatastrophicRate(std::span<const double> leak_fractions);

inline constexpr double kCatastrophicThreshold = 0.8;

}  // namespace chunkroute

#endif  // CHUNKROUTE_PII_H_
