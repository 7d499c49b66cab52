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

#include "chunkroute/pii.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "chunkroute/chunker.h"
#include "chunkroute/errors.h"
#include "chunkroute/lexicon.h"
#include "json.hpp"

namespace chunkroute {

using nlohmann::json;

struct DetectorRuleSet::Compiled {
  std::string version;
  std::vector<DetectorRule> rules;
  // Parallel to `rules`; only regex rules have a compiled pattern.
  std::vector<std::regex> patterns;
  // Parallel to `rules`; lowercased gazetteer entries.
  std::vector<std::vector<std::string>> entries;
};

struct DetectorAccess {
  static const DetectorRuleSet::Compiled& Get(const DetectorRuleSet& s) {
    return *s.compiled_;
  }
};

namespace {

bool IsAlnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

std::string Alternation(std::span<const std::string_view> words) {
  std::string out = "(?:";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += "|";
    out += words[i];
  }
  return out + ")";
}

std::vector<std::string> Entries(std::span<const std::string_view> words) {
  return {words.begin(), words.end()};
}

DetectorRule Regex(PiiCategory c, std::string pattern) {
  return DetectorRule{c, RuleKind::kRegex, std::move(pattern), {}};
}

DetectorRule Gazetteer(PiiCategory c, std::vector<std::string> entries) {
  return DetectorRule{c, RuleKind::kGazetteer, {}, std::move(entries)};
}

}  // namespace

DetectorRuleSet::DetectorRuleSet(std::string version,
                                 std::vector<DetectorRule> rules) {
  auto compiled = std::make_shared<Compiled>();
  compiled->version = std::move(version);
  std::set<PiiCategory> covered;
  for (const DetectorRule& rule : rules) {
    covered.insert(rule.category);
    if (rule.kind == RuleKind::kRegex) {
      try {
        compiled->patterns.emplace_back(rule.pattern,
                                        std::regex::ECMAScript |
                                            std::regex::optimize);
      } catch (const std::regex_error& e) {
        throw ConfigError("detector rule for " +
                          std::string(CategoryName(rule.category)) +
                          ": invalid pattern: " + e.what());
      }
      compiled->entries.emplace_back();
    } else {
      if (rule.entries.empty()) {
        throw ConfigError("gazetteer rule for " +
                          std::string(CategoryName(rule.category)) +
                          " has no entries");
      }
      compiled->patterns.emplace_back();
      std::vector<std::string> lowered;
      for (const auto& e : rule.entries) lowered.push_back(Lower(e));
      compiled->entries.push_back(std::move(lowered));
    }
  }
  for (PiiCategory c : kAllCategories) {
    if (!covered.contains(c)) {
      throw ConfigError("detector rule set has no rule for category " +
                        std::string(CategoryName(c)));
    }
  }
  compiled->rules = std::move(rules);
  compiled_ = std::move(compiled);
}

DetectorRuleSet DetectorRuleSet::Default() {
  using lexicon::Airlines;
  std::vector<DetectorRule> rules;
  rules.push_back(Regex(PiiCategory::kPersonName,
                        "\\b" + Alternation(lexicon::PatientFirstNames()) +
                            " " + Alternation(lexicon::PatientLastNames()) +
                            "\\b"));
  rules.push_back(
      Regex(PiiCategory::kDateOfBirth, "\\b\\d{2}/\\d{2}/\\d{4}\\b"));
  rules.push_back(Regex(PiiCategory::kMedicalRecordNumber,
                        "\\b[A-Z]{2,3}-\\d{5}(?:-[A-Z])?\\b"));
  rules.push_back(Regex(PiiCategory::kPhone, "\\b\\d{3}-\\d{3}-\\d{4}\\b"));
  rules.push_back(
      Regex(PiiCategory::kEmail,
            "\\b[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\\.[A-Za-z0-9-]+)*"
            "\\.[A-Za-z]{2,}\\b"));
  rules.push_back(Regex(PiiCategory::kClinicianName,
                        "\\bDr\\. [A-Z][a-z]+ [A-Z][A-Za-z'-]+\\b"));
  rules.push_back(
      Gazetteer(PiiCategory::kFacilityName, Entries(lexicon::Facilities())));
  rules.push_back(
      Gazetteer(PiiCategory::kDepartment, Entries(lexicon::Departments())));
  rules.push_back(Regex(PiiCategory::kInsurance,
                        "\\b(?:Aetna|Cigna|Humana|UnitedHealthcare|"
                        "Independence|Kaiser|Anthem|Medicare)"
                        "(?: [A-Z][A-Za-z]*)* #\\d{3}-\\d{3}-\\d{3}\\b"));
  rules.push_back(Regex(PiiCategory::kPharmacy,
                        "\\b" + Alternation(lexicon::Pharmacies()) +
                            " on [A-Z][a-z]+ (?:St|Ave|Street|Avenue)\\b"));
  rules.push_back(Regex(PiiCategory::kDate,
                        "\\b(?:1[0-2]|0?[1-9])/(?:3[01]|[12]\\d|0?[1-9])\\b"
                        "(?!/)"));
  rules.push_back(Regex(PiiCategory::kDate,
                        "\\b" + Alternation(lexicon::Months()) +
                            " \\d{1,2}(?:st|nd|rd|th)?(?:, \\d{4})?\\b"));
  rules.push_back(Regex(PiiCategory::kTime,
                        "\\b(?:1[0-2]|0?[1-9]):[0-5]\\d ?(?:AM|PM|am|pm)\\b"));
  rules.push_back(
      Regex(PiiCategory::kStreetAddress,
            "\\b\\d{2,5} [A-Z][a-z]+ (?:St|Ave|Street|Avenue|Rd|Road|Blvd)\\b"));
  rules.push_back(Regex(PiiCategory::kCityState,
                        "\\b[A-Z][a-z]+(?: [A-Z][a-z]+)?, "
                        "(?:PA|NJ|DE|MD|FL|NY|VA|CT|MA|OH|CA|TX|IL|GA|NC)\\b"));
  rules.push_back(Regex(PiiCategory::kTravelIdentifier,
                        "\\b(?:(?:United|Delta|American|JetBlue|Southwest) "
                        "Flight )?(?:UA|DL|AA|B6|WN)\\d{3,4}\\b"));
  rules.push_back(
      Gazetteer(PiiCategory::kWorkplace, Entries(lexicon::Workplaces())));
  rules.push_back(Regex(PiiCategory::kVehicle, "\\b[A-Z]{3}-\\d{4}\\b"));
  return DetectorRuleSet("default-1", std::move(rules));
}

DetectorRuleSet DetectorRuleSet::FromJsonText(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("detector rules: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw ParseError("detector rules: expected an object with a 'rules' array");
  }
  std::vector<DetectorRule> rules;
  for (const auto& r : doc["rules"]) {
    const auto category = ParseCategory(r.value("category", ""));
    if (!category) {
      throw ParseError("detector rules: unknown category '" +
                       r.value("category", "") + "'");
    }
    const std::string kind = r.value("kind", "");
    if (kind == "regex") {
      rules.push_back(Regex(*category, r.value("pattern", "")));
    } else if (kind == "gazetteer") {
      rules.push_back(Gazetteer(
          *category, r.value("entries", std::vector<std::string>{})));
    } else {
      throw ParseError("detector rules: unknown rule kind '" + kind + "'");
    }
  }
  return DetectorRuleSet(doc.value("version", "unversioned"), std::move(rules));
}

DetectorRuleSet DetectorRuleSet::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open detector rules " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str());
}

std::string DetectorRuleSet::ToJsonText() const {
  json doc;
  doc["version"] = compiled_->version;
  doc["rules"] = json::array();
  for (const auto& rule : compiled_->rules) {
    json r;
    r["category"] = std::string(CategoryName(rule.category));
    if (rule.kind == RuleKind::kRegex) {
      r["kind"] = "regex";
      r["pattern"] = rule.pattern;
    } else {
      r["kind"] = "gazetteer";
      r["entries"] = rule.entries;
    }
    doc["rules"].push_back(std::move(r));
  }
  return doc.dump(2);
}

const std::string& DetectorRuleSet::version() const {
  return compiled_->version;
}

const std::vector<DetectorRule>& DetectorRuleSet::rules() const {
  return compiled_->rules;
}

std::vector<Detection> Detect(std::string_view text,
                              const DetectorRuleSet& rules) {
  struct Candidate {
    Span span;
    std::size_t rule;
  };
  const auto& compiled = DetectorAccess::Get(rules);
  std::vector<Candidate> candidates;
  const std::string lowered = Lower(text);
  for (std::size_t r = 0; r < compiled.rules.size(); ++r) {
    if (compiled.rules[r].kind == RuleKind::kRegex) {
      auto begin = std::cregex_iterator(text.data(), text.data() + text.size(),
                                        compiled.patterns[r]);
      for (auto it = begin; it != std::cregex_iterator(); ++it) {
        const auto pos = static_cast<std::size_t>(it->position(0));
        const auto len = static_cast<std::size_t>(it->length(0));
        if (len > 0) candidates.push_back({{pos, pos + len}, r});
      }
    } else {
      for (const std::string& entry : compiled.entries[r]) {
        std::size_t pos = lowered.find(entry);
        while (pos != std::string::npos) {
          const std::size_t end = pos + entry.size();
          const bool left_ok = pos == 0 || !IsAlnum(lowered[pos - 1]);
          const bool right_ok = end == lowered.size() || !IsAlnum(lowered[end]);
          if (left_ok && right_ok) candidates.push_back({{pos, end}, r});
          pos = lowered.find(entry, pos + 1);
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.span.start != b.span.start) {
                return a.span.start < b.span.start;
              }
              if (a.span.length() != b.span.length()) {
                return a.span.length() > b.span.length();
              }
              return a.rule < b.rule;
            });
  std::vector<Detection> out;
  std::size_t frontier = 0;
  for (const Candidate& c : candidates) {
    if (c.span.start < frontier) continue;
    out.push_back({compiled.rules[c.rule].category, c.span,
                   std::string(text.substr(c.span.start, c.span.length()))});
    frontier = c.span.end;
  }
  return out;
}

std::vector<PiiUnit> DetectionsToUnits(const std::vector<Detection>& found) {
  std::vector<PiiUnit> units;
  units.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    units.push_back(PiiUnit{"d" + std::to_string(i), found[i].surface,
                            found[i].category, false, found[i].span});
  }
  return units;
}

std::string NormalizeForMatch(std::string_view text) {
  return Lower(NormalizeWhitespace(text));
}

bool SurfaceExposed(std::string_view surface,
                    std::span<const std::string> normalized_prompts) {
  const std::string needle = NormalizeForMatch(surface);
  if (needle.empty()) return false;
  return std::any_of(normalized_prompts.begin(), normalized_prompts.end(),
                     [&](const std::string& p) {
                       return p.find(needle) != std::string::npos;
                     });
}

LeakageReport ComputeLeakage(std::span<const PiiUnit> pii,
                             std::span<const std::string> prompts) {
  LeakageReport report;
  if (pii.empty()) {
    report.no_pii = true;
    return report;
  }
  std::vector<std::string> normalized;
  normalized.reserve(prompts.size());
  for (const auto& p : prompts) normalized.push_back(NormalizeForMatch(p));
  for (const PiiUnit& unit : pii) {
    if (SurfaceExposed(unit.surface, normalized)) {
      report.matched_pii.push_back(unit.id);
    }
  }
  report.fraction = static_cast<double>(report.matched_pii.size()) /
                    static_cast<double>(pii.size());
  return report;
}

RemoteExposure Expose(std::span<const PiiUnit> pii,
                      std::vector<std::string> prompts) {
  RemoteExposure exposure;
  exposure.matched_pii = ComputeLeakage(pii, prompts).matched_pii;
  exposure.prompts = std::move(prompts);
  return exposure;
}

double Leakage(std::span<const PiiUnit> pii, const RemoteExposure& exposure) {
  return ComputeLeakage(pii, exposure.prompts).fraction;
}

double CatastrophicRate(std::span<const double> leak_fractions) {
  if (leak_fractions.empty()) {
    throw EmptyInputError("catastrophic rate is undefined for zero episodes");
  }
  std::size_t count = 0;
  for (double v : leak_fractions) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("leak fraction " + std::to_string(v) +
                            " outside [0, 1]");
    }
    if (v > kCatastrophicThreshold) ++count;
  }
  return static_cast<double>(count) /
         static_cast<double>(leak_fractions.size());
}

}  // namespace chunkroute
