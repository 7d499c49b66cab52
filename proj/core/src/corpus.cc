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

#include "chunkroute/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "chunkroute/chunker.h"
#include "chunkroute/errors.h"
#include "chunkroute/lexicon.h"
#include "chunkroute/pii.h"
#include "chunkroute/rng.h"
#include "json.hpp"
#include "templates.h"

namespace chunkroute {

using internal::SentenceKind;
using internal::SentenceTemplate;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxChunks = 12;

bool IsSingleton(PiiCategory c) {
  return c == PiiCategory::kPersonName || c == PiiCategory::kDateOfBirth ||
         c == PiiCategory::kMedicalRecordNumber ||
         c == PiiCategory::kInsurance;
}

template <typename T>
const T& Pick(Rng& rng, std::span<const T> items) {
  return items[rng.Index(items.size())];
}

std::string Digits(Rng& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s += static_cast<char>('0' + rng.Index(10));
  return s;
}

std::string Letters(Rng& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s += static_cast<char>('A' + rng.Index(26));
  return s;
}

std::string TwoDigit(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

std::string Ordinal(int day) {
  const int mod100 = day % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (day % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(day) + suffix;
}

int Poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double p = 1.0;
  int k = 0;
  do {
    ++k;
    p *= rng.Uniform();
  } while (p > limit);
  return k - 1;
}

// Per-query patient context shared by every sentence.
struct Patient {
  bool female = true;
  std::string first, last;
  int birth_year = 1956, birth_month = 5, birth_day = 12;
  std::string relation;
};

Patient MakePatient(Rng& rng) {
  Patient p;
  p.female = rng.Bernoulli(0.5);
  p.first = std::string(Pick(rng, lexicon::PatientFirstNames()));
  p.last = std::string(Pick(rng, lexicon::PatientLastNames()));
  p.birth_year = rng.Between(1935, 2004);
  p.birth_month = rng.Between(1, 12);
  p.birth_day = rng.Between(1, 28);
  static constexpr std::array<std::string_view, 4> kFemale = {
      "mother", "wife", "sister", "daughter"};
  static constexpr std::array<std::string_view, 4> kMale = {
      "father", "husband", "brother", "son"};
  p.relation = std::string(p.female ? Pick<std::string_view>(rng, kFemale)
                                    : Pick<std::string_view>(rng, kMale));
  return p;
}

std::string MakeValue(PiiCategory c, const Patient& patient, Rng& rng) {
  switch (c) {
    case PiiCategory::kPersonName:
      return patient.first + " " + patient.last;
    case PiiCategory::kDateOfBirth:
      return TwoDigit(patient.birth_month) + "/" +
             TwoDigit(patient.birth_day) + "/" +
             std::to_string(patient.birth_year);
    case PiiCategory::kMedicalRecordNumber:
      return Letters(rng, 2) + "-" + Digits(rng, 5);
    case PiiCategory::kPhone: {
      static constexpr std::array<std::string_view, 6> kArea = {
          "215", "267", "610", "484", "856", "302"};
      return std::string(Pick<std::string_view>(rng, kArea)) + "-555-" +
             Digits(rng, 4);
    }
    case PiiCategory::kEmail: {
      std::string user = patient.first;
      for (char& ch : user) ch = static_cast<char>(std::tolower(ch));
      user += ".";
      user += static_cast<char>(std::tolower(patient.last[0]));
      return user + Digits(rng, 2) + "@" +
             std::string(Pick(rng, lexicon::EmailDomains()));
    }
    case PiiCategory::kClinicianName:
      return "Dr. " + std::string(Pick(rng, lexicon::ClinicianFirstNames())) +
             " " + std::string(Pick(rng, lexicon::ClinicianLastNames()));
    case PiiCategory::kFacilityName:
      return std::string(Pick(rng, lexicon::Facilities()));
    case PiiCategory::kDepartment:
      return std::string(Pick(rng, lexicon::Departments()));
    case PiiCategory::kInsurance:
      return std::string(Pick(rng, lexicon::Insurers())) + " #" +
             Digits(rng, 3) + "-" + Digits(rng, 3) + "-" + Digits(rng, 3);
    case PiiCategory::kPharmacy:
      return std::string(Pick(rng, lexicon::Pharmacies())) + " on " +
             std::string(Pick(rng, lexicon::StreetNames())) +
             (rng.Bernoulli(0.5) ? " St" : " Ave");
    case PiiCategory::kDate: {
      const int month = rng.Between(1, 12);
      const int day = rng.Between(1, 28);
      if (rng.Bernoulli(0.5)) {
        return std::to_string(month) + "/" + std::to_string(day);
      }
      return std::string(lexicon::Months()[month - 1]) + " " + Ordinal(day);
    }
    case PiiCategory::kTime: {
      static constexpr std::array<std::string_view, 4> kMinutes = {
          "00", "15", "30", "45"};
      return std::to_string(rng.Between(1, 12)) + ":" +
             std::string(Pick<std::string_view>(rng, kMinutes)) +
             (rng.Bernoulli(0.5) ? " AM" : " PM");
    }
    case PiiCategory::kStreetAddress:
      return std::to_string(rng.Between(100, 9899)) + " " +
             std::string(Pick(rng, lexicon::StreetNames())) +
             (rng.Bernoulli(0.5) ? " St" : " Ave");
    case PiiCategory::kCityState:
      return std::string(Pick(rng, lexicon::CityStates()));
    case PiiCategory::kTravelIdentifier:
      return std::string(Pick(rng, lexicon::Airlines())) +
             std::to_string(rng.Between(100, 9899));
    case PiiCategory::kWorkplace:
      return std::string(Pick(rng, lexicon::Workplaces()));
    case PiiCategory::kVehicle:
      return Letters(rng, 3) + "-" + Digits(rng, 4);
  }
  return {};
}

struct RenderedSentence {
  std::string text;
  // Units with spans relative to the sentence start.
  std::vector<PiiUnit> units;
};

RenderedSentence Render(const SentenceTemplate& t, const Patient& patient,
                        bool critical, std::set<std::string>& used_surfaces,
                        Rng& rng) {
  RenderedSentence out;
  const std::string_view text = t.text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.text.append(text.substr(pos));
      break;
    }
    out.text.append(text.substr(pos, open - pos));
    const std::size_t close = text.find('}', open);
    const std::string_view name = text.substr(open + 1, close - open - 1);
    pos = close + 1;
    if (auto category = ParseCategory(name)) {
      std::string value;
      for (int attempt = 0; attempt < 64; ++attempt) {
        value = MakeValue(*category, patient, rng);
        if (!used_surfaces.contains(NormalizeForMatch(value)) ||
            IsSingleton(*category)) {
          break;
        }
      }
      used_surfaces.insert(NormalizeForMatch(value));
      PiiUnit unit;
      unit.surface = value;
      unit.category = *category;
      unit.task_critical = critical;
      unit.span = {out.text.size(), out.text.size() + value.size()};
      out.units.push_back(std::move(unit));
      out.text += value;
    } else if (name == "age") {
      out.text += std::to_string(kReferenceYear - patient.birth_year);
    } else if (name == "relation") {
      out.text += patient.relation;
    } else if (name == "sex") {
      out.text += patient.female ? "female" : "male";
    } else if (name == "She") {
      out.text += patient.female ? "She" : "He";
    } else if (name == "she") {
      out.text += patient.female ? "she" : "he";
    } else if (name == "Her") {
      out.text += patient.female ? "Her" : "His";
    } else if (name == "her") {
      out.text += patient.female ? "her" : "his";
    } else {
      throw ConfigError("template " + std::string(t.id) +
                        " has unknown placeholder {" + std::string(name) + "}");
    }
  }
  return out;
}

std::vector<const SentenceTemplate*> OfKind(SentenceKind kind) {
  std::vector<const SentenceTemplate*> out;
  for (const auto& t : internal::TemplateBank()) {
    if (t.kind == kind) out.push_back(&t);
  }
  return out;
}

struct Planned {
  const SentenceTemplate* tmpl;
  // Index of the source sentence for dependents, else -1.
  int source = -1;
};

bool CountOccurrencesOnce(const std::string& haystack,
                          const std::string& needle) {
  const std::size_t first = haystack.find(needle);
  if (first == std::string::npos) return false;
  return haystack.find(needle, first + 1) == std::string::npos;
}

// One attempt at a query; returns false if the rendered text breaks an
// invariant (a repeated surface), in which case the caller retries with the
// advanced generator state.
bool TryGenerate(const GenerationProfile& profile, Rng& rng,
                 AnnotatedQuery& out) {
  const Patient patient = MakePatient(rng);
  const int mean_chunks = static_cast<int>(std::lround(profile.mean_chunks));
  const int chunk_lo = std::max(1, mean_chunks - 2);
  const int chunk_hi = std::min<int>(kMaxChunks, mean_chunks + 2);
  std::size_t budget = static_cast<std::size_t>(rng.Between(chunk_lo, chunk_hi));
  int target = std::max(1, Poisson(rng, profile.mean_pii));

  std::vector<Planned> plan;
  std::set<std::string_view> used_ids;
  std::set<PiiCategory> used_singletons;
  int pii_count = 0;

  auto fits = [&](const SentenceTemplate* t) {
    if (used_ids.contains(t->id)) return false;
    for (PiiCategory c : internal::SlotCategories(*t)) {
      if (IsSingleton(c) && used_singletons.contains(c)) return false;
    }
    return true;
  };
  auto take = [&](const SentenceTemplate* t, int source = -1) {
    used_ids.insert(t->id);
    const auto cats = internal::SlotCategories(*t);
    for (PiiCategory c : cats) {
      if (IsSingleton(c)) used_singletons.insert(c);
    }
    pii_count += static_cast<int>(cats.size());
    plan.push_back({t, source});
  };
  auto choose = [&](const std::vector<const SentenceTemplate*>& pool,
                    int max_slots) -> const SentenceTemplate* {
    std::vector<const SentenceTemplate*> ok;
    for (const auto* t : pool) {
      if (fits(t) &&
          static_cast<int>(internal::SlotCategories(*t).size()) <= max_slots) {
        ok.push_back(t);
      }
    }
    if (ok.empty()) return nullptr;
    return ok[rng.Index(ok.size())];
  };

  // Cross-sentence dependency: a source sentence plus a later dependent.
  if (budget >= 2 && rng.Bernoulli(profile.dependency_rate)) {
    std::vector<const SentenceTemplate*> sources;
    for (const auto& t : internal::TemplateBank()) {
      if (!t.group.empty() && t.kind == SentenceKind::kPiiEasy &&
          static_cast<int>(internal::SlotCategories(t).size()) <= target) {
        sources.push_back(&t);
      }
    }
    if (!sources.empty()) {
      const SentenceTemplate* src = sources[rng.Index(sources.size())];
      const bool hard = rng.Bernoulli(profile.dependent_hard_fraction);
      const SentenceKind dep_kind =
          hard ? SentenceKind::kDependentHard : SentenceKind::kDependentEasy;
      const SentenceTemplate* dep = nullptr;
      for (const auto& t : internal::TemplateBank()) {
        if (t.kind == dep_kind && t.group == src->group) dep = &t;
      }
      take(src);
      take(dep, 0);
    }
  }

  const auto pii_easy = OfKind(SentenceKind::kPiiEasy);
  const auto pii_hard = OfKind(SentenceKind::kPiiHard);
  while (pii_count < target) {
    if (plan.size() >= budget) {
      if (budget >= kMaxChunks) break;
      ++budget;
    }
    const bool critical = rng.Bernoulli(profile.task_critical_fraction);
    const SentenceTemplate* t =
        choose(critical ? pii_hard : pii_easy, target - pii_count);
    if (t == nullptr) t = choose(critical ? pii_easy : pii_hard, target - pii_count);
    if (t == nullptr) break;
    take(t);
  }
  if (pii_count == 0) {
    // Every query carries at least one unit.
    const SentenceTemplate* t = choose(pii_easy, 1);
    if (t == nullptr) return false;
    take(t);
  }

  if (!profile.pii_in_every_sentence) {
    const auto plain_easy = OfKind(SentenceKind::kPlainEasy);
    const auto plain_hard = OfKind(SentenceKind::kPlainHard);
    while (plan.size() < budget) {
      const bool hard = rng.Bernoulli(profile.hard_fraction);
      const SentenceTemplate* t = choose(hard ? plain_hard : plain_easy, 0);
      if (t == nullptr) t = choose(hard ? plain_easy : plain_hard, 0);
      if (t == nullptr) break;
      take(t);
    }
  }

  // Random order, then repair: introductions first, dependents after their
  // source.
  std::vector<std::size_t> order(plan.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.Index(i)]);
  }
  auto position = [&](std::size_t planned) {
    return static_cast<std::size_t>(
        std::find(order.begin(), order.end(), planned) - order.begin());
  };
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto id = plan[i].tmpl->id;
    if (id == "e01" || id == "e13") {
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(position(i)));
      order.insert(order.begin(), i);
    }
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan[i].source < 0) continue;
    const std::size_t src = static_cast<std::size_t>(plan[i].source);
    if (position(i) < position(src)) {
      std::swap(order[position(i)], order[position(src)]);
    }
  }

  Query& q = out.query;
  q.text.clear();
  q.pii.clear();
  out.sim = {};
  std::set<std::string> used_surfaces;
  std::vector<std::string> template_ids;
  std::vector<std::size_t> sentence_of_plan(plan.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Planned& p = plan[order[k]];
    sentence_of_plan[order[k]] = k;
    const bool critical = p.tmpl->kind == SentenceKind::kPiiHard;
    RenderedSentence s = Render(*p.tmpl, patient, critical, used_surfaces, rng);
    if (!q.text.empty()) q.text += ' ';
    const std::size_t offset = q.text.size();
    q.text += s.text;
    for (PiiUnit& u : s.units) {
      u.span.start += offset;
      u.span.end += offset;
      q.pii.push_back(std::move(u));
    }
    template_ids.emplace_back(p.tmpl->id);

    const bool hard = p.tmpl->kind == SentenceKind::kPiiHard ||
                      p.tmpl->kind == SentenceKind::kPlainHard ||
                      p.tmpl->kind == SentenceKind::kDependentHard;
    const double lo = hard ? profile.hard_min : profile.easy_min;
    const double hi = hard ? profile.hard_max : profile.easy_max;
    out.sim.difficulty.push_back(rng.Uniform(lo, hi));
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan[i].source >= 0) {
      out.sim.dependencies.emplace_back(
          sentence_of_plan[i],
          sentence_of_plan[static_cast<std::size_t>(plan[i].source)]);
    }
  }
  for (std::size_t i = 0; i < q.pii.size(); ++i) {
    q.pii[i].id = "p" + std::to_string(i);
  }
  std::string joined;
  for (std::size_t i = 0; i < template_ids.size(); ++i) {
    if (i > 0) joined += '|';
    joined += template_ids[i];
  }
  q.meta.template_id = std::move(joined);

  // Each surface must occur exactly once so leakage attribution is exact.
  const std::string normalized = NormalizeForMatch(q.text);
  for (const PiiUnit& u : q.pii) {
    if (!CountOccurrencesOnce(normalized, NormalizeForMatch(u.surface))) {
      return false;
    }
  }
  return true;
}

}  // namespace

void GenerationProfile::Validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string("profile.") + name + " must lie in [0, 1]");
    }
  };
  if (!(mean_pii >= 0.0)) throw ConfigError("profile.mean_pii must be >= 0");
  if (!(mean_chunks >= 1.0 && mean_chunks <= static_cast<double>(kMaxChunks))) {
    throw ConfigError("profile.mean_chunks must lie in [1, 12]");
  }
  unit(task_critical_fraction, "task_critical_fraction");
  unit(dependency_rate, "dependency_rate");
  unit(dependent_hard_fraction, "dependent_hard_fraction");
  unit(hard_fraction, "hard_fraction");
  unit(easy_min, "easy_min");
  unit(easy_max, "easy_max");
  unit(hard_min, "hard_min");
  unit(hard_max, "hard_max");
  if (easy_min > easy_max || hard_min > hard_max) {
    throw ConfigError("profile difficulty bands must satisfy min <= max");
  }
  const double cap = MaxAchievablePii(*this);
  if (mean_pii > cap) {
    throw ConfigError("profile.mean_pii " + std::to_string(mean_pii) +
                      " exceeds what the templates can realize (" +
                      std::to_string(cap) + ")");
  }
}

GenerationProfile GenerationProfile::Named(std::string_view name) {
  GenerationProfile p;
  if (name == "medical" || name == "default") return p;
  if (name == "dependency-heavy") {
    p.dependency_rate = 0.75;
    p.dependent_hard_fraction = 0.8;
    return p;
  }
  if (name == "high-risk") {
    p.mean_pii = 5.0;
    p.task_critical_fraction = 0.85;
    p.hard_fraction = 0.8;
    p.dependency_rate = 0.2;
    return p;
  }
  if (name == "pii-only") {
    p.pii_in_every_sentence = true;
    p.dependency_rate = 0.0;
    return p;
  }
  throw ConfigError("unknown generation profile '" + std::string(name) + "'");
}

double MaxAchievablePii(const GenerationProfile&) {
  // Greedy upper bound: the kMaxChunks richest PII templates.
  std::vector<int> slots;
  for (const auto& t : internal::TemplateBank()) {
    slots.push_back(static_cast<int>(internal::SlotCategories(t).size()));
  }
  std::sort(slots.rbegin(), slots.rend());
  int total = 0;
  for (std::size_t i = 0; i < std::min(slots.size(), kMaxChunks); ++i) {
    total += slots[i];
  }
  return static_cast<double>(total);
}

std::vector<AnnotatedQuery> GenerateCorpus(std::uint64_t seed, std::size_t n,
                                           const GenerationProfile& profile) {
  if (n == 0) throw ConfigError("generate_corpus: n must be >= 1");
  profile.Validate();
  std::vector<AnnotatedQuery> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(SubSeed(seed, i));
    AnnotatedQuery aq;
    bool ok = false;
    for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
      ok = TryGenerate(profile, rng, aq);
    }
    if (!ok) {
      throw ConfigError("generate_corpus: could not realize query " +
                        std::to_string(i) + " under this profile");
    }
    char id[48];
    std::snprintf(id, sizeof id, "q%llu-%05zu",
                  static_cast<unsigned long long>(seed), i);
    aq.query.id = id;
    aq.query.domain_tag = profile.domain;
    aq.query.meta.seed = seed;
    out.push_back(std::move(aq));
  }
  return out;
}

CorpusSplit MakeSplit(std::vector<AnnotatedQuery> queries, double test_fraction,
                      std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw ConfigError("test fraction must lie in [0, 1]");
  }
  const std::size_t n = queries.size();
  const auto n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * test_fraction + 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(SubSeed(seed, 0x5e11));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Index(i)]);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;
  CorpusSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (is_test[i] ? split.test : split.train).push_back(std::move(queries[i]));
  }
  return split;
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

json ToJson(const AnnotatedQuery& aq, const char* split_name,
            std::uint64_t split_seed) {
  const Query& q = aq.query;
  json j;
  j["version"] = kCorpusSchemaVersion;
  j["split"] = split_name;
  j["split_seed"] = split_seed;
  j["id"] = q.id;
  j["text"] = q.text;
  j["domain_tag"] = q.domain_tag;
  j["pii"] = json::array();
  for (const PiiUnit& p : q.pii) {
    j["pii"].push_back({{"id", p.id},
                        {"surface", p.surface},
                        {"category", std::string(CategoryName(p.category))},
                        {"task_critical", p.task_critical},
                        {"span", {p.span.start, p.span.end}}});
  }
  json deps = json::array();
  for (const auto& [d, s] : aq.sim.dependencies) deps.push_back({d, s});
  j["sim"] = {{"difficulty", aq.sim.difficulty}, {"dependencies", deps}};
  j["meta"] = {{"seed", q.meta.seed}, {"template", q.meta.template_id}};
  return j;
}

template <typename T>
T Field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'", line);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type",
                     line);
  }
}

AnnotatedQuery FromJson(const json& j, std::size_t line, bool& is_test,
                        std::uint64_t& split_seed) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  const int version = Field<int>(j, "version", line);
  if (version != kCorpusSchemaVersion) {
    throw ParseError("field 'version': unsupported schema version " +
                         std::to_string(version),
                     line);
  }
  AnnotatedQuery aq;
  Query& q = aq.query;
  q.id = Field<std::string>(j, "id", line);
  q.text = Field<std::string>(j, "text", line);
  q.domain_tag = j.value("domain_tag", "");
  const std::string split = j.value("split", "train");
  if (split != "train" && split != "test") {
    throw ParseError("field 'split': expected 'train' or 'test'", line);
  }
  is_test = split == "test";
  split_seed = j.value("split_seed", std::uint64_t{0});
  if (j.contains("pii")) {
    if (!j["pii"].is_array()) throw ParseError("field 'pii' must be an array", line);
    for (const auto& pj : j["pii"]) {
      PiiUnit p;
      p.id = Field<std::string>(pj, "id", line);
      p.surface = Field<std::string>(pj, "surface", line);
      const auto cat = ParseCategory(Field<std::string>(pj, "category", line));
      if (!cat) throw ParseError("field 'pii.category': unknown category", line);
      p.category = *cat;
      p.task_critical = pj.value("task_critical", false);
      const auto span = Field<std::vector<std::size_t>>(pj, "span", line);
      if (span.size() != 2) {
        throw ParseError("field 'pii.span' must have two offsets", line);
      }
      p.span = {span[0], span[1]};
      q.pii.push_back(std::move(p));
    }
  }
  if (j.contains("sim")) {
    const json& sj = j["sim"];
    aq.sim.difficulty =
        sj.value("difficulty", std::vector<double>{});
    for (const auto& d : sj.value("dependencies", json::array())) {
      if (!d.is_array() || d.size() != 2) {
        throw ParseError("field 'sim.dependencies' entries must be pairs",
                         line);
      }
      aq.sim.dependencies.emplace_back(d[0].get<std::size_t>(),
                                       d[1].get<std::size_t>());
    }
  }
  if (j.contains("meta")) {
    q.meta.seed = j["meta"].value("seed", std::uint64_t{0});
    q.meta.template_id = j["meta"].value("template", "");
  }
  auto problems = CheckQueryInvariants(q);
  if (!problems.empty()) {
    std::string msg = "query '" + q.id + "' (line " + std::to_string(line) +
                      ") is invalid:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ValidationError(msg);
  }
  return aq;
}

}  // namespace

std::string SerializeCorpus(const CorpusSplit& split) {
  std::string out;
  for (const auto& aq : split.train) {
    out += ToJson(aq, "train", split.seed).dump() + "\n";
  }
  for (const auto& aq : split.test) {
    out += ToJson(aq, "test", split.seed).dump() + "\n";
  }
  return out;
}

void SaveCorpus(const CorpusSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write corpus to " + path.string());
  out << SerializeCorpus(split);
  if (!out) throw ConfigError("failed writing corpus to " + path.string());
}

CorpusSplit ParseCorpus(std::string_view jsonl) {
  CorpusSplit split;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    bool is_test = false;
    std::uint64_t seed = 0;
    AnnotatedQuery aq = FromJson(j, line_no, is_test, seed);
    split.seed = seed;
    (is_test ? split.test : split.train).push_back(std::move(aq));
  }
  return split;
}

CorpusSplit LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCorpus(buf.str());
}

// ---------------------------------------------------------------------------
// Lint

std::string_view LintRuleName(LintRule rule) {
  switch (rule) {
    case LintRule::kConsistency:
      return "consistency";
    case LintRule::kCoherence:
      return "coherence";
    case LintRule::kAlignment:
      return "alignment";
  }
  return "unknown";
}

namespace {

bool HasCycle(std::size_t n, const std::vector<Dependency>& deps) {
  std::vector<std::vector<std::size_t>> edges(n);
  for (const auto& [d, s] : deps) {
    if (d < n && s < n) edges[d].push_back(s);
  }
  std::vector<int> state(n, 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t v) {
    state[v] = 1;
    for (std::size_t w : edges[v]) {
      if (state[w] == 1) return true;
      if (state[w] == 0 && visit(w)) return true;
    }
    state[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (state[v] == 0 && visit(v)) return true;
  }
  return false;
}

}  // namespace

std::vector<LintViolation> LintInstance(const Query& query,
                                        const SimAnnotation& annotation) {
  std::vector<LintViolation> out;
  auto add = [&](LintRule r, std::string msg) {
    out.push_back({r, std::move(msg)});
  };

  for (auto& problem : CheckQueryInvariants(query)) {
    add(LintRule::kAlignment, std::move(problem));
  }
  if (!out.empty()) return out;

  // Consistency: single-valued attributes.
  std::map<PiiCategory, std::set<std::string>> values;
  for (const PiiUnit& p : query.pii) {
    values[p.category].insert(NormalizeForMatch(p.surface));
  }
  for (const auto& [category, surfaces] : values) {
    if (IsSingleton(category) && surfaces.size() > 1) {
      add(LintRule::kConsistency,
          "query gives " + std::to_string(surfaces.size()) +
              " different values for " + std::string(CategoryName(category)));
    }
  }
  // Consistency: stated ages against the date of birth.
  static const std::regex kAge("\\b(\\d{1,3})(?:-year-old| years old)\\b");
  for (const PiiUnit& p : query.pii) {
    if (p.category != PiiCategory::kDateOfBirth || p.surface.size() < 4) {
      continue;
    }
    const int year = std::atoi(p.surface.substr(p.surface.size() - 4).c_str());
    for (auto it = std::sregex_iterator(query.text.begin(), query.text.end(),
                                        kAge);
         it != std::sregex_iterator(); ++it) {
      const int age = std::stoi((*it)[1].str());
      if (std::abs((kReferenceYear - year) - age) > 1) {
        add(LintRule::kConsistency,
            "stated age " + std::to_string(age) +
                " contradicts date of birth " + p.surface);
      }
    }
  }
  // Consistency: each surface appears once, so exposure is attributable.
  const std::string normalized = NormalizeForMatch(query.text);
  for (const PiiUnit& p : query.pii) {
    if (!CountOccurrencesOnce(normalized, NormalizeForMatch(p.surface))) {
      add(LintRule::kConsistency,
          "surface of '" + p.id + "' occurs more than once in the text");
    }
  }

  // Alignment with the canonical chunking.
  std::vector<Chunk> chunks;
  try {
    chunks = ChunkQuery(query);
  } catch (const EmptyInputError& e) {
    add(LintRule::kAlignment, e.what());
    return out;
  } catch (const AlignmentError& e) {
    add(LintRule::kAlignment, e.what());
    chunks = Segment(query.text);
  }
  const std::size_t n = chunks.size();
  if (annotation.difficulty.size() != n) {
    add(LintRule::kAlignment,
        "difficulty has " + std::to_string(annotation.difficulty.size()) +
            " entries for " + std::to_string(n) + " chunks");
  }
  for (double d : annotation.difficulty) {
    if (!(d >= 0.0 && d <= 1.0)) {
      add(LintRule::kAlignment,
          "difficulty " + std::to_string(d) + " outside [0, 1]");
    }
  }
  bool indices_ok = true;
  for (const auto& [d, s] : annotation.dependencies) {
    if (d >= n || s >= n || d == s) {
      indices_ok = false;
      add(LintRule::kAlignment, "invalid dependency (" + std::to_string(d) +
                                    ", " + std::to_string(s) + ")");
    }
  }
  if (indices_ok && HasCycle(n, annotation.dependencies)) {
    add(LintRule::kAlignment, "dependency graph has a cycle");
  }

  // Coherence: categories allowed by each sentence's template.
  if (!query.meta.template_id.empty()) {
    std::vector<std::string> ids;
    std::stringstream ss(query.meta.template_id);
    for (std::string part; std::getline(ss, part, '|');) ids.push_back(part);
    if (ids.size() != n) {
      add(LintRule::kAlignment,
          "template list has " + std::to_string(ids.size()) + " entries for " +
              std::to_string(n) + " chunks");
    } else {
      for (const Chunk& c : chunks) {
        const SentenceTemplate* t = internal::FindTemplate(ids[c.index]);
        if (t == nullptr) continue;
        const auto allowed = internal::SlotCategories(*t);
        for (const auto& pid : c.pii_ids) {
          const PiiUnit* unit = query.FindPii(pid);
          if (std::find(allowed.begin(), allowed.end(), unit->category) ==
              allowed.end()) {
            add(LintRule::kCoherence,
                "'" + pid + "' (" + std::string(CategoryName(unit->category)) +
                    ") does not fit template " + ids[c.index]);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace chunkroute
