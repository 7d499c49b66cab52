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

// Annotated query data model shared by the corpus, chunker, detector and
// simulator.

#ifndef CHUNKROUTE_QUERY_H_
#define CHUNKROUTE_QUERY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chunkroute {

enum class PiiCategory {
  kPersonName,
  kDateOfBirth,
  kMedicalRecordNumber,
  kPhone,
  kEmail,
  kClinicianName,
  kFacilityName,
  kDepartment,
  kInsurance,
  kPharmacy,
  kDate,
  kTime,
  kStreetAddress,
  kCityState,
  kTravelIdentifier,
  kWorkplace,
  kVehicle,
};

inline constexpr std::array<PiiCategory, 17> kAllCategories = {
    PiiCategory::kPersonName,      PiiCategory::kDateOfBirth,
    PiiCategory::kMedicalRecordNumber, PiiCategory::kPhone,
    PiiCategory::kEmail,           PiiCategory::kClinicianName,
    PiiCategory::kFacilityName,    PiiCategory::kDepartment,
    PiiCategory::kInsurance,       PiiCategory::kPharmacy,
    PiiCategory::kDate,            PiiCategory::kTime,
    PiiCategory::kStreetAddress,   PiiCategory::kCityState,
    PiiCategory::kTravelIdentifier, PiiCategory::kWorkplace,
    PiiCategory::kVehicle,
};

// Snake-case wire name, e.g. "medical_record_number".
std::string_view CategoryName(PiiCategory category);
std::optional<PiiCategory> ParseCategory(std::string_view name);

// Half-open character interval [start, end) into a query's text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool Intersects(const Span& o) const {
    return start < o.end && o.start < end;
  }
  bool Contains(const Span& o) const {
    return start <= o.start && o.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct PiiUnit {
  std::string id;
  std::string surface;
  PiiCategory category = PiiCategory::kPersonName;
  bool task_critical = false;
  Span span;

  friend bool operator==(const PiiUnit&, const PiiUnit&) = default;
};

struct QueryMeta {
  std::uint64_t seed = 0;
  // '|'-separated sentence template ids, one per chunk, for generated data.
  std::string template_id;

  friend bool operator==(const QueryMeta&, const QueryMeta&) = default;
};

struct Query {
  std::string id;
  std::string text;
  std::vector<PiiUnit> pii;
  std::string domain_tag;
  QueryMeta meta;

  const PiiUnit* FindPii(std::string_view pii_id) const;
  friend bool operator==(const Query&, const Query&) = default;
};

// (dependent_chunk, source_chunk): the dependent chunk needs PII context
// introduced by the source chunk.
using Dependency = std::pair<std::size_t, std::size_t>;

struct SimAnnotation {
  std::vector<double> difficulty;
  std::vector<Dependency> dependencies;

  friend bool operator==(const SimAnnotation&,
                         const SimAnnotation&) = default;
};

struct AnnotatedQuery {
  Query query;
  SimAnnotation sim;

  friend bool operator==(const AnnotatedQuery&,
                         const AnnotatedQuery&) = default;
};

struct CorpusSplit {
  std::vector<AnnotatedQuery> train;
  std::vector<AnnotatedQuery> test;
  std::uint64_t seed = 0;

  friend bool operator==(const CorpusSplit&, const CorpusSplit&) = default;
};

// Checks the Query invariants: non-empty text, spans in bounds and matching
// their surfaces, unique ids, sorted and non-overlapping spans. Returns one
// message per problem; empty means valid.
std::vector<std::string> CheckQueryInvariants(const Query& query);

}  // namespace chunkroute

#endif  // CHUNKROUTE_QUERY_H_
