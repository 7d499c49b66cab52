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

#include "chunkroute/query.h"

#include <set>

namespace chunkroute {

namespace {

constexpr std::array<std::string_view, 17> kCategoryNames = {
    "person_name",       "date_of_birth", "medical_record_number",
    "phone",             "email",         "clinician_name",
    "facility_name",     "department",    "insurance",
    "pharmacy",          "date",          "time",
    "street_address",    "city_state",    "travel_identifier",
    "workplace",         "vehicle",
};

}  // namespace

std::string_view CategoryName(PiiCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<PiiCategory> ParseCategory(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return kAllCategories[i];
  }
  return std::nullopt;
}

const PiiUnit* Query::FindPii(std::string_view pii_id) const {
  for (const auto& p : pii) {
    if (p.id == pii_id) return &p;
  }
  return nullptr;
}

std::vector<std::string> CheckQueryInvariants(const Query& query) {
  std::vector<std::string> problems;
  if (query.text.empty()) problems.push_back("text is empty");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < query.pii.size(); ++i) {
    const PiiUnit& p = query.pii[i];
    if (!ids.insert(p.id).second) {
      problems.push_back("duplicate pii id '" + p.id + "'");
    }
    if (p.span.start >= p.span.end || p.span.end > query.text.size()) {
      problems.push_back("pii '" + p.id + "' span [" +
                         std::to_string(p.span.start) + ", " +
                         std::to_string(p.span.end) +
                         ") exceeds text of length " +
                         std::to_string(query.text.size()));
      continue;
    }
    if (query.text.compare(p.span.start, p.span.length(), p.surface) != 0) {
      problems.push_back("pii '" + p.id + "' surface does not match text at " +
                         "its span");
    }
    if (i > 0) {
      const Span& prev = query.pii[i - 1].span;
      if (prev.start > p.span.start) {
        problems.push_back("pii spans not sorted at '" + p.id + "'");
      } else if (prev.end > p.span.start) {
        problems.push_back("pii '" + p.id + "' overlaps '" +
                           query.pii[i - 1].id + "'");
      }
    }
  }
  return problems;
}

}  // namespace chunkroute
