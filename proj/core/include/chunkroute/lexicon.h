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

// Word lists shared by the synthetic corpus generator and the default PII
// detector rules.

#ifndef CHUNKROUTE_LEXICON_H_
#define CHUNKROUTE_LEXICON_H_

#include <span>
#include <string_view>

namespace chunkroute::lexicon {

std::span<const std::string_view> PatientFirstNames();
std::span<const std::string_view> PatientLastNames();
std::span<const std::string_view> ClinicianFirstNames();
std::span<const std::string_view> ClinicianLastNames();
std::span<const std::string_view> Facilities();
std::span<const std::string_view> Departments();
std::span<const std::string_view> Insurers();
std::span<const std::string_view> Pharmacies();
std::span<const std::string_view> StreetNames();
// "City, ST" pairs.
std::span<const std::string_view> CityStates();
std::span<const std::string_view> Airlines();
std::span<const std::string_view> Workplaces();
std::span<const std::string_view> EmailDomains();
std::span<const std::string_view> Months();

}  // namespace chunkroute::lexicon

#endif  // CHUNKROUTE_LEXICON_H_
