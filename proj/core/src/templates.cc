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

#include "templates.h"

#include <array>

namespace chunkroute::internal {
namespace {

using K = SentenceKind;

// clang-format off
constexpr std::array<SentenceTemplate, 54> kBank = {{
    // PII, easy.
    {"e01", "My {relation}, {person_name}, is {age} years old and has not been feeling well.", K::kPiiEasy},
    {"e02", "{Her} medical record number is {medical_record_number}.", K::kPiiEasy},
    {"e03", "{Her} date of birth is {date_of_birth}.", K::kPiiEasy},
    {"e04", "You can reach me at {phone} if anything is unclear.", K::kPiiEasy},
    {"e05", "My email address is {email} in case you need it.", K::kPiiEasy},
    {"e06", "{She} has a follow-up appointment on {date} at {time}.", K::kPiiEasy},
    {"e07", "{She} picks up {her} prescriptions at the {pharmacy} every month.", K::kPiiEasy},
    {"e08", "We live at {street_address} in {city_state}.", K::kPiiEasy},
    {"e09", "{She} works at {workplace} in the accounting office.", K::kPiiEasy},
    {"e10", "{Her} insurance plan is {insurance}.", K::kPiiEasy},
    {"e11", "{She} drives a car with license plate {vehicle} to work.", K::kPiiEasy},
    {"e12", "{Her} primary care doctor is {clinician_name}.", K::kPiiEasy},
    {"e13", "Patient {person_name} (MRN: {medical_record_number}, DOB: {date_of_birth}) is a {age}-year-old {sex} with a history of hypertension.", K::kPiiEasy},
    {"e14", "The last visit was on {date} with {clinician_name} at {facility_name}.", K::kPiiEasy},
    // PII, easy, and able to anchor a later dependent sentence.
    {"s01", "{She} flew on {travel_identifier} from {city_state} on {date}.", K::kPiiEasy, "travel"},
    {"s02", "Last week {she} was seen in the {department} at {facility_name}.", K::kPiiEasy, "visit"},
    {"s03", "{She} was started on a new medication by {clinician_name}.", K::kPiiEasy, "rx"},
    {"s04", "{She} recently returned from a trip to {city_state}.", K::kPiiEasy, "trip"},
    {"s05", "{She} started a new job at {workplace} last month.", K::kPiiEasy, "work"},
    // PII the answer depends on.
    {"h01", "{Her} flu test at {facility_name} on {date} was negative, so should {she} ask for a chest CT to rule out pneumonia?", K::kPiiHard},
    {"h02", "Given that {clinician_name} prescribed lisinopril and metformin, could these interact with the statin {she} just started?", K::kPiiHard},
    {"h03", "The {department} reported an elevated troponin, so what follow-up testing is usually recommended?", K::kPiiHard},
    {"h04", "Since {her} plan is {insurance}, which of the recommended imaging options are usually covered?", K::kPiiHard},
    {"h05", "{Her} labs from {date} show a potassium of 5.9, so how urgently should this be addressed?", K::kPiiHard},
    {"h06", "Because {she} works at {workplace} with heavy machinery, is it safe to return to work while taking gabapentin?", K::kPiiHard},
    {"h07", "Is it reasonable for {clinician_name} to taper the prednisone over two weeks given {her} A1c of 8.2?", K::kPiiHard},
    // No PII, easy.
    {"p01", "For the last 5 days, {she} has had a fever of 100.4 and night chills.", K::kPlainEasy},
    {"p02", "{She} also has a mild cough at night.", K::kPlainEasy},
    {"p03", "Thank you so much for your help.", K::kPlainEasy},
    {"p04", "{She} tested negative for flu and x rays of the lungs were clear.", K::kPlainEasy},
    {"p05", "{She} has been drinking plenty of fluids and resting.", K::kPlainEasy},
    {"p06", "{Her} appetite has been normal so far.", K::kPlainEasy},
    {"p07", "{She} does not smoke and drinks only occasionally.", K::kPlainEasy},
    {"p08", "Please let me know what you think.", K::kPlainEasy},
    {"p09", "The fever usually goes down with acetaminophen.", K::kPlainEasy},
    // No PII, hard.
    {"q01", "Could this be coronavirus or another viral pneumonia?", K::kPlainHard},
    {"q02", "What is the differential diagnosis for a persistent fever with a clear chest x ray?", K::kPlainHard},
    {"q03", "Should {she} be evaluated for a pulmonary embolism given the chest pain and shortness of breath?", K::kPlainHard},
    {"q04", "Is a dose adjustment of warfarin needed when starting amiodarone?", K::kPlainHard},
    {"q05", "What criteria distinguish bacterial from viral sinusitis in adults?", K::kPlainHard},
    {"q06", "How should an A1c of 8.2 be managed in an older adult with kidney disease?", K::kPlainHard},
    {"q07", "Which antibiotics are safe for someone with a penicillin allergy and a prolonged QT interval?", K::kPlainHard},
    // Sentences that only make sense together with their source.
    {"d01", "Could something {she} was exposed to on that flight explain these symptoms?", K::kDependentHard, "travel"},
    {"d02", "{She} said that flight was very crowded.", K::kDependentEasy, "travel"},
    {"d03", "Based on what that department found, what should the next diagnostic step be?", K::kDependentHard, "visit"},
    {"d04", "{She} said the staff there were very kind.", K::kDependentEasy, "visit"},
    {"d05", "Could that new medication be causing {her} dizziness and low blood pressure?", K::kDependentHard, "rx"},
    {"d06", "{She} has been taking it every morning as directed.", K::kDependentEasy, "rx"},
    {"d07", "Are there infections common in that area that could cause this kind of fever?", K::kDependentHard, "trip"},
    {"d08", "{She} enjoyed the trip overall.", K::kDependentEasy, "trip"},
    {"d09", "Could exposures at that job explain the rash on {her} hands?", K::kDependentHard, "work"},
    {"d10", "{She} likes the people at that job.", K::kDependentEasy, "work"},
    // Extra fillers.
    {"p10", "{She} has no known drug allergies.", K::kPlainEasy},
    {"q08", "When would a fever like this warrant a visit to the emergency room?", K::kPlainHard},
}};
// clang-format on

}  // namespace

std::span<const SentenceTemplate> TemplateBank() { return kBank; }

const SentenceTemplate* FindTemplate(std::string_view id) {
  for (const auto& t : kBank) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<PiiCategory> SlotCategories(const SentenceTemplate& t) {
  std::vector<PiiCategory> out;
  std::size_t pos = 0;
  while ((pos = t.text.find('{', pos)) != std::string_view::npos) {
    const std::size_t end = t.text.find('}', pos);
    if (end == std::string_view::npos) break;
    if (auto c = ParseCategory(t.text.substr(pos + 1, end - pos - 1))) {
      out.push_back(*c);
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace chunkroute::internal
