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

#include "chunkroute/lexicon.h"

#include <array>

namespace chunkroute::lexicon {
namespace {

constexpr std::array<std::string_view, 32> kPatientFirst = {
    "Carol",  "David",   "Maria",  "James",  "Linda",   "Robert", "Susan",
    "Michael", "Karen",  "Thomas", "Nancy",  "Daniel",  "Lisa",   "Steven",
    "Betty",  "Kevin",   "Helen",  "Brian",  "Sandra",  "George", "Donna",
    "Edward", "Ruth",    "Ronald", "Sharon", "Kenneth", "Laura",  "Jason",
    "Gloria", "Frank",   "Teresa", "Walter",
};

constexpr std::array<std::string_view, 32> kPatientLast = {
    "Prescott", "Chen",     "Alvarez",  "Okafor",   "Lindqvist", "Moreau",
    "Kowalski", "Haddad",   "Nakamura", "Fitzgerald", "Oyelaran", "Brennan",
    "Castillo", "Dubois",   "Petrova",  "Whitaker", "Nguyen",    "Rasmussen",
    "Abernathy", "Delgado", "Hartley",  "Ivanova",  "Jablonski", "Kimura",
    "Lombardi", "Mbeki",    "Novak",    "Ortega",   "Pemberton", "Quintero",
    "Sorensen", "Tremblay",
};

constexpr std::array<std::string_view, 16> kClinicianFirst = {
    "Anya",  "Rajesh", "Elena", "Marcus", "Priya",  "Samuel", "Ingrid", "Omar",
    "Leah",  "Victor", "Naomi", "Hector", "Yuki",   "Graham", "Farah",  "Tobias",
};

constexpr std::array<std::string_view, 16> kClinicianLast = {
    "Sharma",  "Whitfield", "Bergstrom", "Adeyemi", "Castellano", "Hoffman",
    "Iqbal",   "Lindgren",  "Marchetti", "Osei",    "Vasquez",    "Yamamoto",
    "Zielinski", "Thornton", "Kapoor",   "Renner",
};

constexpr std::array<std::string_view, 12> kFacilities = {
    "Jefferson Health clinic",      "Penn Medicine",
    "Palo Alto Medical Foundation", "Temple University Hospital",
    "Mercy Fitzgerald Hospital",    "Lankenau Medical Center",
    "Riverside Family Clinic",      "Cooper University Health",
    "Bryn Mawr Hospital",           "Chestnut Hill Hospital",
    "Einstein Medical Center",      "Nemours Children's Clinic",
};

constexpr std::array<std::string_view, 8> kDepartments = {
    "Radiology Department",  "Urgent Care",           "Cardiology Department",
    "Emergency Department",  "Pulmonology Department", "Neurology Department",
    "Endocrinology Clinic",  "Orthopedics Department",
};

constexpr std::array<std::string_view, 8> kInsurers = {
    "Aetna Blue PPO",         "Cigna Open Access",   "Humana Gold Plus",
    "UnitedHealthcare Choice", "Independence Blue Cross", "Kaiser Silver HMO",
    "Anthem Select",          "Medicare Advantage Plus",
};

constexpr std::array<std::string_view, 6> kPharmacies = {
    "CVS", "Walgreens", "Rite Aid", "Costco Pharmacy", "Giant Pharmacy",
    "Acme Pharmacy",
};

constexpr std::array<std::string_view, 14> kStreets = {
    "Chestnut", "Walnut", "Spruce", "Locust", "Market", "Pine",  "Arch",
    "Race",     "Vine",   "Cherry", "Poplar", "Maple",  "Sansom", "Lombard",
};

constexpr std::array<std::string_view, 14> kCityStates = {
    "Philadelphia, PA", "Orlando, FL",   "Pittsburgh, PA", "Camden, NJ",
    "Wilmington, DE",   "Baltimore, MD", "Newark, NJ",     "Tampa, FL",
    "Scranton, PA",     "Trenton, NJ",   "Allentown, PA",  "Miami, FL",
    "Richmond, VA",     "Hartford, CT",
};

constexpr std::array<std::string_view, 5> kAirlines = {
    "United Flight UA", "Delta Flight DL", "American Flight AA",
    "JetBlue Flight B6", "Southwest Flight WN",
};

constexpr std::array<std::string_view, 10> kWorkplaces = {
    "Comcast Center",        "Vanguard Group",   "Campbell Soup Company",
    "Aramark Tower",         "Urban Outfitters", "Lockheed Martin",
    "Wawa Headquarters",     "FMC Tower",        "Drexel University",
    "Philadelphia Water Department",
};

constexpr std::array<std::string_view, 5> kEmailDomains = {
    "emailservice.com", "mailbox.net", "inboxly.org", "postmark.io",
    "letters.co",
};

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December",
};

}  // namespace

std::span<const std::string_view> PatientFirstNames() { return kPatientFirst; }
std::span<const std::string_view> PatientLastNames() { return kPatientLast; }
std::span<const std::string_view> ClinicianFirstNames() {
  return kClinicianFirst;
}
std::span<const std::string_view> ClinicianLastNames() {
  return kClinicianLast;
}
std::span<const std::string_view> Facilities() { return kFacilities; }
std::span<const std::string_view> Departments() { return kDepartments; }
std::span<const std::string_view> Insurers() { return kInsurers; }
std::span<const std::string_view> Pharmacies() { return kPharmacies; }
std::span<const std::string_view> StreetNames() { return kStreets; }
std::span<const std::string_view> CityStates() { return kCityStates; }
std::span<const std::string_view> Airlines() { return kAirlines; }
std::span<const std::string_view> Workplaces() { return kWorkplaces; }
std::span<const std::string_view> EmailDomains() { return kEmailDomains; }
std::span<const std::string_view> Months() { return kMonths; }

}  // namespace chunkroute::lexicon
