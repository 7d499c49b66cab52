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

// Sentence template bank for the synthetic corpus. Internal to the library.

#ifndef CHUNKROUTE_SRC_TEMPLATES_H_
#define CHUNKROUTE_SRC_TEMPLATES_H_

#include <span>
#include <string_view>
#include <vector>

#include "chunkroute/query.h"

namespace chunkroute::internal {

enum class SentenceKind {
  kPiiEasy,        // PII that local handling does not need remotely
  kPiiHard,        // PII inside a sentence only the remote model handles
  kPlainEasy,      // no PII, within local capability
  kPlainHard,      // no PII, needs the remote model
  kDependentEasy,  // refers back to a source sentence; local can handle it
  kDependentHard,  // refers back to a source sentence; needs remote + source
};

struct SentenceTemplate {
  std::string_view id;
  // Placeholders: {<category name>} for PII slots, plus {age}, {relation},
  // {sex}, {She}/{she}/{Her}/{her}.
  std::string_view text;
  SentenceKind kind;
  // Source sentences name the group their dependents refer to; dependent
  // sentences name the group they need.
  std::string_view group = {};
};

std::span<const SentenceTemplate> TemplateBank();
const SentenceTemplate* FindTemplate(std::string_view id);
// PII categories named by the template's placeholders, in order.
std::vector<PiiCategory> SlotCategories(const SentenceTemplate& t);

}  // namespace chunkroute::internal

#endif  // CHUNKROUTE_SRC_TEMPLATES_H_
