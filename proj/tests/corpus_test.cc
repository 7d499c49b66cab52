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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "chunkroute/chunker.h"
#include "chunkroute/corpus.h"
#include "chunkroute/errors.h"
#include "test_util.h"

namespace chunkroute {
namespace {

TEST(GenerateCorpus, SameInputsGiveIdenticalBytes) {
  const GenerationProfile p;
  const CorpusSplit a{GenerateCorpus(7, 1, p), {}, 7};
  const CorpusSplit b{GenerateCorpus(7, 1, p), {}, 7};
  EXPECT_EQ(SerializeCorpus(a), SerializeCorpus(b));
}

TEST(GenerateCorpus, PrefixIsStableWhenNGrows) {
  const auto small = GenerateCorpus(9, 5, GenerationProfile{});
  const auto large = GenerateCorpus(9, 20, GenerationProfile{});
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], large[i]);
}

TEST(GenerateCorpus, DefaultMeanPiiNearTarget) {
  const auto corpus = GenerateCorpus(7, 1000, GenerationProfile{});
  double total = 0.0;
  for (const auto& q : corpus) total += static_cast<double>(q.query.pii.size());
  EXPECT_NEAR(total / 1000.0, 4.6, 0.5);
}

TEST(GenerateCorpus, ZeroCriticalFractionMeansNoCriticalUnits) {
  GenerationProfile p;
  p.task_critical_fraction = 0.0;
  for (const auto& q : GenerateCorpus(3, 200, p)) {
    for (const PiiUnit& u : q.query.pii) EXPECT_FALSE(u.task_critical);
  }
}

TEST(GenerateCorpus, NamedProfilesDifferInDependencyRate) {
  auto rate = [](const std::string& name) {
    const auto corpus = GenerateCorpus(5, 400, GenerationProfile::Named(name));
    double with = 0;
    for (const auto& q : corpus) with += !q.sim.dependencies.empty();
    return with / static_cast<double>(corpus.size());
  };
  EXPECT_GE(rate("dependency-heavy"), 0.4);
  EXPECT_LT(rate("medical"), rate("dependency-heavy"));
}

TEST(GenerateCorpus, InvalidProfileIsConfigError) {
  GenerationProfile p;
  p.mean_pii = -1;
  EXPECT_THROW(GenerateCorpus(1, 1, p), ConfigError);
  p.mean_pii = 1e6;
  EXPECT_THROW(GenerateCorpus(1, 1, p), ConfigError);
  EXPECT_THROW(GenerationProfile::Named("nope"), ConfigError);
}

// Property check over a large sample: invariants, chunk alignment and the
// lint rules all hold for generator output.
TEST(GenerateCorpus, TenThousandInstancesAreCleanAndAligned) {
  const auto corpus = GenerateCorpus(2026, 10000, GenerationProfile{});
  std::size_t violations = 0;
  for (const AnnotatedQuery& q : corpus) {
    const auto invariants = CheckQueryInvariants(q.query);
    const auto lint = LintInstance(q.query, q.sim);
    violations += invariants.size() + lint.size();
    if (!lint.empty()) ADD_FAILURE() << q.query.id << ": " << lint[0].message;
    const auto chunks = ChunkQuery(q.query);
    ASSERT_EQ(chunks.size(), q.sim.difficulty.size()) << q.query.id;
    ASSERT_LE(chunks.size(), 12u);
    std::size_t attached = 0;
    for (const Chunk& c : chunks) attached += c.pii_ids.size();
    ASSERT_EQ(attached, q.query.pii.size()) << q.query.id;
    ASSERT_GE(q.query.pii.size(), 1u);
  }
  EXPECT_EQ(violations, 0u);
}

TEST(MakeSplit, SizesAndDisjointIds) {
  const auto corpus = GenerateCorpus(7, 625, GenerationProfile{});
  const CorpusSplit s = MakeSplit(corpus, 0.2, 7);
  EXPECT_EQ(s.test.size(), 125u);
  EXPECT_EQ(s.train.size(), 500u);
  std::set<std::string> ids;
  for (const auto& q : s.train) ids.insert(q.query.id);
  for (const auto& q : s.test) EXPECT_FALSE(ids.count(q.query.id));
  const CorpusSplit odd = MakeSplit(GenerateCorpus(7, 7, GenerationProfile{}), 0.5, 1);
  EXPECT_EQ(odd.test.size(), 3u);
}

TEST(CorpusIo, SaveLoadRoundTrip) {
  const CorpusSplit split = MakeSplit(GenerateCorpus(11, 3, GenerationProfile{}), 0.34, 11);
  const auto path = std::filesystem::temp_directory_path() / "chunkroute_rt.jsonl";
  SaveCorpus(split, path);
  EXPECT_EQ(LoadCorpus(path), split);
  std::filesystem::remove(path);
}

TEST(CorpusIo, EmptyTextIsEmptyCorpus) {
  const CorpusSplit s = ParseCorpus("");
  EXPECT_TRUE(s.train.empty());
  EXPECT_TRUE(s.test.empty());
}

TEST(CorpusIo, MalformedLineNamesLine) {
  const CorpusSplit split{GenerateCorpus(1, 1, GenerationProfile{}), {}, 1};
  const std::string text = SerializeCorpus(split) + "{not json\n";
  try {
    ParseCorpus(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(CorpusIo, MissingFieldNamesField) {
  try {
    ParseCorpus(R"({"version":1,"id":"x","pii":[],"domain_tag":"m"})" "\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("text"), std::string::npos) << e.what();
  }
}

TEST(CorpusIo, SpanPastEndIsValidationErrorWithId) {
  const std::string line =
      R"({"version":1,"id":"bad-1","text":"Hi Ann.","domain_tag":"m",)"
      R"("meta":{"seed":0,"template":""},)"
      R"("pii":[{"id":"p0","surface":"Ann","category":"person_name",)"
      R"("task_critical":false,"span":[3,40]}],)"
      R"("sim":{"difficulty":[0.2],"dependencies":[]}})";
  try {
    ParseCorpus(line + "\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad-1"), std::string::npos);
  }
}

TEST(Lint, TwoDatesOfBirthIsConsistencyViolation) {
  Query q;
  q.id = "x";
  q.text = "I was born on 01/02/1970. My DOB is 03/04/1980.";
  q.pii = {{"p0", "01/02/1970", PiiCategory::kDateOfBirth, false, {14, 24}},
           {"p1", "03/04/1980", PiiCategory::kDateOfBirth, false, {36, 46}}};
  const auto v = LintInstance(q, SimAnnotation{{0.2, 0.2}, {}});
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const LintViolation& x) {
    return x.rule == LintRule::kConsistency;
  }));
}

TEST(Lint, DifficultyLengthMismatchIsAlignmentViolation) {
  const auto corpus = GenerateCorpus(4, 1, GenerationProfile{});
  SimAnnotation sim = corpus[0].sim;
  sim.difficulty.push_back(0.5);
  const auto v = LintInstance(corpus[0].query, sim);
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const LintViolation& x) {
    return x.rule == LintRule::kAlignment;
  }));
}

TEST(Lint, DependencyCycleIsAlignmentViolation) {
  Query q;
  q.id = "c";
  q.text = "One. Two. Three.";
  const auto v = LintInstance(q, SimAnnotation{{0.1, 0.1, 0.1}, {{0, 1}, {1, 0}}});
  EXPECT_FALSE(v.empty());
}

}  // namespace
}  // namespace chunkroute
