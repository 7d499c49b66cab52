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


#ifndef CHUNKROUTE_TESTS_TEST_UTIL_H_
#define CHUNKROUTE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chunkroute/rng.h"
#include "chunkroute/tensor.h"

namespace chunkroute::testing {

inline nn::Tensor RandomTensor(std::size_t rows, std::size_t cols, Rng& rng,
                               double scale = 1.0) {
  nn::Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.Normal(0.0, scale);
  return t;
}

inline nn::Tensor UniformTensor(std::size_t rows, std::size_t cols, Rng& rng,
                                double lo, double hi) {
  nn::Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.Uniform(lo, hi);
  return t;
}

inline std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(CHUNKROUTE_TEST_DATA_DIR) / name;
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace chunkroute::testing

#endif  // CHUNKROUTE_TESTS_TEST_UTIL_H_
