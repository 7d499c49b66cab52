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

#ifndef CHUNKROUTE_GRAD_CHECK_H_
#define CHUNKROUTE_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "chunkroute/tape.h"
#include "chunkroute/tensor.h"

namespace chunkroute::nn {

// Builds a scalar on `tape` from the bound parameter values.
using ScalarFn = std::function<Var(Tape& tape, std::span<const Var> params)>;

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor for the relative error; guards coordinates whose true
  // gradient is zero.
  double abs_floor = 1e-6;
  // When non-zero, at most this many coordinates per tensor are checked,
  // chosen with `seed`. Zero checks every coordinate.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  bool passed = false;
};

// Central-difference check of the gradient of `f` with respect to every
// tensor in `params`. rel_err = |analytic - numeric| / max(|analytic|,
// |numeric|, abs_floor). `params` is perturbed in place and restored.
// Throws NumericsError, naming the op, if a non-finite value appears.
GradCheckReport GradCheck(const ScalarFn& f, ParameterSet& params,
                          const GradCheckOptions& options = {});

}  // namespace chunkroute::nn

#endif  // CHUNKROUTE_GRAD_CHECK_H_
