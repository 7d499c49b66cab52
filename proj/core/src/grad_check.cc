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

#include "chunkroute/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "chunkroute/errors.h"
#include "chunkroute/rng.h"

namespace chunkroute::nn {
namespace {

double Evaluate(const ScalarFn& f, const ParameterSet& params) {
  Tape tape;
  auto vars = tape.Bind(params, nullptr);
  Var out = f(tape, vars);
  return out.value().item();
}

}  // namespace

GradCheckReport GradCheck(const ScalarFn& f, ParameterSet& params,
                          const GradCheckOptions& options) {
  if (options.step < 1e-6 || options.step > 1e-3) {
    throw ConfigError("grad_check step must lie in [1e-6, 1e-3]");
  }
  Gradients grads = params.ZerosLike();
  {
    Tape tape;
    auto vars = tape.Bind(params, &grads);
    Var out = f(tape, vars);
    tape.Backward(out);
  }

  Rng rng(options.seed);
  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = params[p];
    std::vector<std::size_t> coords(t.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_tensor != 0 &&
        coords.size() > options.max_coords_per_tensor) {
      // Partial Fisher-Yates for a seeded subset.
      for (std::size_t i = 0; i < options.max_coords_per_tensor; ++i) {
        std::swap(coords[i], coords[i + rng.Index(coords.size() - i)]);
      }
      coords.resize(options.max_coords_per_tensor);
    }
    for (std::size_t i : coords) {
      const double saved = t[i];
      t[i] = saved + options.step;
      const double up = Evaluate(f, params);
      t[i] = saved - options.step;
      const double down = Evaluate(f, params);
      t[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double analytic = grads[p][i];
      if (!std::isfinite(numeric)) {
        throw NumericsError("grad_check: non-finite finite difference at " +
                            params.name(p) + "[" + std::to_string(i) + "]");
      }
      const double abs_err = std::abs(analytic - numeric);
      const double denom = std::max(
          {std::abs(analytic), std::abs(numeric), options.abs_floor});
      const double rel = abs_err / denom;
      ++report.coordinates;
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel > report.max_rel_error || report.worst_param.empty()) {
        report.max_rel_error = std::max(rel, report.max_rel_error);
        if (rel >= report.max_rel_error) {
          report.worst_param = params.name(p);
          report.worst_index = i;
          report.worst_analytic = analytic;
          report.worst_numeric = numeric;
        }
      }
    }
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace chunkroute::nn
