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

#include "chunkroute/adam.h"

#include <cmath>

#include "chunkroute/errors.h"

namespace chunkroute::nn {

Adam::Adam(const ParameterSet& params, AdamOptions options)
    : options_(options), m_(params.ZerosLike()), v_(params.ZerosLike()) {
  if (!(options_.lr > 0.0)) throw ConfigError("Adam learning rate must be > 0");
}

void Adam::Step(ParameterSet& params, const Gradients& grads) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    throw NumericsError("Adam::Step: gradient/parameter count mismatch");
  }
  double clip = 1.0;
  if (options_.max_grad_norm > 0.0) {
    const double norm = std::sqrt(GradientNormSquared(grads));
    if (norm > options_.max_grad_norm) clip = options_.max_grad_norm / norm;
  }
  ++steps_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = params[p];
    const Tensor& g = grads[p];
    Tensor& m = m_[p];
    Tensor& v = v_[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i] * clip;
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= options_.lr * mhat / (std::sqrt(vhat) + options_.epsilon);
    }
  }
}

}  // namespace chunkroute::nn
