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

#ifndef CHUNKROUTE_ADAM_H_
#define CHUNKROUTE_ADAM_H_

#include <cstdint>

#include "chunkroute/tensor.h"

namespace chunkroute::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient-norm clip; <= 0 disables.
  double max_grad_norm = 0.0;
};

// Adam with bias correction. Moment buffers are aligned with the parameter
// set passed to the constructor.
class Adam {
 public:
  Adam(const ParameterSet& params, AdamOptions options);

  // Applies one update. `grads` must be aligned with `params`.
  void Step(ParameterSet& params, const Gradients& grads);

  std::int64_t steps() const { return steps_; }
  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }

 private:
  AdamOptions options_;
  Gradients m_;
  Gradients v_;
  std::int64_t steps_ = 0;
};

}  // namespace chunkroute::nn

#endif  // CHUNKROUTE_ADAM_H_
