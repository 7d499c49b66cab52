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

#ifndef CHUNKROUTE_TAPE_H_
#define CHUNKROUTE_TAPE_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "chunkroute/tensor.h"

namespace chunkroute::nn {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
// owning tape is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// Reverse-mode gradient tape.
//
// Values are recorded in creation order; Backward() walks them in reverse
// and calls each node's backward rule with the gradient of its output.
// Gradients accumulate additively, so a value used twice receives the sum of
// both contributions. Constants never receive gradients.
//
// Parameters are bound by reference: Bind() neither copies the parameter
// tensors nor allocates gradient storage; gradients flow straight into the
// caller's Gradients buffer. A tape is single-owner and not thread-safe.
class Tape {
 public:
  // Receives the gradient of this node's output. Implementations read
  // parent values from the tape and call AccumulateGrad on parents.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // Leaf whose gradient is stored on the tape (see Grad()).
  Var Variable(Tensor value);
  // Leaves referencing `params`. When `grads` is non-null, gradients are
  // added into it during Backward(); otherwise parameters act as constants.
  std::vector<Var> Bind(const ParameterSet& params, Gradients* grads);

  // Records an op output. `backward` may be empty for non-differentiable
  // outputs; it is dropped when no parent requires a gradient.
  Var Record(const char* op, Tensor value, std::initializer_list<Var> parents,
             BackwardFn backward);
  Var Record(const char* op, Tensor value, const std::vector<Var>& parents,
             BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1x1.
  void Backward(Var loss);

  const Tensor& Value(Var v) const;
  // Gradient accumulated for `v` (zeros if none reached it).
  Tensor Grad(Var v) const;
  bool RequiresGrad(Var v) const;
  // Adds `g` into the gradient slot of `v` if it requires one.
  void AccumulateGrad(Var v, const Tensor& g, double scale = 1.0);
  // Direct access to the gradient slot, allocating zeros on first use.
  // Returns nullptr when `v` does not require a gradient.
  Tensor* GradSlot(Var v);

  std::size_t size() const { return nodes_.size(); }
  const char* OpName(Var v) const;

  // When enabled (the default), every recorded value is scanned and a
  // NumericsError naming the op is thrown on NaN/Inf.
  void set_check_finite(bool on) { check_finite_ = on; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    Tensor grad;
    Tensor* external_grad = nullptr;
    bool has_grad = false;
    bool requires_grad = false;
    const char* op = "";
    BackwardFn backward;

    const Tensor& value() const { return external ? *external : owned; }
  };

  Var Push(Node node);
  void CheckFinite(const Node& node) const;

  std::deque<Node> nodes_;
  bool check_finite_ = true;
};

inline const Tensor& Var::value() const { return tape_->Value(*this); }

}  // namespace chunkroute::nn

#endif  // CHUNKROUTE_TAPE_H_
