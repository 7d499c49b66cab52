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

#include "chunkroute/tape.h"

#include "chunkroute/errors.h"

namespace chunkroute::nn {

Var Tape::Push(Node node) {
  if (check_finite_) CheckFinite(node);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

void Tape::CheckFinite(const Node& node) const {
  if (!node.value().AllFinite()) {
    throw NumericsError(std::string("non-finite value produced by op '") +
                        node.op + "' (shape " + node.value().ShapeString() +
                        ")");
  }
}

Var Tape::Constant(Tensor value) {
  Node node;
  node.owned = std::move(value);
  node.op = "constant";
  return Push(std::move(node));
}

Var Tape::Variable(Tensor value) {
  Node node;
  node.owned = std::move(value);
  node.requires_grad = true;
  node.op = "variable";
  return Push(std::move(node));
}

std::vector<Var> Tape::Bind(const ParameterSet& params, Gradients* grads) {
  if (grads != nullptr && grads->size() != params.size()) {
    throw NumericsError("gradient buffer does not match parameter set");
  }
  std::vector<Var> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    Node node;
    node.external = &params[i];
    node.op = "parameter";
    if (grads != nullptr) {
      Tensor& g = (*grads)[i];
      if (g.rows() != params[i].rows() || g.cols() != params[i].cols()) {
        throw NumericsError("gradient slot for " + params.name(i) +
                            " has shape " + g.ShapeString() + ", expected " +
                            params[i].ShapeString());
      }
      node.external_grad = &g;
      node.requires_grad = true;
    }
    nodes_.push_back(std::move(node));
    vars.push_back(Var(this, static_cast<std::uint32_t>(nodes_.size() - 1)));
  }
  return vars;
}

Var Tape::Record(const char* op, Tensor value,
                 std::initializer_list<Var> parents, BackwardFn backward) {
  Node node;
  node.owned = std::move(value);
  node.op = op;
  for (const Var& p : parents) {
    if (p.tape() != this) {
      throw NumericsError(std::string("op '") + op +
                          "' mixes values from different tapes");
    }
    if (nodes_[p.id()].requires_grad) node.requires_grad = true;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  return Push(std::move(node));
}

Var Tape::Record(const char* op, Tensor value, const std::vector<Var>& parents,
                 BackwardFn backward) {
  Node node;
  node.owned = std::move(value);
  node.op = op;
  for (const Var& p : parents) {
    if (p.tape() != this) {
      throw NumericsError(std::string("op '") + op +
                          "' mixes values from different tapes");
    }
    if (nodes_[p.id()].requires_grad) node.requires_grad = true;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  return Push(std::move(node));
}

void Tape::Backward(Var loss) {
  const Tensor& v = Value(loss);
  if (v.size() != 1) {
    throw NumericsError("Backward requires a scalar loss, got " +
                        v.ShapeString());
  }
  if (!nodes_[loss.id()].requires_grad) return;
  AccumulateGrad(loss, Tensor::Scalar(1.0));
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward || !node.has_grad) continue;
    // The gradient slot stays owned by the node; backward rules only touch
    // parent slots, which have strictly smaller ids.
    node.backward(*this, node.grad);
  }
}

const Tensor& Tape::Value(Var v) const { return nodes_.at(v.id()).value(); }

Tensor Tape::Grad(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (node.external_grad != nullptr) return *node.external_grad;
  if (node.has_grad) return node.grad;
  return Tensor(node.value().rows(), node.value().cols());
}

bool Tape::RequiresGrad(Var v) const { return nodes_.at(v.id()).requires_grad; }

const char* Tape::OpName(Var v) const { return nodes_.at(v.id()).op; }

Tensor* Tape::GradSlot(Var v) {
  Node& node = nodes_[v.id()];
  if (!node.requires_grad) return nullptr;
  if (node.external_grad != nullptr) {
    node.has_grad = true;
    return node.external_grad;
  }
  if (!node.has_grad) {
    node.grad = Tensor(node.value().rows(), node.value().cols());
    node.has_grad = true;
  }
  return &node.grad;
}

void Tape::AccumulateGrad(Var v, const Tensor& g, double scale) {
  Tensor* slot = GradSlot(v);
  if (slot == nullptr) return;
  slot->AddInPlace(g, scale);
}

}  // namespace chunkroute::nn
