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

#include "chunkroute/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chunkroute/errors.h"
#include "chunkroute/rng.h"

namespace chunkroute::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw NumericsError("tensor data length " + std::to_string(data_.size()) +
                        " does not match shape [" + std::to_string(rows) +
                        "x" + std::to_string(cols) + "]");
  }
}

Tensor Tensor::RowVector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(1, n, std::move(values));
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw NumericsError("ragged rows in FromRows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

std::string Tensor::ShapeString() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw NumericsError("item() on non-scalar tensor " + ShapeString());
  }
  return data_[0];
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::AddInPlace(const Tensor& other, double scale) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw NumericsError("AddInPlace shape mismatch " + ShapeString() + " vs " +
                        other.ShapeString());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    data_[i] += scale * other.data_[i];
  }
}

std::size_t ParameterSet::Add(std::string name, Tensor init) {
  if (Find(name)) throw ConfigError("duplicate parameter name " + name);
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(init));
  return tensors_.size() - 1;
}

std::optional<std::size_t> ParameterSet::Find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ParameterSet::TotalSize() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

std::vector<Tensor> ParameterSet::ZerosLike() const {
  std::vector<Tensor> out;
  out.reserve(tensors_.size());
  for (const auto& t : tensors_) out.emplace_back(t.rows(), t.cols());
  return out;
}

void ZeroGradients(Gradients& grads) {
  for (auto& g : grads) g.Fill(0.0);
}

void ScaleGradients(Gradients& grads, double s) {
  for (auto& g : grads) {
    for (double& v : g.values()) v *= s;
  }
}

double GradientNormSquared(const Gradients& grads) {
  double total = 0.0;
  for (const auto& g : grads) {
    for (double v : g.values()) total += v * v;
  }
  return total;
}

}  // namespace chunkroute::nn

namespace chunkroute {

std::string Rng::State() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void Rng::SetState(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (!in) throw ParseError("invalid RNG state");
}

}  // namespace chunkroute
