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

#ifndef CHUNKROUTE_TENSOR_H_
#define CHUNKROUTE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chunkroute::nn {

// Dense row-major matrix of doubles. Every value in the numerics layer is
// rank 2; scalars are 1x1 and vectors are 1xn rows.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor Scalar(double v) { return Tensor(1, 1, v); }
  static Tensor RowVector(std::vector<double> values);
  static Tensor FromRows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  std::vector<std::size_t> shape() const { return {rows_, cols_}; }
  std::string ShapeString() const;

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // Scalar value of a 1x1 tensor.
  double item() const;

  bool AllFinite() const;
  void Fill(double v);
  // this += other (same shape).
  void AddInPlace(const Tensor& other, double scale = 1.0);

  friend bool operator==(const Tensor& a, const Tensor& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Ordered, named collection of trainable tensors.
class ParameterSet {
 public:
  std::size_t Add(std::string name, Tensor init);

  std::size_t size() const { return tensors_.size(); }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  std::optional<std::size_t> Find(const std::string& name) const;

  // Total number of scalar parameters.
  std::size_t TotalSize() const;
  std::vector<Tensor> ZerosLike() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

// One gradient tensor per parameter, aligned with a ParameterSet.
using Gradients = std::vector<Tensor>;

void ZeroGradients(Gradients& grads);
void ScaleGradients(Gradients& grads, double s);
// Sum of squared gradient entries.
double GradientNormSquared(const Gradients& grads);

}  // namespace chunkroute::nn

#endif  // CHUNKROUTE_TENSOR_H_
