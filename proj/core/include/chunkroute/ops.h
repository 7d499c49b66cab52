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

// Differentiable operations over Tape values. Each op computes its forward
// value eagerly and registers the matching backward rule.
//
// Binary elementwise ops (Add, Sub, Mul) accept a right-hand side that is
// either the same shape as the left, a 1xC row, an Rx1 column, or a 1x1
// scalar; the smaller operand is broadcast and its gradient is reduced back.

#ifndef CHUNKROUTE_OPS_H_
#define CHUNKROUTE_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chunkroute/tape.h"
#include "chunkroute/tensor.h"

namespace chunkroute::nn {

enum class Reduction { kMean, kSum };

inline constexpr double kLayerNormEpsilon = 1e-5;

Var MatMul(Var a, Var b);
Var Transpose(Var a);

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double s);
Var AddScalar(Var a, double s);

Var Exp(Var a);
// Natural log; inputs must be positive.
Var Log(Var a);
Var Square(Var a);
Var Relu(Var a);
// Exact (erf-based) GELU.
Var Gelu(Var a);
// Elementwise min of two same-shape values. At ties the gradient goes to `a`.
Var Minimum(Var a, Var b);
// Clamp to [lo, hi]; zero gradient outside the interval.
Var Clip(Var a, double lo, double hi);

// Row-wise softmax, max-shifted for stability.
Var Softmax(Var a);
Var LogSoftmax(Var a);
// Row-wise (x - mean) / sqrt(var + eps), population variance, no affine.
Var LayerNorm(Var a, double eps = kLayerNormEpsilon);

// Attention mask: mask[i * n_keys + j] != 0 means query i may attend key j.
using AttentionMask = std::vector<std::uint8_t>;

// softmax(Q K^T / sqrt(d_k) restricted to `mask`) V. Q is n_q x d_k, K is
// n_k x d_k, V is n_k x d_v. An empty mask allows every pair.
Var ScaledDotProductAttention(Var q, Var k, Var v,
                              const AttentionMask& mask = {});

// Multi-head self-attention restricted to contiguous row blocks: a row of
// block b attends only to rows of block b. q, k, v are N x d, d divisible by
// `heads`; head h owns columns [h d / heads, (h + 1) d / heads). Equivalent to
// ScaledDotProductAttention per block and head, with the outputs concatenated.
Var BlockAttention(Var q, Var k, Var v,
                   std::span<const std::size_t> block_sizes, std::size_t heads);

// Rows of `table` selected by `indices`.
Var EmbeddingLookup(Var table, std::span<const std::size_t> indices);

// Negative log-likelihood of `targets` under row-wise softmax(logits).
Var CrossEntropy(Var logits, std::span<const std::size_t> targets,
                 Reduction reduction = Reduction::kMean);
// -[y log p + (1 - y) log(1 - p)] with p clamped to [1e-12, 1 - 1e-12].
Var BinaryCrossEntropy(Var probs, const Tensor& targets,
                       Reduction reduction = Reduction::kMean);

Var Sum(Var a);
Var Mean(Var a);
// Per-row sum, giving an Rx1 column.
Var RowSum(Var a);

Var SliceCols(Var a, std::size_t begin, std::size_t count);
Var ConcatCols(const std::vector<Var>& parts);
// out(i, 0) = a(i, cols[i]).
Var PickCols(Var a, std::span<const std::size_t> cols);

// Copy of the value with no gradient path.
Var Detach(Var a);

// Affine map x W + b with b broadcast over rows.
inline Var Linear(Var x, Var w, Var b) { return Add(MatMul(x, w), b); }

}  // namespace chunkroute::nn

#endif  // CHUNKROUTE_OPS_H_
