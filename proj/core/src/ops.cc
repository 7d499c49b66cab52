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

#include "chunkroute/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chunkroute/errors.h"

namespace chunkroute::nn {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap AsMatrix(const Tensor& t) {
  return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}
MutMap AsMatrix(Tensor& t) {
  return MutMap(t.data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void ShapeMismatch(const char* op, const Tensor& a,
                                const Tensor& b) {
  throw NumericsError(std::string(op) + ": incompatible shapes " +
                      a.ShapeString() + " and " + b.ShapeString());
}

Tape& TapeOf(Var a) {
  if (!a.valid()) throw NumericsError("operation on an unbound Var");
  return *a.tape();
}

enum class Broadcast { kSame, kRow, kCol, kScalar };

Broadcast Classify(const char* op, const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kSame;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::kCol;
  ShapeMismatch(op, a, b);
}

// Value of the broadcast right operand at flat position (r, c).
inline double BroadcastAt(const Tensor& b, Broadcast kind, std::size_t r,
                          std::size_t c) {
  switch (kind) {
    case Broadcast::kSame:
      return b(r, c);
    case Broadcast::kRow:
      return b(0, c);
    case Broadcast::kCol:
      return b(r, 0);
    case Broadcast::kScalar:
      return b(0, 0);
  }
  return 0.0;
}

// Reduces a full-shape gradient onto the broadcast operand's shape.
Tensor ReduceTo(const Tensor& g, Broadcast kind, std::size_t rows,
                std::size_t cols) {
  if (kind == Broadcast::kSame) return g;
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      switch (kind) {
        case Broadcast::kRow:
          out(0, c) += g(r, c);
          break;
        case Broadcast::kCol:
          out(r, 0) += g(r, c);
          break;
        default:
          out(0, 0) += g(r, c);
      }
    }
  }
  return out;
}

template <typename F>
Tensor Map(const Tensor& a, F f) {
  Tensor out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

// Elementwise op whose derivative only depends on the input value.
template <typename F, typename D>
Var Unary(const char* op, Var a, F f, D df) {
  Tape& tape = TapeOf(a);
  Tensor out = Map(a.value(), f);
  return tape.Record(op, std::move(out), {a},
                     [a, df](Tape& t, const Tensor& g) {
                       Tensor* slot = t.GradSlot(a);
                       if (slot == nullptr) return;
                       const Tensor& x = t.Value(a);
                       for (std::size_t i = 0; i < x.size(); ++i) {
                         (*slot)[i] += g[i] * df(x[i]);
                       }
                     });
}

}  // namespace

Var MatMul(Var a, Var b) {
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) ShapeMismatch("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  AsMatrix(out).noalias() = AsMatrix(av) * AsMatrix(bv);
  return tape.Record("matmul", std::move(out), {a, b},
                     [a, b](Tape& t, const Tensor& g) {
                       if (Tensor* ga = t.GradSlot(a)) {
                         AsMatrix(*ga).noalias() +=
                             AsMatrix(g) * AsMatrix(t.Value(b)).transpose();
                       }
                       if (Tensor* gb = t.GradSlot(b)) {
                         AsMatrix(*gb).noalias() +=
                             AsMatrix(t.Value(a)).transpose() * AsMatrix(g);
                       }
                     });
}

Var Transpose(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  AsMatrix(out) = AsMatrix(av).transpose();
  return tape.Record("transpose", std::move(out), {a},
                     [a](Tape& t, const Tensor& g) {
                       if (Tensor* ga = t.GradSlot(a)) {
                         AsMatrix(*ga) += AsMatrix(g).transpose();
                       }
                     });
}

namespace {

Var AddSub(const char* op, Var a, Var b, double sign) {
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const Broadcast kind = Classify(op, av, bv);
  Tensor out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) {
      out(r, c) = av(r, c) + sign * BroadcastAt(bv, kind, r, c);
    }
  }
  const std::size_t br = bv.rows();
  const std::size_t bc = bv.cols();
  return tape.Record(op, std::move(out), {a, b},
                     [a, b, kind, sign, br, bc](Tape& t, const Tensor& g) {
                       t.AccumulateGrad(a, g);
                       if (t.RequiresGrad(b)) {
                         t.AccumulateGrad(b, ReduceTo(g, kind, br, bc), sign);
                       }
                     });
}

}  // namespace

Var Add(Var a, Var b) { return AddSub("add", a, b, 1.0); }
Var Sub(Var a, Var b) { return AddSub("sub", a, b, -1.0); }

Var Mul(Var a, Var b) {
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const Broadcast kind = Classify("mul", av, bv);
  Tensor out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) {
      out(r, c) = av(r, c) * BroadcastAt(bv, kind, r, c);
    }
  }
  return tape.Record(
      "mul", std::move(out), {a, b}, [a, b, kind](Tape& t, const Tensor& g) {
        const Tensor& x = t.Value(a);
        const Tensor& y = t.Value(b);
        if (Tensor* ga = t.GradSlot(a)) {
          for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < x.cols(); ++c) {
              (*ga)(r, c) += g(r, c) * BroadcastAt(y, kind, r, c);
            }
          }
        }
        if (t.RequiresGrad(b)) {
          Tensor full(x.rows(), x.cols());
          for (std::size_t i = 0; i < x.size(); ++i) full[i] = g[i] * x[i];
          t.AccumulateGrad(b, ReduceTo(full, kind, y.rows(), y.cols()));
        }
      });
}

Var Scale(Var a, double s) {
  return Unary(
      "scale", a, [s](double x) { return s * x; },
      [s](double) { return s; });
}

Var AddScalar(Var a, double s) {
  return Unary(
      "add_scalar", a, [s](double x) { return x + s; },
      [](double) { return 1.0; });
}

Var Exp(Var a) {
  return Unary(
      "exp", a, [](double x) { return std::exp(x); },
      [](double x) { return std::exp(x); });
}

Var Log(Var a) {
  return Unary(
      "log", a, [](double x) { return std::log(x); },
      [](double x) { return 1.0 / x; });
}

Var Square(Var a) {
  return Unary(
      "square", a, [](double x) { return x * x; },
      [](double x) { return 2.0 * x; });
}

Var Relu(Var a) {
  return Unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Gelu(Var a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  // Phi(x) is kept for the backward pass.
  Tensor cdf(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) {
    cdf[i] = 0.5 * (1.0 + std::erf(av[i] * kInvSqrt2));
    out[i] = av[i] * cdf[i];
  }
  return tape.Record("gelu", std::move(out), {a},
                     [a, cdf = std::move(cdf)](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       const Tensor& x = t.Value(a);
                       for (std::size_t i = 0; i < x.size(); ++i) {
                         const double pdf =
                             kInvSqrt2Pi * std::exp(-0.5 * x[i] * x[i]);
                         (*ga)[i] += g[i] * (cdf[i] + x[i] * pdf);
                       }
                     });
}

Var Clip(Var a, double lo, double hi) {
  return Unary(
      "clip", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var Minimum(Var a, Var b) {
  Tape& tape = TapeOf(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    ShapeMismatch("minimum", av, bv);
  }
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = std::min(av[i], bv[i]);
  return tape.Record("minimum", std::move(out), {a, b},
                     [a, b](Tape& t, const Tensor& g) {
                       const Tensor& x = t.Value(a);
                       const Tensor& y = t.Value(b);
                       Tensor* ga = t.GradSlot(a);
                       Tensor* gb = t.GradSlot(b);
                       for (std::size_t i = 0; i < x.size(); ++i) {
                         if (x[i] <= y[i]) {
                           if (ga) (*ga)[i] += g[i];
                         } else if (gb) {
                           (*gb)[i] += g[i];
                         }
                       }
                     });
}

Var Softmax(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  Tensor y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    auto out = y.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      out[c] = std::exp(in[c] - m);
      z += out[c];
    }
    for (double& v : out) v /= z;
  }
  Tensor saved = y;
  return tape.Record("softmax", std::move(y), {a},
                     [a, saved = std::move(saved)](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (std::size_t r = 0; r < saved.rows(); ++r) {
                         auto p = saved.row(r);
                         auto gr = g.row(r);
                         double dot = 0.0;
                         for (std::size_t c = 0; c < p.size(); ++c) {
                           dot += gr[c] * p[c];
                         }
                         auto out = ga->row(r);
                         for (std::size_t c = 0; c < p.size(); ++c) {
                           out[c] += p[c] * (gr[c] - dot);
                         }
                       }
                     });
}

Var LogSoftmax(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  Tensor y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (double v : in) z += std::exp(v - m);
    const double lse = m + std::log(z);
    for (std::size_t c = 0; c < in.size(); ++c) y(r, c) = in[c] - lse;
  }
  return tape.Record("log_softmax", y, {a},
                     [a, y](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (std::size_t r = 0; r < y.rows(); ++r) {
                         double gsum = 0.0;
                         for (double v : g.row(r)) gsum += v;
                         for (std::size_t c = 0; c < y.cols(); ++c) {
                           (*ga)(r, c) += g(r, c) - std::exp(y(r, c)) * gsum;
                         }
                       }
                     });
}

Var LayerNorm(Var a, double eps) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  const std::size_t n = x.cols();
  if (n == 0) throw NumericsError("layer_norm: zero-width input");
  Tensor y(x.rows(), n);
  std::vector<double> inv_std(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) y(r, c) = (in[c] - mean) * inv_std[r];
  }
  Tensor saved = y;
  return tape.Record(
      "layer_norm", std::move(y), {a},
      [a, saved = std::move(saved), inv_std = std::move(inv_std)](
          Tape& t, const Tensor& g) {
        Tensor* ga = t.GradSlot(a);
        if (ga == nullptr) return;
        const double n = static_cast<double>(saved.cols());
        for (std::size_t r = 0; r < saved.rows(); ++r) {
          double g_mean = 0.0;
          double gy_mean = 0.0;
          for (std::size_t c = 0; c < saved.cols(); ++c) {
            g_mean += g(r, c);
            gy_mean += g(r, c) * saved(r, c);
          }
          g_mean /= n;
          gy_mean /= n;
          for (std::size_t c = 0; c < saved.cols(); ++c) {
            (*ga)(r, c) +=
                inv_std[r] * (g(r, c) - g_mean - saved(r, c) * gy_mean);
          }
        }
      });
}

Var ScaledDotProductAttention(Var q, Var k, Var v, const AttentionMask& mask) {
  Tape& tape = TapeOf(q);
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  if (qv.cols() != kv.cols()) ShapeMismatch("attention(q,k)", qv, kv);
  if (kv.rows() != vv.rows()) ShapeMismatch("attention(k,v)", kv, vv);
  const std::size_t nq = qv.rows();
  const std::size_t nk = kv.rows();
  if (!mask.empty() && mask.size() != nq * nk) {
    throw NumericsError("attention: mask has " + std::to_string(mask.size()) +
                        " entries, expected " + std::to_string(nq * nk));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(qv.cols()));

  Tensor probs(nq, nk);
  AsMatrix(probs).noalias() = AsMatrix(qv) * AsMatrix(kv).transpose();
  for (std::size_t i = 0; i < nq; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nk; ++j) {
      if (!mask.empty() && mask[i * nk + j] == 0) continue;
      probs(i, j) *= scale;
      m = std::max(m, probs(i, j));
    }
    if (!std::isfinite(m)) {
      throw NumericsError("attention: query row " + std::to_string(i) +
                          " has no visible keys");
    }
    double z = 0.0;
    for (std::size_t j = 0; j < nk; ++j) {
      if (!mask.empty() && mask[i * nk + j] == 0) {
        probs(i, j) = 0.0;
        continue;
      }
      probs(i, j) = std::exp(probs(i, j) - m);
      z += probs(i, j);
    }
    for (std::size_t j = 0; j < nk; ++j) probs(i, j) /= z;
  }
  Tensor out(nq, vv.cols());
  AsMatrix(out).noalias() = AsMatrix(probs) * AsMatrix(vv);

  return tape.Record(
      "attention", std::move(out), {q, k, v},
      [q, k, v, probs = std::move(probs), scale](Tape& t, const Tensor& g) {
        const Tensor& qv = t.Value(q);
        const Tensor& kv = t.Value(k);
        const Tensor& vv = t.Value(v);
        if (Tensor* gv = t.GradSlot(v)) {
          AsMatrix(*gv).noalias() += AsMatrix(probs).transpose() * AsMatrix(g);
        }
        if (!t.RequiresGrad(q) && !t.RequiresGrad(k)) return;
        // dS = P * (dP - rowsum(dP * P)), with dP = dO V^T.
        Tensor ds(probs.rows(), probs.cols());
        AsMatrix(ds).noalias() = AsMatrix(g) * AsMatrix(vv).transpose();
        for (std::size_t i = 0; i < ds.rows(); ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < ds.cols(); ++j) {
            dot += ds(i, j) * probs(i, j);
          }
          for (std::size_t j = 0; j < ds.cols(); ++j) {
            ds(i, j) = probs(i, j) * (ds(i, j) - dot) * scale;
          }
        }
        if (Tensor* gq = t.GradSlot(q)) {
          AsMatrix(*gq).noalias() += AsMatrix(ds) * AsMatrix(kv);
        }
        if (Tensor* gk = t.GradSlot(k)) {
          AsMatrix(*gk).noalias() += AsMatrix(ds).transpose() * AsMatrix(qv);
        }
      });
}

Var BlockAttention(Var q, Var k, Var v,
                   std::span<const std::size_t> block_sizes, std::size_t heads) {
  Tape& tape = TapeOf(q);
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  if (qv.rows() != kv.rows() || qv.cols() != kv.cols()) {
    ShapeMismatch("block_attention(q,k)", qv, kv);
  }
  if (kv.rows() != vv.rows() || kv.cols() != vv.cols()) {
    ShapeMismatch("block_attention(k,v)", kv, vv);
  }
  std::size_t total = 0;
  for (std::size_t n : block_sizes) {
    if (n == 0) throw NumericsError("block_attention: empty block");
    total += n;
  }
  if (total != qv.rows()) {
    throw NumericsError("block_attention: blocks cover " +
                        std::to_string(total) + " rows, input has " +
                        std::to_string(qv.rows()));
  }
  if (heads == 0 || qv.cols() % heads != 0) {
    throw NumericsError("block_attention: width " + std::to_string(qv.cols()) +
                        " not divisible by " + std::to_string(heads) +
                        " heads");
  }
  const auto dh = static_cast<Eigen::Index>(qv.cols() / heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<RowMajor> probs;
  probs.reserve(block_sizes.size() * heads);
  Tensor out(qv.rows(), qv.cols());
  const ConstMap Q = AsMatrix(qv), K = AsMatrix(kv), V = AsMatrix(vv);
  MutMap O = AsMatrix(out);
  Eigen::Index offset = 0;
  for (std::size_t n : block_sizes) {
    const auto len = static_cast<Eigen::Index>(n);
    for (std::size_t h = 0; h < heads; ++h) {
      const Eigen::Index c = static_cast<Eigen::Index>(h) * dh;
      RowMajor p = Q.block(offset, c, len, dh) *
                   K.block(offset, c, len, dh).transpose() * scale;
      for (Eigen::Index i = 0; i < len; ++i) {
        const double m = p.row(i).maxCoeff();
        p.row(i) = (p.row(i).array() - m).exp();
        p.row(i) /= p.row(i).sum();
      }
      O.block(offset, c, len, dh).noalias() = p * V.block(offset, c, len, dh);
      probs.push_back(std::move(p));
    }
    offset += len;
  }

  std::vector<std::size_t> sizes(block_sizes.begin(), block_sizes.end());
  return tape.Record(
      "block_attention", std::move(out), {q, k, v},
      [q, k, v, probs = std::move(probs), sizes = std::move(sizes), heads, dh,
       scale](Tape& t, const Tensor& g) {
        const ConstMap Q = AsMatrix(t.Value(q)), K = AsMatrix(t.Value(k)),
                       V = AsMatrix(t.Value(v)), G = AsMatrix(g);
        Tensor* gq = t.GradSlot(q);
        Tensor* gk = t.GradSlot(k);
        Tensor* gv = t.GradSlot(v);
        Eigen::Index offset = 0;
        std::size_t idx = 0;
        for (std::size_t n : sizes) {
          const auto len = static_cast<Eigen::Index>(n);
          for (std::size_t h = 0; h < heads; ++h, ++idx) {
            const Eigen::Index c = static_cast<Eigen::Index>(h) * dh;
            const RowMajor& p = probs[idx];
            const auto go = G.block(offset, c, len, dh);
            if (gv != nullptr) {
              AsMatrix(*gv).block(offset, c, len, dh).noalias() +=
                  p.transpose() * go;
            }
            if (gq == nullptr && gk == nullptr) continue;
            RowMajor ds = go * V.block(offset, c, len, dh).transpose();
            for (Eigen::Index i = 0; i < len; ++i) {
              const double dot = ds.row(i).dot(p.row(i));
              ds.row(i) =
                  (p.row(i).array() * (ds.row(i).array() - dot) * scale)
                      .matrix();
            }
            if (gq != nullptr) {
              AsMatrix(*gq).block(offset, c, len, dh).noalias() +=
                  ds * K.block(offset, c, len, dh);
            }
            if (gk != nullptr) {
              AsMatrix(*gk).block(offset, c, len, dh).noalias() +=
                  ds.transpose() * Q.block(offset, c, len, dh);
            }
          }
          offset += len;
        }
      });
}

Var EmbeddingLookup(Var table, std::span<const std::size_t> indices) {
  Tape& tape = TapeOf(table);
  const Tensor& tv = table.value();
  Tensor out(indices.size(), tv.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= tv.rows()) {
      throw NumericsError("embedding_lookup: index " +
                          std::to_string(indices[i]) + " out of range for " +
                          tv.ShapeString());
    }
    auto src = tv.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return tape.Record("embedding_lookup", std::move(out), {table},
                     [table, idx = std::move(idx)](Tape& t, const Tensor& g) {
                       Tensor* gt = t.GradSlot(table);
                       if (gt == nullptr) return;
                       for (std::size_t i = 0; i < idx.size(); ++i) {
                         auto dst = gt->row(idx[i]);
                         auto src = g.row(i);
                         for (std::size_t c = 0; c < dst.size(); ++c) {
                           dst[c] += src[c];
                         }
                       }
                     });
}

Var CrossEntropy(Var logits, std::span<const std::size_t> targets,
                 Reduction reduction) {
  const Tensor& lv = logits.value();
  if (targets.size() != lv.rows()) {
    throw NumericsError("cross_entropy: " + std::to_string(targets.size()) +
                        " targets for logits " + lv.ShapeString());
  }
  for (std::size_t t : targets) {
    if (t >= lv.cols()) {
      throw NumericsError("cross_entropy: target class " + std::to_string(t) +
                          " out of range for " + lv.ShapeString());
    }
  }
  Var nll = Scale(PickCols(LogSoftmax(logits), targets), -1.0);
  return reduction == Reduction::kMean ? Mean(nll) : Sum(nll);
}

Var BinaryCrossEntropy(Var probs, const Tensor& targets, Reduction reduction) {
  Tape& tape = TapeOf(probs);
  const Tensor& p = probs.value();
  if (p.rows() != targets.rows() || p.cols() != targets.cols()) {
    ShapeMismatch("bce", p, targets);
  }
  static constexpr double kEps = 1e-12;
  const double norm =
      reduction == Reduction::kMean ? 1.0 / static_cast<double>(p.size()) : 1.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = std::clamp(p[i], kEps, 1.0 - kEps);
    const double y = targets[i];
    loss -= y * std::log(pi) + (1.0 - y) * std::log(1.0 - pi);
  }
  return tape.Record("bce", Tensor::Scalar(loss * norm), {probs},
                     [probs, targets, norm](Tape& t, const Tensor& g) {
                       Tensor* gp = t.GradSlot(probs);
                       if (gp == nullptr) return;
                       const Tensor& p = t.Value(probs);
                       for (std::size_t i = 0; i < p.size(); ++i) {
                         const double pi = std::clamp(p[i], kEps, 1.0 - kEps);
                         const double y = targets[i];
                         (*gp)[i] += g[0] * norm * (pi - y) / (pi * (1.0 - pi));
                       }
                     });
}

Var Sum(Var a) {
  Tape& tape = TapeOf(a);
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return tape.Record("sum", Tensor::Scalar(s), {a},
                     [a](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (double& v : ga->values()) v += g[0];
                     });
}

Var Mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw NumericsError("mean of an empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(n));
}

Var RowSum(Var a) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  Tensor out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) out(r, 0) += v;
  }
  return tape.Record("row_sum", std::move(out), {a},
                     [a](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (std::size_t r = 0; r < ga->rows(); ++r) {
                         for (double& v : ga->row(r)) v += g(r, 0);
                       }
                     });
}

Var SliceCols(Var a, std::size_t begin, std::size_t count) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (begin + count > x.cols()) {
    throw NumericsError("slice_cols: columns [" + std::to_string(begin) + ", " +
                        std::to_string(begin + count) + ") out of range for " +
                        x.ShapeString());
  }
  Tensor out(x.rows(), count);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < count; ++c) out(r, c) = x(r, begin + c);
  }
  return tape.Record("slice_cols", std::move(out), {a},
                     [a, begin, count](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (std::size_t r = 0; r < g.rows(); ++r) {
                         for (std::size_t c = 0; c < count; ++c) {
                           (*ga)(r, begin + c) += g(r, c);
                         }
                       }
                     });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw NumericsError("concat_cols: no inputs");
  Tape& tape = TapeOf(parts.front());
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) {
      ShapeMismatch("concat_cols", parts.front().value(), p.value());
    }
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& x = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, offset + c) = x(r, c);
    }
    offset += x.cols();
  }
  return tape.Record("concat_cols", std::move(out), parts,
                     [parts](Tape& t, const Tensor& g) {
                       std::size_t offset = 0;
                       for (const Var& p : parts) {
                         const std::size_t w = t.Value(p).cols();
                         if (Tensor* gp = t.GradSlot(p)) {
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             for (std::size_t c = 0; c < w; ++c) {
                               (*gp)(r, c) += g(r, offset + c);
                             }
                           }
                         }
                         offset += w;
                       }
                     });
}

Var PickCols(Var a, std::span<const std::size_t> cols) {
  Tape& tape = TapeOf(a);
  const Tensor& x = a.value();
  if (cols.size() != x.rows()) {
    throw NumericsError("pick_cols: " + std::to_string(cols.size()) +
                        " indices for " + x.ShapeString());
  }
  Tensor out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (cols[r] >= x.cols()) {
      throw NumericsError("pick_cols: column " + std::to_string(cols[r]) +
                          " out of range for " + x.ShapeString());
    }
    out(r, 0) = x(r, cols[r]);
  }
  std::vector<std::size_t> idx(cols.begin(), cols.end());
  return tape.Record("pick_cols", std::move(out), {a},
                     [a, idx = std::move(idx)](Tape& t, const Tensor& g) {
                       Tensor* ga = t.GradSlot(a);
                       if (ga == nullptr) return;
                       for (std::size_t r = 0; r < idx.size(); ++r) {
                         (*ga)(r, idx[r]) += g(r, 0);
                       }
                     });
}

Var Detach(Var a) { return TapeOf(a).Constant(a.value()); }

}  // namespace chunkroute::nn
