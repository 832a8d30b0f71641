// Copyright 2026 The roadapt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Differentiable primitives recorded on a Tape. None of them mutates its
// inputs. Shape problems raise DimensionError naming the axis.

#ifndef ROADAPT_NN_OPS_H_
#define ROADAPT_NN_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "roadapt/nn/tape.h"

namespace roadapt::nn {

// x[T x in] * w[in x out] + b[out]. `b` may be an invalid Var (no bias).
template <typename T>
Var Linear(Tape<T>& tape, Var x, Var w, Var b);

// Same-padded depthwise convolution over time.
// x[T x C], kernel[C x k] with k odd, optional bias[C].
template <typename T>
Var DepthwiseConv1d(Tape<T>& tape, Var x, Var kernel, Var bias);

// Per-row normalization over channels followed by gain/shift.
template <typename T>
Var LayerNorm(Tape<T>& tape, Var x, Var gain, Var shift, T eps);

template <typename T>
Var Gelu(Tape<T>& tape, Var x);

template <typename T>
Var Add(Tape<T>& tape, Var a, Var b);

// Elementwise product of two same-shape tensors.
template <typename T>
Var Mul(Tape<T>& tape, Var a, Var b);

// Scales row t of x[T x C] by mask[t].
template <typename T>
Var MulRowMask(Tape<T>& tape, Var x, std::span<const T> mask);

// Rows of table[V x d] selected by ids. Backward scatter-adds.
template <typename T>
Var Embedding(Tape<T>& tape, std::span<const std::int32_t> ids, Var table);

// Concatenates rank-2 tensors with equal row counts along columns.
template <typename T>
Var ConcatColumns(Tape<T>& tape, const std::vector<Var>& parts);

// Sum of all elements, as a scalar.
template <typename T>
Var Sum(Tape<T>& tape, Var x);

// Mean of squared differences over all elements, as a scalar.
template <typename T>
Var Mse(Tape<T>& tape, Var a, Var b);

// sum_i weights[i] * scalars[i].
template <typename T>
Var WeightedSum(Tape<T>& tape, const std::vector<Var>& scalars,
                std::span<const T> weights);

}  // namespace roadapt::nn

#endif  // ROADAPT_NN_OPS_H_
