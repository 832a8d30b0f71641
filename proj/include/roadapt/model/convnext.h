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

#ifndef ROADAPT_MODEL_CONVNEXT_H_
#define ROADAPT_MODEL_CONVNEXT_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "roadapt/nn/ops.h"
#include "roadapt/nn/parameter.h"
#include "roadapt/nn/tape.h"

namespace roadapt::model {

using Rng = std::mt19937_64;

// Draws from a double-precision normal and rounds to T, so float and double
// models built from one seed hold the same values up to rounding.
template <typename T>
nn::Tensor<T> NormalTensor(nn::Shape shape, double stddev, Rng& rng) {
  nn::Tensor<T> t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(dist(rng));
  return t;
}

struct BlockInit {
  double conv_std = 0.02;
  double expand_std = 0.02;
  double project_std = 0.0;  // 0 makes the block an identity map
};

inline constexpr double kNormEps = 1e-6;

// One ConvNeXt-1D block over x[T x C]:
//   x + Project(GELU(Expand(Norm(DepthwiseConv(x)))))
template <typename T>
struct ConvNeXtBlock {
  nn::Parameter<T> dw_kernel;   // C x k
  nn::Parameter<T> dw_bias;     // C
  nn::Parameter<T> norm_gain;   // C
  nn::Parameter<T> norm_shift;  // C
  nn::Parameter<T> expand_w;    // C x (e*C)
  nn::Parameter<T> expand_b;    // e*C
  nn::Parameter<T> project_w;   // (e*C) x C
  nn::Parameter<T> project_b;   // C

  static ConvNeXtBlock Create(const std::string& prefix, std::size_t channels,
                              std::size_t kernel, std::size_t expansion, bool trainable,
                              const BlockInit& init, Rng& rng) {
    const std::size_t wide = channels * expansion;
    auto make = [&](const char* name, nn::Tensor<T> v) {
      return nn::Parameter<T>(prefix + name, std::move(v), trainable);
    };
    auto normal_or_zero = [&](nn::Shape s, double sd) {
      return sd > 0 ? NormalTensor<T>(std::move(s), sd, rng) : nn::Tensor<T>(std::move(s));
    };
    ConvNeXtBlock b;
    b.dw_kernel = make("dwconv.weight", normal_or_zero({channels, kernel}, init.conv_std));
    b.dw_bias = make("dwconv.bias", nn::Tensor<T>({channels}));
    b.norm_gain = make("norm.gain", nn::Tensor<T>::Full({channels}, T(1)));
    b.norm_shift = make("norm.shift", nn::Tensor<T>({channels}));
    b.expand_w = make("expand.weight", normal_or_zero({channels, wide}, init.expand_std));
    b.expand_b = make("expand.bias", nn::Tensor<T>({wide}));
    b.project_w = make("project.weight", normal_or_zero({wide, channels}, init.project_std));
    b.project_b = make("project.bias", nn::Tensor<T>({channels}));
    return b;
  }

  nn::Var Apply(nn::Tape<T>& tape, nn::Var x) const {
    nn::Var h = nn::DepthwiseConv1d(tape, x, tape.Param(dw_kernel), tape.Param(dw_bias));
    h = nn::LayerNorm(tape, h, tape.Param(norm_gain), tape.Param(norm_shift),
                      static_cast<T>(kNormEps));
    h = nn::Linear(tape, h, tape.Param(expand_w), tape.Param(expand_b));
    h = nn::Gelu(tape, h);
    h = nn::Linear(tape, h, tape.Param(project_w), tape.Param(project_b));
    return nn::Add(tape, x, h);
  }

  std::vector<nn::Parameter<T>*> parameters() {
    return {&dw_kernel, &dw_bias, &norm_gain, &norm_shift,
            &expand_w,  &expand_b, &project_w, &project_b};
  }
  std::vector<const nn::Parameter<T>*> parameters() const {
    return {&dw_kernel, &dw_bias, &norm_gain, &norm_shift,
            &expand_w,  &expand_b, &project_w, &project_b};
  }
};

}  // namespace roadapt::model

#endif  // ROADAPT_MODEL_CONVNEXT_H_
