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

// Frozen stand-in for the pretrained flow-matching TTS model.
//
// The velocity network sees [noisy mel | text embedding | time features] per
// frame, projects to model_dim, runs ConvNeXt-1D mixer blocks and maps back to
// mel channels through a linear head plus a frozen per-channel skip from the
// noisy input. Every parameter is frozen and seeded.

#ifndef ROADAPT_MODEL_BACKBONE_H_
#define ROADAPT_MODEL_BACKBONE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "roadapt/model/convnext.h"
#include "roadapt/nn/tape.h"
#include "roadapt/text/codec.h"

namespace roadapt::model {

struct BackboneConfig {
  std::size_t vocab_size = 0;  // |V_TTS|
  std::size_t text_dim = 32;   // must match the adapter's hidden_dim
  std::size_t mel_dim = 16;
  std::size_t time_dim = 16;
  std::size_t model_dim = 32;
  std::size_t n_blocks = 2;
  std::size_t kernel_size = 5;
  std::size_t expansion = 2;
  std::uint64_t seed = 1234;
  double embedding_std = 1.0;
  double skip_gain = -1.0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static BackboneConfig FromJson(const nlohmann::json& j);
};

// Sinusoidal features of t in [0,1]: [sin(1000 t f_i), cos(1000 t f_i)].
template <typename T>
std::vector<T> TimeFeatures(T t, std::size_t dim);

template <typename T>
class FrozenBackbone {
 public:
  explicit FrozenBackbone(const BackboneConfig& config);

  const BackboneConfig& config() const { return config_; }

  // E_TTS(seq) with rows outside the English mask zeroed.
  nn::Var EmbedFrozen(nn::Tape<T>& tape, const text::TextSequence& seq,
                      const text::LanguageMask& mask) const;
  nn::Tensor<T> EmbedFrozen(const text::TextSequence& seq, const text::LanguageMask& mask) const;

  // v(x_t, t | h_text), [T x mel_dim]. Throws ValidationError for t outside
  // [0, 1] and DimensionError on shape disagreement.
  nn::Var PredictVelocity(nn::Tape<T>& tape, nn::Var xt, T t, nn::Var h_text) const;
  nn::Tensor<T> PredictVelocity(const nn::Tensor<T>& xt, T t, const nn::Tensor<T>& h_text) const;

  // Euler integration of the velocity field from noise (t=0) to t=1 with
  // uniform steps. Noise is drawn from `seed`.
  nn::Tensor<T> Sample(const nn::Tensor<T>& h_text, std::size_t n_frames, std::size_t n_steps,
                       std::uint64_t seed) const;

  std::vector<const nn::Parameter<T>*> parameters() const;
  std::size_t NumParameters() const;

  // SHA-256 (hex) over every parameter's name, shape and raw value bytes.
  std::string ContentHash() const;

  // Replaces parameter values (e.g. from a checkpoint). Names and shapes must
  // match; all parameters stay frozen.
  void LoadValues(const std::vector<std::pair<std::string, nn::Tensor<T>>>& values);

 private:
  std::vector<nn::Parameter<T>*> mutable_parameters();

  BackboneConfig config_;
  nn::Parameter<T> text_embedding_;  // |V_TTS| x text_dim
  nn::Parameter<T> in_proj_w_;       // (mel+text+time) x model_dim
  nn::Parameter<T> in_proj_b_;
  std::vector<ConvNeXtBlock<T>> blocks_;
  nn::Parameter<T> head_w_;  // model_dim x mel_dim
  nn::Parameter<T> head_b_;
  nn::Parameter<T> skip_;  // mel_dim, multiplies x_t
};

// One draw of the flow path for a target mel x1.
template <typename T>
struct FlowState {
  nn::Tensor<T> x0;  // standard normal noise
  nn::Tensor<T> x1;  // target
  T t = 0;

  // (1 - t) x0 + t x1
  nn::Tensor<T> Interpolate() const;
  // x1 - x0
  nn::Tensor<T> TargetVelocity() const;
};

// x0 ~ N(0, 1) elementwise, t ~ U(0, 1).
template <typename T>
FlowState<T> DrawFlowState(const nn::Tensor<T>& x1, Rng& rng);

template <typename T>
using VelocityFn = std::function<nn::Var(nn::Tape<T>&, nn::Var xt, T t, nn::Var h_text)>;

// Mean over all samples, frames and channels of (v(x_t, t, h) - (x1 - x0))^2.
// Throws ValidationError on an empty batch.
template <typename T>
nn::Var CfmLoss(nn::Tape<T>& tape, std::span<const FlowState<T>> states,
                std::span<const nn::Var> h_text, const VelocityFn<T>& velocity);

template <typename T>
nn::Var CfmLoss(nn::Tape<T>& tape, std::span<const FlowState<T>> states,
                std::span<const nn::Var> h_text, const FrozenBackbone<T>& backbone);

}  // namespace roadapt::model

#endif  // ROADAPT_MODEL_BACKBONE_H_
