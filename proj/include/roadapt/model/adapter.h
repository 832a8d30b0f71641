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

// Trainable input adapter: character embedding followed by a ConvNeXt-1D
// stack. Its output replaces the frozen model's text embedding.

#ifndef ROADAPT_MODEL_ADAPTER_H_
#define ROADAPT_MODEL_ADAPTER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "roadapt/model/convnext.h"
#include "roadapt/nn/tape.h"
#include "roadapt/text/codec.h"

namespace roadapt::model {

struct AdapterConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::size_t n_blocks = 2;
  std::size_t kernel_size = 7;
  std::size_t expansion = 2;
  std::uint64_t seed = 0;
  double init_std = 0.02;
  // Whether block projections start at zero (identity blocks).
  bool zero_init_project = true;

  // Throws ConfigError.
  void Validate() const;
  bool has_input_projection() const { return embed_dim != hidden_dim; }
  // Farthest input offset that can influence one output position.
  std::size_t ReceptiveRadius() const { return n_blocks * (kernel_size - 1) / 2; }

  nlohmann::json ToJson() const;
  static AdapterConfig FromJson(const nlohmann::json& j);
};

template <typename T>
class Adapter {
 public:
  explicit Adapter(const AdapterConfig& config);

  const AdapterConfig& config() const { return config_; }

  // h0 = E_R(seq), [T x embed_dim].
  nn::Var Embed(nn::Tape<T>& tape, const text::TextSequence& seq) const;

  // ConvNeXt stack over h0. With `keep`, input rows whose weight is 0 are
  // zeroed before the first block.
  nn::Var Contextualize(nn::Tape<T>& tape, nn::Var h0,
                        const std::optional<std::vector<T>>& keep = std::nullopt) const;

  // Contextualize(Embed(seq)), [T x hidden_dim]. The Romanian half of `mask`
  // selects the rows that enter the stack.
  nn::Var Forward(nn::Tape<T>& tape, const text::TextSequence& seq,
                  const std::optional<text::LanguageMask>& mask = std::nullopt) const;

  // Gradient-free evaluation.
  nn::Tensor<T> Forward(const text::TextSequence& seq,
                        const std::optional<text::LanguageMask>& mask = std::nullopt) const;

  std::vector<nn::Parameter<T>*> parameters();
  std::vector<const nn::Parameter<T>*> parameters() const;
  std::size_t NumParameters() const;

  // All parameter values concatenated in parameters() order.
  std::vector<T> Flatten() const;
  void Unflatten(const std::vector<T>& flat);

  nn::Parameter<T>& embedding() { return embedding_; }
  const nn::Parameter<T>& embedding() const { return embedding_; }
  std::vector<ConvNeXtBlock<T>>& blocks() { return blocks_; }

 private:
  AdapterConfig config_;
  nn::Parameter<T> embedding_;
  std::optional<nn::Parameter<T>> input_proj_;
  std::vector<ConvNeXtBlock<T>> blocks_;
};

}  // namespace roadapt::model

#endif  // ROADAPT_MODEL_ADAPTER_H_
