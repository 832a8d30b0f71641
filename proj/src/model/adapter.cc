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

#include "roadapt/model/adapter.h"

#include <cmath>
#include <string>

#include "roadapt/error.h"

namespace roadapt::model {

void AdapterConfig::Validate() const {
  if (vocab_size == 0) throw ConfigError("adapter: vocab_size must be positive");
  if (embed_dim == 0 || hidden_dim == 0) throw ConfigError("adapter: dimensions must be positive");
  if (n_blocks == 0) throw ConfigError("adapter: n_blocks must be at least 1");
  if (kernel_size % 2 == 0) throw ConfigError("adapter: kernel_size must be odd");
  if (expansion == 0) throw ConfigError("adapter: expansion_factor must be positive");
}

nlohmann::json AdapterConfig::ToJson() const {
  return {{"vocab_size", vocab_size},   {"embed_dim", embed_dim},
          {"hidden_dim", hidden_dim},   {"n_blocks", n_blocks},
          {"kernel_size", kernel_size}, {"expansion_factor", expansion},
          {"seed", seed},               {"init_std", init_std},
          {"zero_init_project", zero_init_project}};
}

AdapterConfig AdapterConfig::FromJson(const nlohmann::json& j) {
  AdapterConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.n_blocks = j.value("n_blocks", c.n_blocks);
  c.kernel_size = j.value("kernel_size", c.kernel_size);
  c.expansion = j.value("expansion_factor", c.expansion);
  c.seed = j.value("seed", c.seed);
  c.init_std = j.value("init_std", c.init_std);
  c.zero_init_project = j.value("zero_init_project", c.zero_init_project);
  return c;
}

template <typename T>
Adapter<T>::Adapter(const AdapterConfig& config) : config_(config) {
  config_.Validate();
  Rng rng(config_.seed);
  embedding_ = nn::Parameter<T>(
      "embedding", NormalTensor<T>({config_.vocab_size, config_.embed_dim}, config_.init_std, rng),
      true);
  if (config_.has_input_projection()) {
    input_proj_ = nn::Parameter<T>(
        "input_proj.weight",
        NormalTensor<T>({config_.embed_dim, config_.hidden_dim}, config_.init_std, rng), true);
  }
  BlockInit init{config_.init_std, config_.init_std,
                 config_.zero_init_project ? 0.0 : config_.init_std};
  for (std::size_t b = 0; b < config_.n_blocks; ++b) {
    blocks_.push_back(ConvNeXtBlock<T>::Create("blocks." + std::to_string(b) + ".",
                                               config_.hidden_dim, config_.kernel_size,
                                               config_.expansion, true, init, rng));
  }
}

template <typename T>
nn::Var Adapter<T>::Embed(nn::Tape<T>& tape, const text::TextSequence& seq) const {
  return nn::Embedding(tape, std::span<const std::int32_t>(seq.ids), tape.Param(embedding_));
}

template <typename T>
nn::Var Adapter<T>::Contextualize(nn::Tape<T>& tape, nn::Var h0,
                                  const std::optional<std::vector<T>>& keep) const {
  nn::Var x = h0;
  if (keep) x = nn::MulRowMask(tape, x, std::span<const T>(*keep));
  if (input_proj_) x = nn::Linear(tape, x, tape.Param(*input_proj_), nn::Var{});
  for (const auto& block : blocks_) x = block.Apply(tape, x);
  return x;
}

template <typename T>
nn::Var Adapter<T>::Forward(nn::Tape<T>& tape, const text::TextSequence& seq,
                            const std::optional<text::LanguageMask>& mask) const {
  std::optional<std::vector<T>> keep;
  if (mask) {
    if (mask->size() != seq.size()) {
      throw DimensionError("Adapter::Forward", "mask length", seq.size(), mask->size());
    }
    keep = mask->template Weights<T>(text::Language::kRomanian);
  }
  return Contextualize(tape, Embed(tape, seq), keep);
}

template <typename T>
nn::Tensor<T> Adapter<T>::Forward(const text::TextSequence& seq,
                                  const std::optional<text::LanguageMask>& mask) const {
  nn::Tape<T> tape;
  return tape.value(Forward(tape, seq, mask));
}

template <typename T>
std::vector<nn::Parameter<T>*> Adapter<T>::parameters() {
  std::vector<nn::Parameter<T>*> out{&embedding_};
  if (input_proj_) out.push_back(&*input_proj_);
  for (auto& b : blocks_) {
    for (auto* p : b.parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<const nn::Parameter<T>*> Adapter<T>::parameters() const {
  std::vector<const nn::Parameter<T>*> out{&embedding_};
  if (input_proj_) out.push_back(&*input_proj_);
  for (const auto& b : blocks_) {
    for (const auto* p : b.parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::size_t Adapter<T>::NumParameters() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value().size();
  return n;
}

template <typename T>
std::vector<T> Adapter<T>::Flatten() const {
  std::vector<T> flat;
  flat.reserve(NumParameters());
  for (const auto* p : parameters()) {
    flat.insert(flat.end(), p->value().values().begin(), p->value().values().end());
  }
  return flat;
}

template <typename T>
void Adapter<T>::Unflatten(const std::vector<T>& flat) {
  if (flat.size() != NumParameters()) {
    throw DimensionError("Adapter::Unflatten", "elements", NumParameters(), flat.size());
  }
  std::size_t off = 0;
  for (auto* p : parameters()) {
    auto dst = p->mutable_value().values();
    std::copy(flat.begin() + off, flat.begin() + off + dst.size(), dst.begin());
    off += dst.size();
  }
}

template class Adapter<float>;
template class Adapter<double>;

}  // namespace roadapt::model
