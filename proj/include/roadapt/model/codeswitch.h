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

// Code-switch merging: Romanian positions go through the trainable adapter,
// English positions through the frozen embedding, and the two are added.

#ifndef ROADAPT_MODEL_CODESWITCH_H_
#define ROADAPT_MODEL_CODESWITCH_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/text/codec.h"

namespace roadapt::model {

template <typename T>
struct MergedEmbedding {
  nn::Tensor<T> h_cs;  // [T x hidden_dim]
  std::vector<text::Language> provenance;
};

// h_R = Contextualize(E_R(seq) * m_R), h_E = E_TTS(seq) * m_E, h_cs = h_R + h_E.
// ids at English positions index the frozen vocabulary and ids at Romanian
// positions the adapter vocabulary; each path looks up its own filler id
// where the other language is active.
template <typename T>
nn::Var Merge(nn::Tape<T>& tape, const text::TextSequence& seq, const text::LanguageMask& mask,
              const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
              const text::Vocab& romanian, const text::Vocab& english);

template <typename T>
MergedEmbedding<T> Merge(const text::TextSequence& seq, const text::LanguageMask& mask,
                         const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
                         const text::Vocab& romanian, const text::Vocab& english);

struct SynthesisOptions {
  // Frame count is text length times this, unless n_frames is set.
  std::size_t frames_per_char = 2;
  std::size_t n_frames = 0;
  std::size_t n_steps = 32;
  std::uint64_t seed = 0;

  std::size_t FramesFor(std::size_t text_length) const;
};

// Monolingual pipeline: encode, pad with filler, adapter, sample.
template <typename T>
nn::Tensor<T> Synthesize(std::string_view text, const text::Vocab& romanian,
                         const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
                         const SynthesisOptions& options);

// Code-switch pipeline: parse `~` spans, pad (filler rows are Romanian),
// merge, sample.
template <typename T>
nn::Tensor<T> SynthesizeCodeSwitch(std::string_view text, const text::Vocab& romanian,
                                   const text::Vocab& english, const Adapter<T>& adapter,
                                   const FrozenBackbone<T>& backbone,
                                   const SynthesisOptions& options);

}  // namespace roadapt::model

#endif  // ROADAPT_MODEL_CODESWITCH_H_
