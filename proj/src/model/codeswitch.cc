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

#include "roadapt/model/codeswitch.h"

#include "roadapt/error.h"
#include "roadapt/nn/ops.h"

namespace roadapt::model {

namespace {

text::TextSequence Select(const text::TextSequence& seq, const std::vector<std::uint8_t>& keep,
                          std::int32_t filler) {
  text::TextSequence out;
  out.ids.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) out.ids.push_back(keep[t] ? seq.ids[t] : filler);
  return out;
}

}  // namespace

template <typename T>
nn::Var Merge(nn::Tape<T>& tape, const text::TextSequence& seq, const text::LanguageMask& mask,
              const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
              const text::Vocab& romanian, const text::Vocab& english) {
  if (mask.size() != seq.size()) {
    throw DimensionError("Merge", "mask length", seq.size(), mask.size());
  }
  if (!mask.IsPartition()) throw ValidationError("Merge: language masks do not partition positions");
  const text::TextSequence ro_ids = Select(seq, mask.romanian, romanian.filler_id());
  const text::TextSequence en_ids = Select(seq, mask.english, english.filler_id());
  nn::Var h_r = adapter.Forward(tape, ro_ids, mask);
  nn::Var h_e = backbone.EmbedFrozen(tape, en_ids, mask);
  return nn::Add(tape, h_r, h_e);
}

template <typename T>
MergedEmbedding<T> Merge(const text::TextSequence& seq, const text::LanguageMask& mask,
                         const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
                         const text::Vocab& romanian, const text::Vocab& english) {
  nn::Tape<T> tape;
  MergedEmbedding<T> out;
  out.h_cs = tape.value(Merge(tape, seq, mask, adapter, backbone, romanian, english));
  for (std::size_t t = 0; t < mask.size(); ++t) {
    out.provenance.push_back(mask.english[t] ? text::Language::kEnglish
                                             : text::Language::kRomanian);
  }
  return out;
}

std::size_t SynthesisOptions::FramesFor(std::size_t text_length) const {
  return n_frames ? n_frames : text_length * frames_per_char;
}

template <typename T>
nn::Tensor<T> Synthesize(std::string_view text, const text::Vocab& romanian,
                         const Adapter<T>& adapter, const FrozenBackbone<T>& backbone,
                         const SynthesisOptions& options) {
  const text::TextSequence seq = text::Encode(text, romanian);
  const std::size_t frames = options.FramesFor(seq.size());
  const nn::Tensor<T> h = adapter.Forward(text::PadToFrames(seq, frames, romanian));
  return backbone.Sample(h, frames, options.n_steps, options.seed);
}

template <typename T>
nn::Tensor<T> SynthesizeCodeSwitch(std::string_view text, const text::Vocab& romanian,
                                   const text::Vocab& english, const Adapter<T>& adapter,
                                   const FrozenBackbone<T>& backbone,
                                   const SynthesisOptions& options) {
  const text::CodeSwitchText parsed = text::ParseCodeSwitch(text, romanian, english);
  const std::size_t frames = options.FramesFor(parsed.seq.size());
  const text::TextSequence seq = text::PadToFrames(parsed.seq, frames, romanian);
  const text::LanguageMask mask = text::PadMask(parsed.mask, frames);
  const MergedEmbedding<T> merged = Merge(seq, mask, adapter, backbone, romanian, english);
  return backbone.Sample(merged.h_cs, frames, options.n_steps, options.seed);
}

#define ROADAPT_INSTANTIATE_CS(T)                                                        \
  template nn::Var Merge<T>(nn::Tape<T>&, const text::TextSequence&,                     \
                            const text::LanguageMask&, const Adapter<T>&,                \
                            const FrozenBackbone<T>&, const text::Vocab&,                \
                            const text::Vocab&);                                         \
  template MergedEmbedding<T> Merge<T>(const text::TextSequence&,                        \
                                       const text::LanguageMask&, const Adapter<T>&,     \
                                       const FrozenBackbone<T>&, const text::Vocab&,     \
                                       const text::Vocab&);                              \
  template nn::Tensor<T> Synthesize<T>(std::string_view, const text::Vocab&,             \
                                       const Adapter<T>&, const FrozenBackbone<T>&,      \
                                       const SynthesisOptions&);                         \
  template nn::Tensor<T> SynthesizeCodeSwitch<T>(std::string_view, const text::Vocab&,   \
                                                 const text::Vocab&, const Adapter<T>&,  \
                                                 const FrozenBackbone<T>&,               \
                                                 const SynthesisOptions&);

ROADAPT_INSTANTIATE_CS(float)
ROADAPT_INSTANTIATE_CS(double)
#undef ROADAPT_INSTANTIATE_CS

}  // namespace roadapt::model
