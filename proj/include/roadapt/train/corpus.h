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

// Training corpora: a JSON-lines manifest of (text, mel) pairs and a seeded
// synthetic letter-to-sound corpus generator.

#ifndef ROADAPT_TRAIN_CORPUS_H_
#define ROADAPT_TRAIN_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadapt/nn/tensor.h"
#include "roadapt/text/codec.h"

namespace roadapt::train {

struct CorpusEntry {
  std::string id;
  std::string text;
  std::string mel_path;  // relative paths resolve against the manifest directory
  std::size_t n_frames = 0;
};

struct CorpusManifest {
  std::vector<CorpusEntry> entries;
  std::filesystem::path base_dir;

  // One JSON object per line: {"id", "text", "mel_path", "n_frames"}.
  // `path` is a manifest file or a directory holding manifest.jsonl.
  static CorpusManifest Load(const std::filesystem::path& path);
  void Save(const std::filesystem::path& path) const;
  std::filesystem::path ResolveMel(const CorpusEntry& e) const;
};

struct SyntheticCorpusOptions {
  std::size_t n_sentences = 20;
  std::u32string charset = U"abcdefghijklmnopqrstuvwxyzăâîșț";
  std::size_t d_mel = 16;
  std::size_t frames_per_char = 2;
  double noise_std = 0.05;
  std::uint64_t seed = 0;
  std::size_t min_chars = 2;
  std::size_t max_chars = 5;
  double template_std = 1.0;
};

// Seeded per-character mel templates, in charset order.
std::vector<std::vector<float>> CharacterTemplates(const SyntheticCorpusOptions& options);

// Mel for `text`: each character's template repeated frames_per_char times,
// concatenated, plus N(0, noise_std) noise drawn from `noise_seed`.
nn::Tensor<float> RenderSyntheticMel(const std::u32string& text,
                                     const SyntheticCorpusOptions& options,
                                     std::uint64_t noise_seed);

// Writes mels/<id>.mel (+ sidecars) and manifest.jsonl under out_dir and
// returns the manifest. Throws ValidationError if a charset character is
// missing from `vocab`, IoError on file problems.
CorpusManifest MakeSyntheticCorpus(const SyntheticCorpusOptions& options, const text::Vocab& vocab,
                                   const std::filesystem::path& out_dir);

}  // namespace roadapt::train

#endif  // ROADAPT_TRAIN_CORPUS_H_
