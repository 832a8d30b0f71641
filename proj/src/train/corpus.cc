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

#include "roadapt/train/corpus.h"

#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"
#include "roadapt/error.h"
#include "roadapt/io.h"

namespace roadapt::train {

CorpusManifest CorpusManifest::Load(const std::filesystem::path& where) {
  const std::filesystem::path path =
      std::filesystem::is_directory(where) ? where / "manifest.jsonl" : where;
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open manifest");
  CorpusManifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CorpusEntry e;
      e.id = j.at("id").get<std::string>();
      e.text = j.at("text").get<std::string>();
      e.mel_path = j.at("mel_path").get<std::string>();
      e.n_frames = j.at("n_frames").get<std::size_t>();
      if (e.text.empty()) throw ValidationError("empty text");
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    } catch (const ValidationError& ex) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return m;
}

void CorpusManifest::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot write manifest");
  for (const auto& e : entries) {
    out << nlohmann::json{{"id", e.id}, {"text", e.text}, {"mel_path", e.mel_path},
                          {"n_frames", e.n_frames}}
                   .dump()
        << "\n";
  }
}

std::filesystem::path CorpusManifest::ResolveMel(const CorpusEntry& e) const {
  std::filesystem::path p(e.mel_path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::vector<float>> CharacterTemplates(const SyntheticCorpusOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> dist(0.0, options.template_std);
  std::vector<std::vector<float>> templates(options.charset.size(),
                                            std::vector<float>(options.d_mel));
  for (auto& t : templates) {
    for (auto& v : t) v = static_cast<float>(dist(rng));
  }
  return templates;
}

nn::Tensor<float> RenderSyntheticMel(const std::u32string& text,
                                     const SyntheticCorpusOptions& options,
                                     std::uint64_t noise_seed) {
  const auto templates = CharacterTemplates(options);
  const std::size_t fpc = options.frames_per_char;
  nn::Tensor<float> mel({text.size() * fpc, options.d_mel});
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto pos = options.charset.find(text[i]);
    if (pos == std::u32string::npos) {
      throw ValidationError("character '" + text::EncodeUtf8(text[i]) +
                            "' is not in the synthetic charset");
    }
    for (std::size_t f = 0; f < fpc; ++f) {
      auto row = mel.row(i * fpc + f);
      for (std::size_t c = 0; c < options.d_mel; ++c) {
        const double n = options.noise_std > 0 ? options.noise_std * noise(rng) : 0.0;
        row[c] = static_cast<float>(templates[pos][c] + n);
      }
    }
  }
  return mel;
}

CorpusManifest MakeSyntheticCorpus(const SyntheticCorpusOptions& options, const text::Vocab& vocab,
                                   const std::filesystem::path& out_dir) {
  if (options.charset.empty()) throw ValidationError("synthetic corpus charset is empty");
  if (options.min_chars == 0 || options.min_chars > options.max_chars) {
    throw ValidationError("synthetic corpus needs 1 <= min_chars <= max_chars");
  }
  if (options.frames_per_char == 0 || options.d_mel == 0) {
    throw ValidationError("frames_per_char and d_mel must be positive");
  }
  for (char32_t c : options.charset) {
    if (!vocab.Contains(c)) {
      throw ValidationError("charset character '" + text::EncodeUtf8(c) +
                            "' is missing from the vocabulary");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "mels", ec);
  if (ec) throw IoError((out_dir / "mels").string(), ec.message());

  // Sentence text and noise seeds come from separate streams so noise_std
  // does not change the sentences.
  std::mt19937_64 text_rng(options.seed ^ 0x5eed7e47ULL);
  std::uniform_int_distribution<std::size_t> len_dist(options.min_chars, options.max_chars);
  std::uniform_int_distribution<std::size_t> char_dist(0, options.charset.size() - 1);

  CorpusManifest m;
  m.base_dir = out_dir;
  for (std::size_t s = 0; s < options.n_sentences; ++s) {
    std::u32string sentence;
    const std::size_t len = len_dist(text_rng);
    for (std::size_t i = 0; i < len; ++i) sentence.push_back(options.charset[char_dist(text_rng)]);
    char id[32];
    std::snprintf(id, sizeof(id), "syn%05zu", s);
    const nn::Tensor<float> mel = RenderSyntheticMel(sentence, options, options.seed + 1 + s);
    const std::string rel = std::string("mels/") + id + ".mel";
    io::WriteMel(out_dir / rel, mel);
    m.entries.push_back({id, text::EncodeUtf8(sentence), rel, mel.rows()});
  }
  m.Save(out_dir / "manifest.jsonl");
  return m;
}

}  // namespace roadapt::train
