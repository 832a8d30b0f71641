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

// Character vocabularies, encoding, filler padding and code-switch parsing.

#ifndef ROADAPT_TEXT_CODEC_H_
#define ROADAPT_TEXT_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace roadapt::text {

// Control character toggling the active language. It never receives an id.
inline constexpr char32_t kSwitchChar = U'~';

std::u32string DecodeUtf8(std::string_view utf8);
std::string EncodeUtf8(std::u32string_view text);
std::string EncodeUtf8(char32_t c);

// Dense id assignment over code points, sorted ascending. The filler
// character is always present.
class Vocab {
 public:
  // Throws ConfigError on an empty charset, a duplicate, or `~`. The filler
  // may also appear in `charset`.
  static Vocab Build(const std::u32string& charset, char32_t filler);
  static Vocab FromJson(const nlohmann::json& j);
  static Vocab Load(const std::filesystem::path& path);

  // Lower and upper case Latin letters, Romanian diacritics (comma-below and
  // cedilla forms), digits, space and common punctuation; filler '_'.
  static Vocab RomanianDefault();
  // Printable ASCII except '~'; filler '_'.
  static Vocab PrintableAscii();

  nlohmann::json ToJson() const;
  void Save(const std::filesystem::path& path) const;

  std::size_t size() const { return chars_.size(); }
  std::int32_t filler_id() const { return filler_id_; }
  char32_t filler() const { return chars_[static_cast<std::size_t>(filler_id_)]; }
  std::optional<std::int32_t> Find(char32_t c) const;
  std::int32_t IdOrFiller(char32_t c) const;
  bool Contains(char32_t c) const { return ids_.count(c) != 0; }
  // Throws ValidationError for ids outside [0, size()).
  char32_t CharAt(std::int32_t id) const;
  const std::u32string& chars() const { return chars_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.chars_ == b.chars_ && a.filler_id_ == b.filler_id_;
  }

 private:
  std::u32string chars_;
  std::map<char32_t, std::int32_t> ids_;
  std::int32_t filler_id_ = 0;
};

struct TextSequence {
  std::vector<std::int32_t> ids;
  std::size_t size() const { return ids.size(); }
  friend bool operator==(const TextSequence&, const TextSequence&) = default;
};

enum class Language { kRomanian, kEnglish };

// Per-position language membership. The two vectors partition positions.
struct LanguageMask {
  std::vector<std::uint8_t> romanian;
  std::vector<std::uint8_t> english;

  static LanguageMask AllRomanian(std::size_t n);
  static LanguageMask AllEnglish(std::size_t n);

  std::size_t size() const { return romanian.size(); }
  bool IsPartition() const;
  // 0/1 weights for one language, for masking embedding rows.
  template <typename T>
  std::vector<T> Weights(Language lang) const {
    const auto& m = lang == Language::kRomanian ? romanian : english;
    return std::vector<T>(m.begin(), m.end());
  }
  friend bool operator==(const LanguageMask&, const LanguageMask&) = default;
};

// One id per character; `~` is skipped. Throws ValidationError for
// out-of-vocabulary characters (naming character and position) and for
// text that is empty once `~` is removed.
TextSequence Encode(std::string_view utf8, const Vocab& vocab);
std::string Decode(const TextSequence& seq, const Vocab& vocab);

struct CodeSwitchOptions {
  char32_t switch_char = kSwitchChar;
  Language initial = Language::kRomanian;
};

struct CodeSwitchText {
  // ids[t] indexes the vocabulary of the language active at t.
  TextSequence seq;
  LanguageMask mask;
  // Characters that produced each position, `~` removed.
  std::u32string chars;
};

// Every switch character flips the active language and is consumed.
// Characters missing from the active vocabulary map to its filler id.
// Throws ValidationError when no position remains.
CodeSwitchText ParseCodeSwitch(std::string_view utf8, const Vocab& romanian,
                               const Vocab& english, const CodeSwitchOptions& options = {});

// Appends filler ids up to n_frames. Throws ValidationError if the sequence
// is already longer.
TextSequence PadToFrames(const TextSequence& seq, std::size_t n_frames, const Vocab& vocab);

// Filler positions are assigned to the Romanian mask.
LanguageMask PadMask(const LanguageMask& mask, std::size_t n_frames);

}  // namespace roadapt::text

#endif  // ROADAPT_TEXT_CODEC_H_
