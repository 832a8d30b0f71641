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

#include "roadapt/text/codec.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"
#include "roadapt/error.h"

namespace roadapt::text {

namespace {

std::string Describe(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(c));
  return "'" + EncodeUtf8(c) + "' (" + buf + ")";
}

}  // namespace

std::u32string DecodeUtf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw ValidationError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > utf8.size()) {
      throw ValidationError("truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(utf8[i + k]);
      if ((b & 0xC0) != 0x80) {
        throw ValidationError("invalid UTF-8 continuation byte at offset " +
                              std::to_string(i + k));
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string EncodeUtf8(char32_t c) {
  std::string s;
  if (c < 0x80) {
    s.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    s.push_back(static_cast<char>(0xC0 | (c >> 6)));
    s.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    s.push_back(static_cast<char>(0xE0 | (c >> 12)));
    s.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    s.push_back(static_cast<char>(0xF0 | (c >> 18)));
    s.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    s.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return s;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string s;
  for (char32_t c : text) s += EncodeUtf8(c);
  return s;
}

Vocab Vocab::Build(const std::u32string& charset, char32_t filler) {
  if (charset.empty()) throw ConfigError("vocabulary charset is empty");
  if (filler == kSwitchChar) throw ConfigError("'~' is reserved and cannot be the filler");
  std::set<char32_t> seen;
  for (char32_t c : charset) {
    if (c == kSwitchChar) {
      throw ConfigError("'~' is a control character and cannot be in the charset");
    }
    if (!seen.insert(c).second) {
      throw ConfigError("duplicate character " + Describe(c) + " in charset");
    }
  }
  seen.insert(filler);
  Vocab v;
  v.chars_.assign(seen.begin(), seen.end());
  for (std::size_t i = 0; i < v.chars_.size(); ++i) {
    v.ids_[v.chars_[i]] = static_cast<std::int32_t>(i);
  }
  v.filler_id_ = v.ids_.at(filler);
  return v;
}

Vocab Vocab::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("chars") || !j.contains("filler")) {
    throw ConfigError("vocabulary JSON must be an object with 'chars' and 'filler'");
  }
  std::u32string charset;
  for (const auto& item : j.at("chars")) {
    const std::u32string c = DecodeUtf8(item.get<std::string>());
    if (c.size() != 1) throw ConfigError("vocabulary entries must be single characters");
    charset.push_back(c[0]);
  }
  const std::u32string filler = DecodeUtf8(j.at("filler").get<std::string>());
  if (filler.size() != 1) throw ConfigError("filler must be a single character");
  return Build(charset, filler[0]);
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open vocabulary");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return FromJson(j);
}

nlohmann::json Vocab::ToJson() const {
  nlohmann::json chars = nlohmann::json::array();
  for (char32_t c : chars_) chars.push_back(EncodeUtf8(c));
  return {{"chars", chars}, {"filler", EncodeUtf8(filler())}};
}

void Vocab::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot write vocabulary");
  out << ToJson().dump(1) << "\n";
}

Vocab Vocab::RomanianDefault() {
  std::u32string cs;
  for (char32_t c = U'a'; c <= U'z'; ++c) cs.push_back(c);
  for (char32_t c = U'A'; c <= U'Z'; ++c) cs.push_back(c);
  for (char32_t c = U'0'; c <= U'9'; ++c) cs.push_back(c);
  cs += U"ăâîșțşţĂÂÎȘȚŞŢ";
  cs += U" .,?!-'\":;()";
  return Build(cs, U'_');
}

Vocab Vocab::PrintableAscii() {
  std::u32string cs;
  for (char32_t c = 0x20; c < 0x7F; ++c) {
    if (c != kSwitchChar) cs.push_back(c);
  }
  return Build(cs, U'_');
}

std::optional<std::int32_t> Vocab::Find(char32_t c) const {
  auto it = ids_.find(c);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocab::IdOrFiller(char32_t c) const { return Find(c).value_or(filler_id_); }

char32_t Vocab::CharAt(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= chars_.size()) {
    throw ValidationError("token id " + std::to_string(id) + " outside vocabulary of size " +
                          std::to_string(chars_.size()));
  }
  return chars_[static_cast<std::size_t>(id)];
}

LanguageMask LanguageMask::AllRomanian(std::size_t n) {
  return {std::vector<std::uint8_t>(n, 1), std::vector<std::uint8_t>(n, 0)};
}

LanguageMask LanguageMask::AllEnglish(std::size_t n) {
  return {std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 1)};
}

bool LanguageMask::IsPartition() const {
  if (romanian.size() != english.size()) return false;
  for (std::size_t t = 0; t < romanian.size(); ++t) {
    if (romanian[t] + english[t] != 1) return false;
  }
  return true;
}

TextSequence Encode(std::string_view utf8, const Vocab& vocab) {
  const std::u32string chars = DecodeUtf8(utf8);
  TextSequence seq;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (chars[i] == kSwitchChar) continue;
    auto id = vocab.Find(chars[i]);
    if (!id) {
      throw ValidationError("character " + Describe(chars[i]) + " at position " +
                            std::to_string(i) + " is not in the vocabulary");
    }
    seq.ids.push_back(*id);
  }
  if (seq.ids.empty()) throw ValidationError("text is empty after parsing");
  return seq;
}

std::string Decode(const TextSequence& seq, const Vocab& vocab) {
  std::u32string out;
  out.reserve(seq.size());
  for (std::int32_t id : seq.ids) out.push_back(vocab.CharAt(id));
  return EncodeUtf8(out);
}

CodeSwitchText ParseCodeSwitch(std::string_view utf8, const Vocab& romanian,
                               const Vocab& english, const CodeSwitchOptions& options) {
  CodeSwitchText out;
  Language active = options.initial;
  for (char32_t c : DecodeUtf8(utf8)) {
    if (c == options.switch_char) {
      active = active == Language::kRomanian ? Language::kEnglish : Language::kRomanian;
      continue;
    }
    const bool ro = active == Language::kRomanian;
    out.seq.ids.push_back(ro ? romanian.IdOrFiller(c) : english.IdOrFiller(c));
    out.mask.romanian.push_back(ro ? 1 : 0);
    out.mask.english.push_back(ro ? 0 : 1);
    out.chars.push_back(c);
  }
  if (out.seq.ids.empty()) throw ValidationError("text is empty after parsing");
  return out;
}

TextSequence PadToFrames(const TextSequence& seq, std::size_t n_frames, const Vocab& vocab) {
  if (n_frames < seq.size()) {
    throw ValidationError("cannot pad a sequence of length " + std::to_string(seq.size()) +
                          " to " + std::to_string(n_frames) + " frames");
  }
  TextSequence out = seq;
  out.ids.resize(n_frames, vocab.filler_id());
  return out;
}

LanguageMask PadMask(const LanguageMask& mask, std::size_t n_frames) {
  if (n_frames < mask.size()) {
    throw ValidationError("cannot pad a mask of length " + std::to_string(mask.size()) +
                          " to " + std::to_string(n_frames) + " frames");
  }
  LanguageMask out = mask;
  out.romanian.resize(n_frames, 1);
  out.english.resize(n_frames, 0);
  return out;
}

}  // namespace roadapt::text
