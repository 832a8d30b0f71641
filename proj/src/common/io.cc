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

#include "roadapt/io.h"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "roadapt/error.h"

namespace roadapt::io {

namespace {

static_assert(sizeof(float) == 4);

template <typename U>
U ToLittle(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(U)];
    std::memcpy(b, &v, sizeof(U));
    for (std::size_t i = 0; i < sizeof(U) / 2; ++i) std::swap(b[i], b[sizeof(U) - 1 - i]);
    std::memcpy(&v, b, sizeof(U));
    return v;
  }
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError(path.string(), "cannot open for writing");
  }
  void U32(std::uint32_t v) {
    v = ToLittle(v);
    Bytes(&v, 4);
  }
  void F32(float v) {
    std::uint32_t bits = ToLittle(std::bit_cast<std::uint32_t>(v));
    Bytes(&bits, 4);
  }
  void Bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError(path_.string(), "write failed");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError(path.string(), "cannot open for reading");
  }
  std::uint32_t U32() {
    std::uint32_t v;
    Bytes(&v, 4);
    return ToLittle(v);
  }
  float F32() { return std::bit_cast<float>(U32()); }
  void Bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw IoError(path_.string(), "truncated file");
  }
  bool AtEnd() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

void WriteShaped(Writer& w, const nn::Tensor<float>& t) {
  w.U32(static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) w.U32(static_cast<std::uint32_t>(d));
  for (float v : t.values()) w.F32(v);
}

nn::Tensor<float> ReadShaped(Reader& r) {
  const std::uint32_t rank = r.U32();
  if (rank > 8) throw ValidationError("tensor rank " + std::to_string(rank) + " is implausible");
  nn::Shape shape(rank);
  for (auto& d : shape) d = r.U32();
  nn::Tensor<float> t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = r.F32();
  return t;
}

}  // namespace

std::filesystem::path MelSidecarPath(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void WriteMel(const std::filesystem::path& path, const nn::Tensor<float>& frames) {
  nn::CheckRank("WriteMel", frames, 2);
  {
    Writer w(path);
    for (float v : frames.values()) w.F32(v);
  }
  WriteJson(MelSidecarPath(path), {{"frames", frames.rows()}, {"channels", frames.cols()}});
}

nn::Tensor<float> ReadMel(const std::filesystem::path& path) {
  const nlohmann::json meta = ReadJson(MelSidecarPath(path));
  const std::size_t frames = meta.at("frames").get<std::size_t>();
  const std::size_t channels = meta.at("channels").get<std::size_t>();
  const auto bytes = std::filesystem::file_size(path);
  if (bytes != frames * channels * 4) {
    throw IoError(path.string(), "size " + std::to_string(bytes) + " does not match sidecar " +
                                     std::to_string(frames) + "x" + std::to_string(channels));
  }
  Reader r(path);
  nn::Tensor<float> t({frames, channels});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = r.F32();
  return t;
}

void WriteTensorDump(const std::filesystem::path& path, const nn::Tensor<float>& t) {
  Writer w(path);
  WriteShaped(w, t);
}

nn::Tensor<float> ReadTensorDump(const std::filesystem::path& path) {
  Reader r(path);
  return ReadShaped(r);
}

void WriteBlobs(const std::filesystem::path& path, const std::vector<NamedTensor>& blobs) {
  Writer w(path);
  for (const auto& [name, t] : blobs) {
    w.U32(static_cast<std::uint32_t>(name.size()));
    w.Bytes(name.data(), name.size());
    WriteShaped(w, t);
  }
}

std::vector<NamedTensor> ReadBlobs(const std::filesystem::path& path) {
  Reader r(path);
  std::vector<NamedTensor> out;
  while (!r.AtEnd()) {
    const std::uint32_t len = r.U32();
    if (len > 4096) throw IoError(path.string(), "corrupt blob name length");
    std::string name(len, '\0');
    r.Bytes(name.data(), len);
    out.emplace_back(std::move(name), ReadShaped(r));
  }
  return out;
}

nlohmann::json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError(path.string(), "write failed");
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace roadapt::io
