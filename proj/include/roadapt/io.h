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

// On-disk formats. All numbers are little-endian regardless of host.
//
//   mel file      flat float32 frames*channels, plus "<path>.json" sidecar
//                 {"frames": F, "channels": C}
//   tensor dump   uint32 rank, uint32 dims[rank], float32 data
//   blob records  repeated { uint32 name_len, name bytes, uint32 rank,
//                            uint32 dims[rank], float32 data }

#ifndef ROADAPT_IO_H_
#define ROADAPT_IO_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "roadapt/nn/tensor.h"

namespace roadapt::io {

using NamedTensor = std::pair<std::string, nn::Tensor<float>>;

void WriteMel(const std::filesystem::path& path, const nn::Tensor<float>& frames);
nn::Tensor<float> ReadMel(const std::filesystem::path& path);
std::filesystem::path MelSidecarPath(const std::filesystem::path& path);

void WriteTensorDump(const std::filesystem::path& path, const nn::Tensor<float>& t);
nn::Tensor<float> ReadTensorDump(const std::filesystem::path& path);

void WriteBlobs(const std::filesystem::path& path, const std::vector<NamedTensor>& blobs);
std::vector<NamedTensor> ReadBlobs(const std::filesystem::path& path);

nlohmann::json ReadJson(const std::filesystem::path& path);
void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);
std::string ReadText(const std::filesystem::path& path);

}  // namespace roadapt::io

#endif  // ROADAPT_IO_H_
