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

#include "roadapt/train/checkpoint.h"

#include <system_error>

#include "roadapt/error.h"
#include "roadapt/io.h"

namespace roadapt::train {

namespace {

template <typename Params>
std::vector<io::NamedTensor> Collect(const Params& params) {
  std::vector<io::NamedTensor> out;
  for (const auto* p : params) out.emplace_back(p->name(), p->value());
  return out;
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& dir, const model::Adapter<float>& adapter,
                    const model::FrozenBackbone<float>& backbone, const text::Vocab& romanian,
                    const text::Vocab& english, const CheckpointMeta& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
  io::WriteBlobs(dir / "adapter.bin", Collect(adapter.parameters()));
  io::WriteBlobs(dir / "backbone.bin", Collect(backbone.parameters()));
  nlohmann::json j = {
      {"format", kCheckpointFormat},
      {"step", meta.step},
      {"train_config", meta.train_config.ToJson()},
      {"loss_history", meta.loss_history},
      {"vocab", romanian.ToJson()},
      {"english_vocab", english.ToJson()},
      {"adapter", {{"config", adapter.config().ToJson()}, {"blob", "adapter.bin"}}},
      {"backbone",
       {{"config", backbone.config().ToJson()},
        {"seed", backbone.config().seed},
        {"content_hash", backbone.ContentHash()},
        {"blob", "backbone.bin"}}},
  };
  io::WriteJson(dir / "checkpoint.json", j);
}

LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& dir) {
  const nlohmann::json j = io::ReadJson(dir / "checkpoint.json");
  if (j.value("format", "") != kCheckpointFormat) {
    throw ValidationError(dir.string() + ": not a " + kCheckpointFormat + " checkpoint");
  }
  try {
    model::Adapter<float> adapter(model::AdapterConfig::FromJson(j.at("adapter").at("config")));
    const auto adapter_blobs =
        io::ReadBlobs(dir / j.at("adapter").at("blob").get<std::string>());
    auto params = adapter.parameters();
    if (adapter_blobs.size() != params.size()) {
      throw ValidationError("adapter blob holds " + std::to_string(adapter_blobs.size()) +
                            " tensors, expected " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (adapter_blobs[i].first != params[i]->name() ||
          adapter_blobs[i].second.shape() != params[i]->value().shape()) {
        throw ValidationError("adapter blob entry '" + adapter_blobs[i].first +
                              "' does not match parameter '" + params[i]->name() + "'");
      }
      params[i]->mutable_value() = adapter_blobs[i].second;
    }

    model::FrozenBackbone<float> backbone(
        model::BackboneConfig::FromJson(j.at("backbone").at("config")));
    backbone.LoadValues(io::ReadBlobs(dir / j.at("backbone").at("blob").get<std::string>()));
    const std::string stored = j.at("backbone").at("content_hash").get<std::string>();
    const std::string actual = backbone.ContentHash();
    if (stored != actual) {
      throw ValidationError("backbone content hash mismatch: checkpoint records " + stored +
                            ", parameters hash to " + actual);
    }

    CheckpointMeta meta;
    meta.train_config = TrainConfig::FromJson(j.at("train_config"));
    meta.step = j.at("step").get<std::size_t>();
    meta.loss_history = j.at("loss_history").get<std::vector<double>>();
    return LoadedCheckpoint{std::move(adapter),
                            std::move(backbone),
                            text::Vocab::FromJson(j.at("vocab")),
                            text::Vocab::FromJson(j.at("english_vocab")),
                            std::move(meta),
                            actual};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(dir.string() + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace roadapt::train
