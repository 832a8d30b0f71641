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

// Checkpoint directory layout:
//   checkpoint.json   format tag, step, train config, loss history, vocabularies,
//                     adapter config, backbone config + seed + content hash
//   adapter.bin       named float32 blobs (see roadapt/io.h)
//   backbone.bin      named float32 blobs

#ifndef ROADAPT_TRAIN_CHECKPOINT_H_
#define ROADAPT_TRAIN_CHECKPOINT_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/text/codec.h"
#include "roadapt/train/trainer.h"

namespace roadapt::train {

inline constexpr const char* kCheckpointFormat = "roadapt-checkpoint/1";

struct CheckpointMeta {
  TrainConfig train_config;
  std::size_t step = 0;
  std::vector<double> loss_history;
};

void SaveCheckpoint(const std::filesystem::path& dir, const model::Adapter<float>& adapter,
                    const model::FrozenBackbone<float>& backbone, const text::Vocab& romanian,
                    const text::Vocab& english, const CheckpointMeta& meta);

struct LoadedCheckpoint {
  model::Adapter<float> adapter;
  model::FrozenBackbone<float> backbone;
  text::Vocab romanian;
  text::Vocab english;
  CheckpointMeta meta;
  std::string backbone_hash;
};

// Rebuilds adapter and backbone. Throws ValidationError when the stored
// backbone hash does not match the hash of the loaded parameters.
LoadedCheckpoint LoadCheckpoint(const std::filesystem::path& dir);

}  // namespace roadapt::train

#endif  // ROADAPT_TRAIN_CHECKPOINT_H_
