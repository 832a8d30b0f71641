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

// Flow-matching training of the adapter against the frozen backbone.

#ifndef ROADAPT_TRAIN_TRAINER_H_
#define ROADAPT_TRAIN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/text/codec.h"
#include "roadapt/train/batching.h"
#include "roadapt/train/corpus.h"
#include "roadapt/train/optimizer.h"

namespace roadapt::train {

// Defaults are the reference training hyperparameters; max_steps is the
// full-scale run length.
struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t max_steps = 40500;
  std::size_t warmup_updates = 50;
  std::size_t frame_budget = 16384;
  std::size_t max_samples_per_batch = 128;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::size_t checkpoint_every = 1000;
  // Worker threads for per-sample forward/backward; 0 = OpenMP default.
  // Results do not depend on this value.
  int threads = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Unknown keys are rejected, except the model sections "adapter" and
  // "backbone", which belong to the caller.
  static TrainConfig FromJson(const nlohmann::json& j);
  AdamWOptions optimizer() const { return {beta1, beta2, eps, weight_decay}; }
};

// Learning rate for the 1-based update number `step`: linear ramp from 0 over
// warmup_updates, constant afterwards.
double LrAt(std::size_t step, const TrainConfig& config);

struct TrainResult {
  std::size_t steps = 0;
  std::vector<double> loss_history;
  std::string backbone_hash;
};

class Trainer {
 public:
  // Loads every mel of the manifest up front. Text is encoded with `vocab`
  // and padded with filler to the mel length.
  Trainer(TrainConfig config, const CorpusManifest& manifest, const text::Vocab& vocab,
          model::Adapter<float>& adapter, const model::FrozenBackbone<float>& backbone);

  // One optimizer update on the next batch. Returns the batch loss. Throws
  // NumericError naming the step and batch when the loss is not finite.
  double Step();

  // Runs until max_steps. With `checkpoint_dir`, writes a checkpoint every
  // checkpoint_every steps and at the end. Throws if the backbone content
  // hash changed.
  TrainResult Run(const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt,
                  const std::function<void(std::size_t, double)>& on_step = {});

  // Vocabulary of the frozen embedding recorded in checkpoints. Defaults to
  // printable ASCII.
  void set_english_vocab(text::Vocab v) { english_vocab_ = std::move(v); }

  std::size_t step() const { return step_; }
  const std::vector<double>& loss_history() const { return loss_history_; }
  const TrainConfig& config() const { return config_; }

 private:
  struct Sample {
    std::string id;
    text::TextSequence ids;
    nn::Tensor<float> mel;
  };

  const Batch& NextBatch();
  void SaveCheckpointTo(const std::filesystem::path& dir) const;

  TrainConfig config_;
  text::Vocab vocab_;
  text::Vocab english_vocab_ = text::Vocab::PrintableAscii();
  model::Adapter<float>& adapter_;
  const model::FrozenBackbone<float>& backbone_;
  AdamW<float> optimizer_;
  std::vector<Sample> samples_;
  std::vector<Batch> epoch_;
  std::size_t epoch_index_ = 0;
  std::size_t batch_cursor_ = 0;
  model::Rng flow_rng_;
  std::size_t step_ = 0;
  std::vector<double> loss_history_;
  std::string backbone_hash_;
};

}  // namespace roadapt::train

#endif  // ROADAPT_TRAIN_TRAINER_H_
