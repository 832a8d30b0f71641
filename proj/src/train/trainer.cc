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

#include "roadapt/train/trainer.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "roadapt/error.h"
#include "roadapt/io.h"
#include "roadapt/nn/ops.h"
#include "roadapt/train/checkpoint.h"

namespace roadapt::train {

void TrainConfig::Validate() const {
  if (!(learning_rate >= 0)) throw ConfigError("learning_rate must be non-negative");
  if (frame_budget == 0) throw ConfigError("frame_budget must be positive");
  if (max_samples_per_batch == 0) throw ConfigError("max_samples_per_batch must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw ConfigError("optimizer betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw ConfigError("eps must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"learning_rate", learning_rate},
          {"max_steps", max_steps},
          {"warmup_updates", warmup_updates},
          {"frame_budget", frame_budget},
          {"max_samples_per_batch", max_samples_per_batch},
          {"seed", seed},
          {"beta1", beta1},
          {"beta2", beta2},
          {"eps", eps},
          {"weight_decay", weight_decay},
          {"checkpoint_every", checkpoint_every},
          {"threads", threads}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "learning_rate", "max_steps", "warmup_updates", "frame_budget", "max_samples_per_batch",
      "seed", "beta1", "beta2", "eps", "weight_decay", "checkpoint_every", "threads",
      "adapter", "backbone"};
  for (const auto& [key, _] : j.items()) {
    if (!kKnown.count(key)) throw ConfigError("unknown train config key '" + key + "'");
  }
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.warmup_updates = j.value("warmup_updates", c.warmup_updates);
    c.frame_budget = j.value("frame_budget", c.frame_budget);
    c.max_samples_per_batch = j.value("max_samples_per_batch", c.max_samples_per_batch);
    c.seed = j.value("seed", c.seed);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.eps = j.value("eps", c.eps);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  c.Validate();
  return c;
}

double LrAt(std::size_t step, const TrainConfig& config) {
  if (config.warmup_updates == 0 || step >= config.warmup_updates) return config.learning_rate;
  return config.learning_rate * static_cast<double>(step) /
         static_cast<double>(config.warmup_updates);
}

Trainer::Trainer(TrainConfig config, const CorpusManifest& manifest, const text::Vocab& vocab,
                 model::Adapter<float>& adapter, const model::FrozenBackbone<float>& backbone)
    : config_(std::move(config)),
      vocab_(vocab),
      adapter_(adapter),
      backbone_(backbone),
      optimizer_(adapter.parameters(), config_.optimizer()),
      flow_rng_(config_.seed ^ 0xf10eULL) {
  config_.Validate();
  if (manifest.entries.empty()) throw ValidationError("training manifest is empty");
  if (adapter.config().vocab_size != vocab.size()) {
    throw ConfigError("adapter vocab_size " + std::to_string(adapter.config().vocab_size) +
                      " does not match vocabulary size " + std::to_string(vocab.size()));
  }
  if (adapter.config().hidden_dim != backbone.config().text_dim) {
    throw ConfigError("adapter hidden_dim must equal backbone text_dim");
  }
  for (const auto& e : manifest.entries) {
    Sample s;
    s.id = e.id;
    s.mel = io::ReadMel(manifest.ResolveMel(e));
    if (s.mel.rows() != e.n_frames) {
      throw ValidationError("sample '" + e.id + "': manifest says " + std::to_string(e.n_frames) +
                            " frames, mel file has " + std::to_string(s.mel.rows()));
    }
    if (s.mel.cols() != backbone.config().mel_dim) {
      throw ValidationError("sample '" + e.id + "': mel has " + std::to_string(s.mel.cols()) +
                            " channels, backbone expects " +
                            std::to_string(backbone.config().mel_dim));
    }
    s.ids = text::PadToFrames(text::Encode(e.text, vocab_), e.n_frames, vocab_);
    samples_.push_back(std::move(s));
  }
  backbone_hash_ = backbone_.ContentHash();
}

const Batch& Trainer::NextBatch() {
  if (batch_cursor_ >= epoch_.size()) {
    std::vector<std::size_t> frames;
    for (const auto& s : samples_) frames.push_back(s.mel.rows());
    epoch_ = BatchByFrames(frames, config_.frame_budget, config_.max_samples_per_batch,
                           config_.seed + epoch_index_);
    ++epoch_index_;
    batch_cursor_ = 0;
  }
  return epoch_[batch_cursor_++];
}

double Trainer::Step() {
  const Batch& batch = NextBatch();
  const std::size_t n = batch.indices.size();

  // Noise and time are drawn serially so the stream is independent of the
  // thread count.
  std::vector<model::FlowState<float>> states;
  states.reserve(n);
  for (std::size_t idx : batch.indices) {
    states.push_back(model::DrawFlowState(samples_[idx].mel, flow_rng_));
  }

  const auto params = adapter_.parameters();
  std::map<const nn::Parameter<float>*, std::size_t> slot;
  for (std::size_t k = 0; k < params.size(); ++k) slot[params[k]] = k;

  std::vector<std::vector<nn::Tensor<float>>> grads(n);
  std::vector<double> losses(n, 0.0);
  std::vector<std::string> errors(n);
  const int threads = config_.threads > 0 ? config_.threads : omp_get_max_threads();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const Sample& s = samples_[batch.indices[i]];
      const float weight =
          static_cast<float>(s.mel.size()) / static_cast<float>(batch.frames * s.mel.cols());
      nn::Tape<float> tape;
      nn::Var h = adapter_.Forward(tape, s.ids);
      nn::Var mse = model::CfmLoss<float>(tape, std::span(&states[i], 1), std::span(&h, 1),
                                          backbone_);
      nn::Var loss = nn::WeightedSum<float>(tape, {mse}, std::span<const float>(&weight, 1));
      tape.Backward(loss);
      grads[i].reserve(params.size());
      for (const auto* p : params) grads[i].emplace_back(p->value().shape());
      tape.AccumulateParamGrads(
          [&](const nn::Parameter<float>& p) -> nn::Tensor<float>& {
            return grads[i][slot.at(&p)];
          });
      losses[i] = tape.value(loss)[0];
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& err : errors) {
    if (!err.empty()) throw Error("training step " + std::to_string(step_ + 1) + ": " + err);
  }

  double loss = 0.0;
  optimizer_.ZeroGrad();
  for (std::size_t i = 0; i < n; ++i) {
    loss += losses[i];
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto dst = params[k]->mutable_grad().values();
      const auto src = grads[i][k].values();
      for (std::size_t e = 0; e < dst.size(); ++e) dst[e] += src[e];
    }
  }
  if (!std::isfinite(loss)) {
    std::string ids;
    for (std::size_t idx : batch.indices) ids += (ids.empty() ? "" : ",") + samples_[idx].id;
    throw NumericError("non-finite loss at step " + std::to_string(step_ + 1) + " in epoch " +
                       std::to_string(epoch_index_) + " batch " + std::to_string(batch_cursor_) +
                       " (samples " + ids + ")");
  }
  ++step_;
  optimizer_.Step(LrAt(step_, config_));
  loss_history_.push_back(loss);
  return loss;
}

void Trainer::SaveCheckpointTo(const std::filesystem::path& dir) const {
  SaveCheckpoint(dir, adapter_, backbone_, vocab_, english_vocab_,
                 CheckpointMeta{config_, step_, loss_history_});
}

TrainResult Trainer::Run(const std::optional<std::filesystem::path>& checkpoint_dir,
                         const std::function<void(std::size_t, double)>& on_step) {
  while (step_ < config_.max_steps) {
    const double loss = Step();
    if (on_step) on_step(step_, loss);
    if (checkpoint_dir && config_.checkpoint_every > 0 && step_ % config_.checkpoint_every == 0 &&
        step_ < config_.max_steps) {
      SaveCheckpointTo(*checkpoint_dir);
    }
  }
  const std::string after = backbone_.ContentHash();
  if (after != backbone_hash_) {
    throw Error("frozen backbone changed during training (hash " + backbone_hash_ + " -> " +
                after + ")");
  }
  if (checkpoint_dir) SaveCheckpointTo(*checkpoint_dir);
  return TrainResult{step_, loss_history_, after};
}

}  // namespace roadapt::train
