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

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "gtest/gtest.h"
#include "roadapt/error.h"
#include "roadapt/io.h"
#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/train/batching.h"
#include "roadapt/train/checkpoint.h"
#include "roadapt/train/corpus.h"
#include "roadapt/train/optimizer.h"
#include "roadapt/train/trainer.h"
#include "test_util.h"

namespace roadapt::train {
namespace {

using roadapt::testing::TempDir;

// ----------------------------------------------------------------- schedule

TEST(TrainConfigTest, DefaultsMatchReferenceHyperparameters) {
  const TrainConfig c;
  EXPECT_EQ(c.learning_rate, 1e-4);
  EXPECT_EQ(c.warmup_updates, 50u);
  EXPECT_EQ(c.frame_budget, 16384u);
  EXPECT_EQ(c.max_samples_per_batch, 128u);
  EXPECT_EQ(c.max_steps, 40500u);
}

TEST(TrainConfigTest, JsonRoundTripAndUnknownKeys) {
  TrainConfig c;
  c.learning_rate = 3e-3;
  c.seed = 42;
  const TrainConfig back = TrainConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_THROW(TrainConfig::FromJson({{"learning_rat", 1.0}}), ConfigError);
  EXPECT_NO_THROW(TrainConfig::FromJson({{"adapter", {{"n_blocks", 3}}}}));
  EXPECT_THROW(TrainConfig::FromJson({{"learning_rate", -1.0}}), ConfigError);
  EXPECT_THROW(TrainConfig::FromJson({{"learning_rate", "fast"}}), ConfigError);
}

TEST(LrScheduleTest, LinearWarmupThenConstant) {
  const TrainConfig c;
  EXPECT_EQ(LrAt(0, c), 0.0);
  EXPECT_DOUBLE_EQ(LrAt(25, c), 5e-5);
  EXPECT_EQ(LrAt(50, c), 1e-4);
  EXPECT_EQ(LrAt(51, c), 1e-4);
  EXPECT_EQ(LrAt(40000, c), 1e-4);
  TrainConfig none;
  none.warmup_updates = 0;
  EXPECT_EQ(LrAt(0, none), 1e-4);
}

// ----------------------------------------------------------------- batching

void ExpectPartition(const std::vector<Batch>& batches, const std::vector<std::size_t>& frames,
                     std::size_t budget, std::size_t cap) {
  std::multiset<std::size_t> seen;
  for (const Batch& b : batches) {
    EXPECT_FALSE(b.indices.empty());
    EXPECT_LE(b.indices.size(), cap);
    std::size_t total = 0;
    for (std::size_t i : b.indices) {
      total += frames[i];
      seen.insert(i);
    }
    EXPECT_EQ(total, b.frames);
    EXPECT_LE(total, budget);
  }
  ASSERT_EQ(seen.size(), frames.size());
  std::size_t expected = 0;
  for (std::size_t i : seen) EXPECT_EQ(i, expected++);
}

TEST(BatchingTest, SampleCapBindsBeforeBudget) {
  const std::vector<std::size_t> frames(300, 100);
  const auto batches = BatchByFrames(frames, 16384, 128, 1);
  ExpectPartition(batches, frames, 16384, 128);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].indices.size(), 128u);
  EXPECT_EQ(batches[1].indices.size(), 128u);
}

TEST(BatchingTest, BudgetSizedSampleIsSingleton) {
  const std::vector<std::size_t> frames = {16384};
  const auto batches = BatchByFrames(frames, 16384, 128, 1);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].indices, std::vector<std::size_t>{0});
}

TEST(BatchingTest, OversizedSampleIsNamed) {
  try {
    BatchByFrames({10, 20000, 10}, 16384, 128, 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("20000"), std::string::npos) << e.what();
  }
}

TEST(BatchingTest, RandomPartitionsRespectLimits) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t budget = 50 + rng() % 500;
    const std::size_t cap = 1 + rng() % 10;
    std::vector<std::size_t> frames(1 + rng() % 60);
    for (auto& f : frames) f = 1 + rng() % budget;
    ExpectPartition(BatchByFrames(frames, budget, cap, trial), frames, budget, cap);
  }
}

TEST(BatchingTest, ShuffleIsSeeded) {
  const std::vector<std::size_t> frames(40, 10);
  const auto a = BatchByFrames(frames, 100, 5, 3), b = BatchByFrames(frames, 100, 5, 3);
  const auto c = BatchByFrames(frames, 100, 5, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].indices, b[i].indices);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].indices != c[i].indices;
  EXPECT_TRUE(differs);
}

// ---------------------------------------------------------------- optimizer

TEST(AdamWTest, MatchesHandComputedUpdates) {
  nn::Parameter<double> p("w", nn::Tensor<double>({2}, {1.0, -2.0}), true);
  AdamWOptions o;
  o.weight_decay = 0.1;
  AdamW<double> opt({&p}, o);
  const double grads[3][2] = {{0.5, -1.0}, {0.25, 2.0}, {-1.0, 0.0}};
  double w[2] = {1.0, -2.0}, m[2] = {0, 0}, v[2] = {0, 0};
  const double lr = 0.01;
  for (int s = 0; s < 3; ++s) {
    opt.ZeroGrad();
    for (int i = 0; i < 2; ++i) p.mutable_grad()[i] = grads[s][i];
    opt.Step(lr);
    for (int i = 0; i < 2; ++i) {
      const double g = grads[s][i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, s + 1));
      const double vh = v[i] / (1 - std::pow(0.999, s + 1));
      w[i] -= lr * (mh / (std::sqrt(vh) + 1e-8) + 0.1 * w[i]);
      EXPECT_NEAR(p.value()[i], w[i], 1e-15) << "step " << s << " coord " << i;
    }
  }
  EXPECT_EQ(opt.steps(), 3u);
}

TEST(AdamWTest, RefusesFrozenParameters) {
  nn::Parameter<float> frozen("f", nn::Tensor<float>({1}), false);
  EXPECT_THROW(AdamW<float>({&frozen}, {}), Error);
}

// ------------------------------------------------------------------- corpus

SyntheticCorpusOptions TinyCorpus(std::uint64_t seed = 5) {
  SyntheticCorpusOptions o;
  o.n_sentences = 6;
  o.d_mel = 4;
  o.seed = seed;
  return o;
}

TEST(CorpusTest, CharacterFramesRepeatTemplates) {
  SyntheticCorpusOptions o = TinyCorpus();
  o.noise_std = 0;
  const auto templates = CharacterTemplates(o);
  const nn::Tensor<float> mel = RenderSyntheticMel(U"ab", o, 1);
  ASSERT_EQ(mel.rows(), 4u);
  const std::size_t a = o.charset.find(U'a'), b = o.charset.find(U'b');
  for (std::size_t c = 0; c < o.d_mel; ++c) {
    EXPECT_EQ(mel.at(0, c), templates[a][c]);
    EXPECT_EQ(mel.at(1, c), templates[a][c]);
    EXPECT_EQ(mel.at(2, c), templates[b][c]);
    EXPECT_EQ(mel.at(3, c), templates[b][c]);
  }
  // A shared character renders identically in another sentence.
  const nn::Tensor<float> other = RenderSyntheticMel(U"ba", o, 2);
  for (std::size_t c = 0; c < o.d_mel; ++c) EXPECT_EQ(other.at(3, c), mel.at(0, c));
}

TEST(CorpusTest, NoiselessRegenerationIsBitwiseIdentical) {
  TempDir d1, d2;
  SyntheticCorpusOptions o = TinyCorpus();
  o.noise_std = 0;
  const text::Vocab vocab = text::Vocab::RomanianDefault();
  const CorpusManifest m1 = MakeSyntheticCorpus(o, vocab, d1 / "a");
  const CorpusManifest m2 = MakeSyntheticCorpus(o, vocab, d1 / "b");
  ASSERT_EQ(m1.entries.size(), 6u);
  for (std::size_t i = 0; i < m1.entries.size(); ++i) {
    EXPECT_EQ(m1.entries[i].text, m2.entries[i].text);
    EXPECT_EQ(io::ReadText(m1.ResolveMel(m1.entries[i])), io::ReadText(m2.ResolveMel(m2.entries[i])));
  }
}

TEST(CorpusTest, ManifestRoundTripAndFrameCounts) {
  TempDir dir;
  const text::Vocab vocab = text::Vocab::RomanianDefault();
  const CorpusManifest m = MakeSyntheticCorpus(TinyCorpus(), vocab, dir.path());
  const CorpusManifest back = CorpusManifest::Load(dir / "manifest.jsonl");
  ASSERT_EQ(back.entries.size(), m.entries.size());
  for (const auto& e : back.entries) {
    EXPECT_EQ(io::ReadMel(back.ResolveMel(e)).rows(), e.n_frames);
    EXPECT_EQ(e.n_frames, 2 * text::DecodeUtf8(e.text).size());
  }
  EXPECT_THROW(CorpusManifest::Load(dir / "missing.jsonl"), IoError);
}

// ------------------------------------------------------------------ trainer

struct TrainerFixture {
  TempDir dir;
  text::Vocab vocab = text::Vocab::RomanianDefault();
  CorpusManifest manifest;
  model::AdapterConfig ac;
  model::BackboneConfig bc;
  TrainConfig tc;

  TrainerFixture() {
    manifest = MakeSyntheticCorpus(TinyCorpus(), vocab, dir / "corpus");
    ac.vocab_size = vocab.size();
    ac.embed_dim = ac.hidden_dim = 8;
    ac.kernel_size = 3;
    ac.seed = 1;
    bc.vocab_size = text::Vocab::PrintableAscii().size();
    bc.text_dim = 8;
    bc.mel_dim = 4;
    bc.model_dim = 8;
    bc.time_dim = 4;
    tc.learning_rate = 1e-2;
    tc.warmup_updates = 2;
    tc.max_steps = 5;
    tc.frame_budget = 20;
    tc.max_samples_per_batch = 3;
    tc.seed = 3;
  }
};

TEST(TrainerTest, BackboneFrozenAdapterMoves) {
  TrainerFixture f;
  model::Adapter<float> adapter(f.ac);
  const model::FrozenBackbone<float> backbone(f.bc);
  const std::string hash = backbone.ContentHash();
  const std::vector<float> before = adapter.Flatten();
  Trainer trainer(f.tc, f.manifest, f.vocab, adapter, backbone);
  trainer.Step();
  EXPECT_NE(adapter.Flatten(), before);
  const TrainResult r = trainer.Run();
  EXPECT_EQ(r.steps, 5u);
  EXPECT_EQ(r.loss_history.size(), 5u);
  EXPECT_EQ(r.backbone_hash, hash);
  EXPECT_EQ(backbone.ContentHash(), hash);
}

TEST(TrainerTest, ThreadCountDoesNotChangeHistory) {
  TrainerFixture f;
  std::vector<std::vector<double>> histories;
  std::vector<std::vector<float>> weights;
  for (int threads : {1, 3}) {
    TrainConfig tc = f.tc;
    tc.threads = threads;
    model::Adapter<float> adapter(f.ac);
    const model::FrozenBackbone<float> backbone(f.bc);
    Trainer trainer(tc, f.manifest, f.vocab, adapter, backbone);
    histories.push_back(trainer.Run().loss_history);
    weights.push_back(adapter.Flatten());
  }
  EXPECT_EQ(histories[0], histories[1]);
  EXPECT_EQ(weights[0], weights[1]);
}

TEST(TrainerTest, NonFiniteLossNamesStepAndSamples) {
  TrainerFixture f;
  model::Adapter<float> adapter(f.ac);
  adapter.embedding().mutable_value().Fill(std::nanf(""));
  const model::FrozenBackbone<float> backbone(f.bc);
  Trainer trainer(f.tc, f.manifest, f.vocab, adapter, backbone);
  try {
    trainer.Step();
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("step 1"), std::string::npos) << what;
    EXPECT_NE(what.find("syn"), std::string::npos) << what;
  }
}

TEST(TrainerTest, RejectsMismatchedConfigs) {
  TrainerFixture f;
  model::BackboneConfig wide = f.bc;
  wide.mel_dim = 5;
  model::Adapter<float> adapter(f.ac);
  EXPECT_THROW(Trainer(f.tc, f.manifest, f.vocab, adapter, model::FrozenBackbone<float>(wide)),
               ValidationError);
  TrainConfig tiny = f.tc;
  tiny.frame_budget = 2;
  const model::FrozenBackbone<float> backbone(f.bc);
  Trainer trainer(tiny, f.manifest, f.vocab, adapter, backbone);
  EXPECT_THROW(trainer.Step(), ValidationError);
}

// --------------------------------------------------------------- checkpoint

TEST(CheckpointTest, RoundTripRestoresEverything) {
  TrainerFixture f;
  model::Adapter<float> adapter(f.ac);
  const model::FrozenBackbone<float> backbone(f.bc);
  Trainer trainer(f.tc, f.manifest, f.vocab, adapter, backbone);
  const TrainResult r = trainer.Run(f.dir / "ckpt");
  const LoadedCheckpoint ck = LoadCheckpoint(f.dir / "ckpt");
  EXPECT_EQ(ck.adapter.Flatten(), adapter.Flatten());
  EXPECT_EQ(ck.adapter.config().ToJson(), f.ac.ToJson());
  EXPECT_EQ(ck.backbone.ContentHash(), backbone.ContentHash());
  EXPECT_EQ(ck.backbone_hash, r.backbone_hash);
  EXPECT_EQ(ck.romanian, f.vocab);
  EXPECT_EQ(ck.english, text::Vocab::PrintableAscii());
  EXPECT_EQ(ck.meta.step, 5u);
  EXPECT_EQ(ck.meta.loss_history, r.loss_history);
  EXPECT_EQ(ck.meta.train_config.ToJson(), f.tc.ToJson());
}

TEST(CheckpointTest, TamperedBackboneIsRefused) {
  TrainerFixture f;
  model::Adapter<float> adapter(f.ac);
  const model::FrozenBackbone<float> backbone(f.bc);
  CheckpointMeta meta{f.tc, 0, {}};
  SaveCheckpoint(f.dir / "ckpt", adapter, backbone, f.vocab, text::Vocab::PrintableAscii(), meta);
  auto blobs = io::ReadBlobs(f.dir / "ckpt" / "backbone.bin");
  blobs[0].second[0] += 1.0f;
  io::WriteBlobs(f.dir / "ckpt" / "backbone.bin", blobs);
  EXPECT_THROW(LoadCheckpoint(f.dir / "ckpt"), ValidationError);
}

TEST(CheckpointTest, MissingDirectoryIsAnIoError) {
  TempDir dir;
  EXPECT_THROW(LoadCheckpoint(dir / "nope"), IoError);
}

}  // namespace
}  // namespace roadapt::train
