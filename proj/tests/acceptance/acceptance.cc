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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "align_oracle.h"
#include "eval_fixture.h"
#include "httplib.h"
#include "json.hpp"
#include "roadapt/error.h"
#include "roadapt/eval/service.h"
#include "roadapt/io.h"
#include "roadapt/metrics/metrics.h"
#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/model/codeswitch.h"
#include "roadapt/nn/grad_check.h"
#include "roadapt/nn/ops.h"
#include "roadapt/text/codec.h"
#include "roadapt/train/corpus.h"
#include "roadapt/train/trainer.h"

namespace roadapt {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("roadapt-acceptance-" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& leaf) const { return path_ / leaf; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

template <typename T>
bool Bitwise(const nn::Tensor<T>& a, const nn::Tensor<T>& b) {
  return a.shape() == b.shape() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

std::string Fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Model configuration used by the CLI for a corpus with `mel_dim` channels.
struct ModelSetup {
  text::Vocab romanian = text::Vocab::RomanianDefault();
  text::Vocab english = text::Vocab::PrintableAscii();
  model::AdapterConfig adapter;
  model::BackboneConfig backbone;

  explicit ModelSetup(std::size_t mel_dim) {
    adapter.vocab_size = romanian.size();
    backbone.vocab_size = english.size();
    backbone.text_dim = adapter.hidden_dim;
    backbone.mel_dim = mel_dim;
  }
};

// ------------------------------------------------ 1. gradient integrity

Outcome GradientIntegrity() {
  const text::Vocab vocab = text::Vocab::Build(U"abcde", U'_');
  model::AdapterConfig ac;
  ac.vocab_size = vocab.size();
  ac.embed_dim = ac.hidden_dim = 8;
  ac.n_blocks = 2;
  ac.kernel_size = 3;
  ac.zero_init_project = false;
  ac.seed = 5;
  model::BackboneConfig bc;
  bc.vocab_size = 8;
  bc.text_dim = 8;
  bc.mel_dim = 4;
  bc.model_dim = 8;
  bc.time_dim = 4;
  bc.n_blocks = 1;
  bc.kernel_size = 3;
  bc.seed = 21;
  model::Adapter<double> adapter(ac);
  const model::FrozenBackbone<double> backbone(bc);

  const text::TextSequence seq = text::Encode("abcdea", vocab);  // T = 6
  std::mt19937_64 rng(3);
  nn::Tensor<double> x1({seq.size(), bc.mel_dim});
  std::normal_distribution<double> normal;
  for (double& v : x1.values()) v = normal(rng);
  model::Rng flow_rng(8);
  const std::vector<model::FlowState<double>> states = {model::DrawFlowState(x1, flow_rng),
                                                        model::DrawFlowState(x1, flow_rng)};

  auto loss_on = [&](nn::Tape<double>& tape, const model::Adapter<double>& a) {
    const std::vector<nn::Var> h = {a.Forward(tape, seq), a.Forward(tape, seq)};
    return model::CfmLoss<double>(tape, states, h, backbone);
  };

  nn::Tape<double> tape;
  tape.Backward(loss_on(tape, adapter));
  nn::AccumulateIntoParams<double>(tape, adapter.parameters());
  std::vector<double> analytic;
  for (const auto* p : std::as_const(adapter).parameters()) {
    analytic.insert(analytic.end(), p->grad().values().begin(), p->grad().values().end());
  }

  const std::vector<double> flat = adapter.Flatten();
  model::Adapter<double> probe(ac);
  const nn::Tensor<double> numeric = nn::NumericGradient<double>(
      [&](const nn::Tensor<double>& point) {
        probe.Unflatten(std::vector<double>(point.values().begin(), point.values().end()));
        nn::Tape<double> t;
        return t.value(loss_on(t, probe)).item();
      },
      nn::Tensor<double>({flat.size()}, flat), 1e-5);
  const nn::GradCheckResult r = nn::CompareGradients<double>(analytic, numeric.values());
  return {r.Passed(1e-4) && analytic.size() == flat.size(),
          std::to_string(flat.size()) + " adapter parameters, T=6, d=8: " + r.Describe()};
}

// ------------------------------------------- 2. frozen-backbone invariance

Outcome FrozenBackboneInvariance() {
  ScratchDir dir("c2");
  const train::SyntheticCorpusOptions co;
  const ModelSetup m(co.d_mel);
  const train::CorpusManifest manifest = train::MakeSyntheticCorpus(co, m.romanian, dir.path());
  model::Adapter<float> adapter(m.adapter);
  const model::FrozenBackbone<float> backbone(m.backbone);
  const std::string before = backbone.ContentHash();
  const std::vector<float> adapter_before = adapter.Flatten();
  train::TrainConfig tc;
  tc.max_steps = 200;
  tc.threads = 1;
  train::Trainer trainer(tc, manifest, m.romanian, adapter, backbone);
  const train::TrainResult r = trainer.Run();
  const std::string after = backbone.ContentHash();
  const bool moved = adapter.Flatten() != adapter_before;
  return {before == after && r.steps == 200 && moved,
          "hash " + before.substr(0, 16) + (before == after ? " unchanged" : " CHANGED") +
              " after " + std::to_string(r.steps) + " steps; adapter " +
              (moved ? "updated" : "NOT updated")};
}

// ------------------------------------------------- 3. training effectiveness

double MelMse(const nn::Tensor<float>& a, const nn::Tensor<float>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
  return s / static_cast<double>(a.size());
}

Outcome TrainingEffectiveness() {
  ScratchDir dir("c3");
  const train::SyntheticCorpusOptions co;  // 20 sentences, d_mel 16, 2 frames/char, noise 0.05
  const ModelSetup m(co.d_mel);
  const train::CorpusManifest manifest = train::MakeSyntheticCorpus(co, m.romanian, dir.path());
  model::Adapter<float> adapter(m.adapter);
  const model::Adapter<float> untrained(m.adapter);
  const model::FrozenBackbone<float> backbone(m.backbone);
  train::TrainConfig tc;  // default learning rate and schedule
  tc.max_steps = 2000;
  tc.threads = 1;
  train::Trainer trainer(tc, manifest, m.romanian, adapter, backbone);
  const std::vector<double> h = trainer.Run().loss_history;
  double early = 0, late = 0;
  for (std::size_t i = 0; i < 100; ++i) early += h[i] / 100;
  for (std::size_t i = 1900; i < 2000; ++i) late += h[i] / 100;
  const double loss_ratio = late / early;

  const train::CorpusEntry& e = manifest.entries.front();
  const nn::Tensor<float> target = io::ReadMel(manifest.ResolveMel(e));
  model::SynthesisOptions so;
  so.n_frames = target.rows();
  so.n_steps = 32;
  so.seed = 7;
  const double mse_trained = MelMse(model::Synthesize(e.text, m.romanian, adapter, backbone, so), target);
  const double mse_init = MelMse(model::Synthesize(e.text, m.romanian, untrained, backbone, so), target);
  const double mse_ratio = mse_trained / mse_init;
  return {loss_ratio < 0.5 && mse_ratio <= 0.7,
          "loss mean 1-100 " + Fmt(early) + ", 1901-2000 " + Fmt(late) + " (ratio " + Fmt(loss_ratio) +
              " < 0.5); sampled MSE on \"" + e.text + "\" trained " + Fmt(mse_trained) + " vs init " +
              Fmt(mse_init) + " (ratio " + Fmt(mse_ratio) + " <= 0.7)"};
}

// --------------------------------------------------- 4. code-switch identities

Outcome CodeSwitchIdentities() {
  const ModelSetup m(4);
  model::AdapterConfig ac = m.adapter;
  ac.embed_dim = ac.hidden_dim = 8;
  model::BackboneConfig bc = m.backbone;
  bc.text_dim = 8;
  std::vector<std::string> failures;

  // Monolingual Romanian merge equals the adapter forward (trained-like
  // weights, so the stack is not the identity).
  ac.zero_init_project = false;
  model::Adapter<float> trained(ac);
  const model::FrozenBackbone<float> backbone(bc);
  const text::TextSequence ro = text::Encode("Bună ziua, ce mai faci?", m.romanian);
  if (!Bitwise(model::Merge(ro, text::LanguageMask::AllRomanian(ro.size()), trained, backbone,
                            m.romanian, m.english)
                   .h_cs,
               trained.Forward(ro))) {
    failures.push_back("monolingual merge != adapter forward");
  }

  // Identity-init adapter: all-English merge equals the frozen rows.
  ac.zero_init_project = true;
  const model::Adapter<float> fresh(ac);
  const text::TextSequence en = text::Encode("with the client today", m.english);
  const auto all_en = text::LanguageMask::AllEnglish(en.size());
  if (!Bitwise(model::Merge(en, all_en, fresh, backbone, m.romanian, m.english).h_cs,
               backbone.EmbedFrozen(en, all_en))) {
    failures.push_back("all-English merge != frozen rows");
  }

  // Contextualize(0) is constant beyond the receptive radius.
  ac.zero_init_project = false;
  model::Adapter<double> ctx(ac);
  std::vector<double> flat = ctx.Flatten();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& v : flat) v = u(rng);
  ctx.Unflatten(flat);
  const std::size_t n = 24, r = ac.ReceptiveRadius();
  nn::Tape<double> tape;
  const nn::Tensor<double> y =
      tape.value(ctx.Contextualize(tape, tape.Constant(nn::Tensor<double>({n, ac.embed_dim}))));
  for (std::size_t t = r; t + r < n; ++t) {
    for (std::size_t c = 0; c < y.cols(); ++c) {
      if (y.at(t, c) != y.at(r, c)) {
        failures.push_back("contextualize(0) row " + std::to_string(t) + " differs");
        t = n;
        break;
      }
    }
  }
  return {failures.empty(), failures.empty() ? "monolingual, all-English and contextualize(0) "
                                               "identities hold bitwise (radius " +
                                                   std::to_string(r) + ", T=" + std::to_string(n) + ")"
                                             : failures.front()};
}

// ------------------------------------------------------- 5. metrics oracle

Outcome MetricsOracle() {
  std::size_t exhaustive = 0, random = 0, mismatches = 0, identity = 0;
  auto check = [&](const testing::Words& r, const testing::Words& h) {
    const metrics::AlignmentCounts c = metrics::Align(r, h);
    if (!(c == testing::Oracle(r, h))) ++mismatches;
    if (!r.empty()) {
      const metrics::MetricReport m = metrics::MetricReport::FromCounts(c);
      if (m.wil + m.wip != 1.0) ++identity;
    }
  };
  testing::ForAllSequences(4, [&](const testing::Words& r) {
    testing::ForAllSequences(4, [&](const testing::Words& h) {
      check(r, h);
      ++exhaustive;
    });
  });
  std::mt19937_64 rng(2024);
  const testing::Words alphabet = {"a", "b", "c"};
  for (; random < 2000; ++random) {
    testing::Words r(rng() % 7), h(rng() % 7);
    for (auto& w : r) w = alphabet[rng() % 3];
    for (auto& w : h) w = alphabet[rng() % 3];
    check(r, h);
  }
  const metrics::MetricReport hand = metrics::MetricReport::FromCounts(metrics::Align({"a", "b", "c"}, {"a", "x", "c"}));
  const bool hand_ok = hand.wer == 1.0 / 3.0 && hand.wip == 4.0 / 9.0;
  return {mismatches == 0 && identity == 0 && hand_ok,
          std::to_string(exhaustive) + " exhaustive + " + std::to_string(random) + " random pairs, " +
              std::to_string(mismatches) + " count mismatches, " + std::to_string(identity) +
              " wil+wip!=1; hand case wer=" + Fmt(hand.wer) + " wip=" + Fmt(hand.wip)};
}

// --------------------------------------------------- 6. table identity audit

Outcome TableIdentityAudit() {
  struct Column {
    const char* system;
    double wil, wip;
    bool expected;
  };
  const Column columns[] = {{"MMS-TTS-RON", 9.52, 90.48, true},
                            {"RO-F5TTS", 8.23, 91.77, true},
                            {"F5-TTS-FULL-FT", 5.39, 96.92, false}};
  bool ok = true;
  std::string detail;
  for (const Column& c : columns) {
    const bool consistent = metrics::WilWipConsistent(c.wil, c.wip);
    ok = ok && consistent == c.expected;
    detail += std::string(detail.empty() ? "" : "; ") + c.system + " " + Fmt(c.wil) + "+" + Fmt(c.wip) +
              "=" + Fmt(c.wil + c.wip) + (consistent ? " consistent" : " INCONSISTENT");
  }
  return {ok, detail};
}

// -------------------------------------------------- 7. hyperparameter fidelity

Outcome HyperparameterFidelity() {
  const train::TrainConfig c;
  const bool ok = c.learning_rate == 1e-4 && c.warmup_updates == 50 && c.frame_budget == 16384 &&
                  c.max_samples_per_batch == 128 && train::LrAt(50, c) == 1e-4;
  return {ok, "lr " + Fmt(c.learning_rate) + ", warmup " + std::to_string(c.warmup_updates) +
                  ", frame budget " + std::to_string(c.frame_budget) + ", max samples " +
                  std::to_string(c.max_samples_per_batch) + ", lr_at(50) " + Fmt(train::LrAt(50, c))};
}

// ------------------------------------------------------------ 8. determinism

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string("'") + ROADAPT_CLI_PATH + "' " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome Determinism() {
  ScratchDir dir("c8");
  auto must = [](const RunResult& r, const std::string& what) {
    if (r.code != 0) throw Error(what + " exited " + std::to_string(r.code) + ": " + r.out);
    return r.out;
  };
  must(RunCli("gen-corpus --out " + Q(dir / "corpus")), "gen-corpus");
  std::string histories[2];
  for (int i = 0; i < 2; ++i) {
    const std::string out = must(RunCli("train --json --threads 1 --max-steps 60 --corpus " +
                                        Q(dir / "corpus") + " --out " + Q(dir / ("ckpt" + std::to_string(i)))),
                                 "train");
    histories[i] = json::parse(out).at("loss_history").dump();
  }
  for (const char* name : {"a.mel", "b.mel"}) {
    must(RunCli("synth --ckpt " + Q(dir / "ckpt0") + " --text 'Bună ziua, lume' --seed 11 --out " +
                Q(dir / name)),
         "synth");
  }
  const bool synth_same = io::ReadText(dir / "a.mel") == io::ReadText(dir / "b.mel") &&
                          io::ReadText(dir / "a.mel.json") == io::ReadText(dir / "b.mel.json");
  const bool train_same = histories[0] == histories[1];
  return {synth_same && train_same,
          std::string("synth output ") + (synth_same ? "byte-identical" : "DIFFERS") +
              " across runs; 60-step single-thread loss history " + (train_same ? "identical" : "DIFFERS")};
}

// ------------------------------------------------------- 9. evalsvc properties

Outcome EvalServiceProperties() {
  ScratchDir dir("c9");
  const json manifest = testing::WriteCampaignFiles(
      dir.path(), "pron", eval::Task::kNaturalness, testing::PronunciationSentences(), testing::DefaultRoster());
  const eval::Campaign campaign =
      eval::BuildCampaign(eval::CampaignManifest::FromJson(manifest), {dir.path(), true});
  std::vector<std::string> failures;
  std::string csv_live;
  std::size_t rejected = 0, accepted = 0;
  {
    eval::EvalService service({campaign}, dir / "ratings.jsonl");
    testing::LoopbackServer server(service);
    httplib::Client client = server.Client();
    std::mt19937_64 rng(99);
    for (int l = 0; l < 4; ++l) {
      auto reg = client.Post("/listeners", json{{"handle", "listener" + std::to_string(l)}}.dump(),
                             "application/json");
      if (!reg || reg->status != 200) throw Error("listener registration failed");
      const std::string id = json::parse(reg->body).at("listener_id");
      for (;;) {
        auto next = client.Get("/campaigns/pron/next?listener=" + id);
        if (!next || next->status != 200) throw Error("next trial failed");
        const json p = json::parse(next->body);
        if (p.at("complete").get<bool>()) break;
        for (const auto& [name, role] : testing::DefaultRoster()) {
          if (next->body.find(name) != std::string::npos) failures.push_back("payload names " + name);
        }
        json body = {{"listener", id}, {"trial_id", p.at("trial_id")}, {"scores", json::object()}};
        for (const auto& s : p.at("stimuli")) body["scores"][s.at("key").get<std::string>()] = int(rng() % 101);
        for (int bad : {-1, 101, 250}) {
          json b = body;
          b["scores"][p["stimuli"][0]["key"].get<std::string>()] = bad;
          auto res = client.Post("/campaigns/pron/ratings", b.dump(), "application/json");
          if (res && res->status == 400) {
            ++rejected;
          } else {
            failures.push_back("score " + std::to_string(bad) + " accepted");
          }
        }
        auto ok = client.Post("/campaigns/pron/ratings", body.dump(), "application/json");
        if (!ok || ok->status != 200) throw Error("valid submission refused");
        ++accepted;
      }
    }
    auto csv = client.Get("/campaigns/pron/report.csv");
    if (!csv || csv->status != 200) throw Error("report download failed");
    csv_live = csv->body;

    const auto oracle = testing::OracleAggregate(dir / "ratings.jsonl", "pron");
    const eval::AggregateReport report = service.Report("pron");
    for (const eval::Cell& cell : report.cells) {
      auto it = oracle.find({cell.system, cell.trial});
      if (it == oracle.end() || !cell.mean || cell.count != it->second.n ||
          std::abs(*cell.mean - it->second.mean) > 1e-12 ||
          std::abs(*cell.median - it->second.median) > 1e-12) {
        failures.push_back("aggregate differs at (" + cell.system + ", " + cell.trial + ")");
      }
    }
  }
  eval::EvalService replayed({campaign}, dir / "ratings.jsonl");
  if (replayed.ReportCsv("pron") != csv_live) failures.push_back("replayed aggregate differs");
  return {failures.empty(),
          failures.empty()
              ? std::to_string(accepted) + " trials rated over HTTP; " + std::to_string(rejected) +
                    " out-of-range submissions rejected; no system names in payloads; aggregate "
                    "matches log recomputation and restart replay"
              : failures.front()};
}

}  // namespace
}  // namespace roadapt

int main() {
  using roadapt::Outcome;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"1 gradient integrity", roadapt::GradientIntegrity},
      {"2 frozen-backbone invariance", roadapt::FrozenBackboneInvariance},
      {"3 training effectiveness", roadapt::TrainingEffectiveness},
      {"4 code-switch identities", roadapt::CodeSwitchIdentities},
      {"5 metrics oracle", roadapt::MetricsOracle},
      {"6 table identity audit", roadapt::TableIdentityAudit},
      {"7 hyperparameter fidelity", roadapt::HyperparameterFidelity},
      {"8 determinism", roadapt::Determinism},
      {"9 evalsvc properties", roadapt::EvalServiceProperties},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
