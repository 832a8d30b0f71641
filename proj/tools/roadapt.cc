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

// roadapt: command-line front end.
//
// Exit codes: 0 success, 1 validation or usage error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "roadapt/error.h"
#include "roadapt/eval/campaign.h"
#include "roadapt/eval/server.h"
#include "roadapt/eval/service.h"
#include "roadapt/io.h"
#include "roadapt/metrics/metrics.h"
#include "roadapt/model/adapter.h"
#include "roadapt/model/backbone.h"
#include "roadapt/model/codeswitch.h"
#include "roadapt/nn/kernels.h"
#include "roadapt/text/codec.h"
#include "roadapt/train/checkpoint.h"
#include "roadapt/train/corpus.h"
#include "roadapt/train/trainer.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace roadapt {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// Prints `j` with --json, otherwise `human`.
void Emit(bool as_json, const json& j, const std::string& human) {
  if (as_json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << human;
    if (!human.empty() && human.back() != '\n') std::cout << '\n';
  }
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string Fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void WriteTextFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  if (!out) throw IoError(path.string(), "write failed");
}

// ---------------------------------------------------------------- gen-corpus

struct GenCorpusArgs {
  std::string out;
  train::SyntheticCorpusOptions opts;
  bool json = false;
};

void RunGenCorpus(const GenCorpusArgs& a) {
  const text::Vocab vocab = text::Vocab::RomanianDefault();
  const train::CorpusManifest m = train::MakeSyntheticCorpus(a.opts, vocab, a.out);
  json j = {{"out", a.out},
            {"manifest", (fs::path(a.out) / "manifest.jsonl").string()},
            {"sentences", m.entries.size()},
            {"d_mel", a.opts.d_mel},
            {"frames_per_char", a.opts.frames_per_char},
            {"noise_std", a.opts.noise_std},
            {"seed", a.opts.seed}};
  Emit(a.json, j,
       "wrote " + std::to_string(m.entries.size()) + " sentences to " + j["manifest"].get<std::string>());
}

// --------------------------------------------------------------------- train

struct TrainArgs {
  std::string config_path;
  std::string corpus;
  std::string out;
  std::string vocab_path;
  std::optional<double> lr;
  std::optional<std::size_t> max_steps, warmup, frame_budget, max_samples, checkpoint_every;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool dry_run = false;
  bool json = false;
};

struct ResolvedTrain {
  train::TrainConfig train;
  model::AdapterConfig adapter;
  model::BackboneConfig backbone;
  json Echo() const {
    json j = train.ToJson();
    j["adapter"] = adapter.ToJson();
    j["backbone"] = backbone.ToJson();
    return j;
  }
};

// Defaults, then the config file, then flags.
ResolvedTrain ResolveTrainConfig(const TrainArgs& a, const text::Vocab& ro, const text::Vocab& en,
                                 std::optional<std::size_t> mel_dim) {
  json file = json::object();
  if (!a.config_path.empty()) file = io::ReadJson(a.config_path);
  ResolvedTrain r;
  r.train = train::TrainConfig::FromJson(file);
  if (a.lr) r.train.learning_rate = *a.lr;
  if (a.max_steps) r.train.max_steps = *a.max_steps;
  if (a.warmup) r.train.warmup_updates = *a.warmup;
  if (a.frame_budget) r.train.frame_budget = *a.frame_budget;
  if (a.max_samples) r.train.max_samples_per_batch = *a.max_samples;
  if (a.checkpoint_every) r.train.checkpoint_every = *a.checkpoint_every;
  if (a.seed) r.train.seed = *a.seed;
  if (a.threads) r.train.threads = *a.threads;
  r.train.Validate();

  try {
    r.adapter = model::AdapterConfig::FromJson(file.value("adapter", json::object()));
    r.backbone = model::BackboneConfig::FromJson(file.value("backbone", json::object()));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  r.adapter.vocab_size = ro.size();
  r.backbone.vocab_size = en.size();
  r.backbone.text_dim = r.adapter.hidden_dim;
  if (mel_dim) r.backbone.mel_dim = *mel_dim;
  r.adapter.Validate();
  r.backbone.Validate();
  return r;
}

void RunTrain(const TrainArgs& a) {
  const text::Vocab ro =
      a.vocab_path.empty() ? text::Vocab::RomanianDefault() : text::Vocab::Load(a.vocab_path);
  const text::Vocab en = text::Vocab::PrintableAscii();

  std::optional<train::CorpusManifest> manifest;
  std::optional<std::size_t> mel_dim;
  if (!a.corpus.empty()) {
    manifest = train::CorpusManifest::Load(a.corpus);
    if (manifest->entries.empty()) throw ValidationError("corpus is empty");
    mel_dim = io::ReadMel(manifest->ResolveMel(manifest->entries.front())).cols();
  }
  const ResolvedTrain cfg = ResolveTrainConfig(a, ro, en, mel_dim);
  if (a.dry_run) {
    Emit(a.json, {{"config", cfg.Echo()}}, "config:\n" + cfg.Echo().dump(2));
    return;
  }
  if (!manifest) throw ValidationError("--corpus is required unless --dry-run is given");
  if (a.out.empty()) throw ValidationError("--out is required unless --dry-run is given");
  if (!a.json) std::cout << "config:\n" << cfg.Echo().dump(2) << std::endl;

  model::Adapter<float> adapter(cfg.adapter);
  const model::FrozenBackbone<float> backbone(cfg.backbone);
  train::Trainer trainer(cfg.train, *manifest, ro, adapter, backbone);
  trainer.set_english_vocab(en);
  const std::size_t report_every = std::max<std::size_t>(1, cfg.train.max_steps / 20);
  const train::TrainResult result =
      trainer.Run(fs::path(a.out), [&](std::size_t step, double loss) {
        if (!a.json && (step % report_every == 0 || step == cfg.train.max_steps)) {
          std::cerr << "step " << step << " loss " << Fixed(loss, 6) << '\n';
        }
      });
  json j = {{"config", cfg.Echo()},
            {"steps", result.steps},
            {"final_loss", result.loss_history.empty() ? 0.0 : result.loss_history.back()},
            {"loss_history", result.loss_history},
            {"backbone_hash", result.backbone_hash},
            {"checkpoint", a.out}};
  Emit(a.json, j,
       "trained " + std::to_string(result.steps) + " steps; final loss " +
           Fixed(j["final_loss"].get<double>(), 6) + "; checkpoint " + a.out);
}

// ------------------------------------------------------- embed / merge-cs / synth

struct ModelArgs {
  std::string ckpt;
  std::string text;
  std::string out;
  std::size_t frames = 0;
  std::size_t frames_per_char = 2;
  std::size_t steps = 32;
  std::uint64_t seed = 0;
  bool code_switch = false;
  bool json = false;
};

void RunEmbed(const ModelArgs& a) {
  const train::LoadedCheckpoint ck = train::LoadCheckpoint(a.ckpt);
  text::TextSequence seq = text::Encode(a.text, ck.romanian);
  if (a.frames) seq = text::PadToFrames(seq, a.frames, ck.romanian);
  const nn::Tensor<float> h = ck.adapter.Forward(seq);
  io::WriteTensorDump(a.out, h);
  json j = {{"out", a.out}, {"rows", h.rows()}, {"cols", h.cols()}};
  Emit(a.json, j, "wrote h_ctx [" + std::to_string(h.rows()) + " x " + std::to_string(h.cols()) +
                      "] to " + a.out);
}

void RunMergeCs(const ModelArgs& a) {
  const train::LoadedCheckpoint ck = train::LoadCheckpoint(a.ckpt);
  text::CodeSwitchText cs = text::ParseCodeSwitch(a.text, ck.romanian, ck.english);
  if (a.frames) {
    cs.seq = text::PadToFrames(cs.seq, a.frames, ck.romanian);
    cs.mask = text::PadMask(cs.mask, a.frames);
  }
  const model::MergedEmbedding<float> m =
      model::Merge(cs.seq, cs.mask, ck.adapter, ck.backbone, ck.romanian, ck.english);
  io::WriteTensorDump(a.out, m.h_cs);
  std::string prov;
  for (text::Language l : m.provenance) prov += l == text::Language::kRomanian ? 'R' : 'E';
  json j = {{"out", a.out}, {"rows", m.h_cs.rows()}, {"cols", m.h_cs.cols()}, {"provenance", prov}};
  Emit(a.json, j, "wrote h_cs [" + std::to_string(m.h_cs.rows()) + " x " +
                      std::to_string(m.h_cs.cols()) + "] to " + a.out + "\nprovenance " + prov);
}

void RunSynth(const ModelArgs& a) {
  const train::LoadedCheckpoint ck = train::LoadCheckpoint(a.ckpt);
  model::SynthesisOptions opts;
  opts.frames_per_char = a.frames_per_char;
  opts.n_frames = a.frames;
  opts.n_steps = a.steps;
  opts.seed = a.seed;
  const nn::Tensor<float> mel =
      a.code_switch
          ? model::SynthesizeCodeSwitch(a.text, ck.romanian, ck.english, ck.adapter, ck.backbone, opts)
          : model::Synthesize(a.text, ck.romanian, ck.adapter, ck.backbone, opts);
  io::WriteMel(a.out, mel);
  json j = {{"out", a.out}, {"frames", mel.rows()}, {"channels", mel.cols()},
            {"steps", a.steps}, {"seed", a.seed}};
  Emit(a.json, j, "wrote mel [" + std::to_string(mel.rows()) + " x " + std::to_string(mel.cols()) +
                      "] to " + a.out);
}

// ------------------------------------------------------------------ eval-wer

struct EvalWerArgs {
  std::string ref, hyp, system = "system", csv;
  bool normalize = false;
  bool json = false;
};

void RunEvalWer(const EvalWerArgs& a) {
  const auto refs = ReadLines(a.ref);
  const auto hyps = ReadLines(a.hyp);
  if (refs.size() != hyps.size()) {
    throw ValidationError("reference has " + std::to_string(refs.size()) +
                          " lines but hypothesis has " + std::to_string(hyps.size()));
  }
  metrics::AlignmentCounts total;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    total += metrics::Align(metrics::Tokenize(refs[i], a.normalize),
                            metrics::Tokenize(hyps[i], a.normalize));
  }
  const metrics::MetricReport r = metrics::MetricReport::FromCounts(total);
  const std::string header = "system,WER,MER,WIL,WIP";
  const std::string row = a.system + "," + Percent(r.wer) + "," + Percent(r.mer) + "," +
                          Percent(r.wil) + "," + Percent(r.wip);
  if (!a.csv.empty()) WriteTextFile(a.csv, header + "\n" + row + "\n");
  json j = {{"system", a.system},
            {"lines", refs.size()},
            {"counts",
             {{"hits", total.hits},
              {"substitutions", total.substitutions},
              {"deletions", total.deletions},
              {"insertions", total.insertions},
              {"n_ref", total.n_ref},
              {"n_hyp", total.n_hyp}}},
            {"wer", r.wer},
            {"mer", r.mer},
            {"wil", r.wil},
            {"wip", r.wip},
            {"csv", header + "\n" + row}};
  Emit(a.json, j,
       "WER " + Percent(r.wer) + "%\nMER " + Percent(r.mer) + "%\nWIL " + Percent(r.wil) +
           "%\nWIP " + Percent(r.wip) + "%\n" + header + "\n" + row);
}

// ------------------------------------------------------------------ eval-sim

struct EvalSimArgs {
  std::string pairs, system = "system", csv;
  bool json = false;
};

void RunEvalSim(const EvalSimArgs& a) {
  std::vector<double> cosines;
  std::size_t lineno = 0;
  for (const std::string& line : ReadLines(a.pairs)) {
    ++lineno;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto r = j.at("ref_embedding").get<std::vector<double>>();
      const auto g = j.at("gen_embedding").get<std::vector<double>>();
      cosines.push_back(metrics::Cosine(r, g));
    } catch (const json::exception& e) {
      throw ValidationError(a.pairs + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(a.pairs + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  const metrics::SimilarityStats s = metrics::Summarize(cosines);
  const std::string header = "system,mean,std,min,max,median";
  const std::string row = a.system + "," + Fixed(s.mean, 4) + "," + Fixed(s.stddev, 4) + "," +
                          Fixed(s.min, 4) + "," + Fixed(s.max, 4) + "," + Fixed(s.median, 4);
  if (!a.csv.empty()) WriteTextFile(a.csv, header + "\n" + row + "\n");
  json j = {{"system", a.system}, {"count", s.count}, {"mean", s.mean},   {"std", s.stddev},
            {"min", s.min},       {"max", s.max},     {"median", s.median}, {"csv", header + "\n" + row}};
  Emit(a.json, j,
       "Mean " + Fixed(s.mean, 4) + "\nStandard Deviation " + Fixed(s.stddev, 4) + "\nMinimum " +
           Fixed(s.min, 4) + "\nMaximum " + Fixed(s.max, 4) + "\nMedian " + Fixed(s.median, 4) +
           "\n" + header + "\n" + row);
}

// ------------------------------------------------------------------ campaign

struct CampaignArgs {
  std::string manifest, out, log = "ratings.jsonl", host = "127.0.0.1", static_dir;
  std::vector<std::string> campaigns;
  std::optional<std::uint64_t> seed;
  int port = 8080;
  bool no_check_files = false;
  bool json = false;
};

void RunCampaignBuild(const CampaignArgs& a) {
  eval::CampaignManifest m = eval::CampaignManifest::Load(a.manifest);
  if (a.seed) m.seed = *a.seed;
  eval::BuildOptions opts;
  opts.base_dir = fs::path(a.manifest).parent_path();
  opts.check_files = !a.no_check_files;
  const eval::Campaign c = eval::BuildCampaign(m, opts);
  c.Save(a.out);
  json j = {{"out", a.out}, {"id", c.id}, {"task", eval::TaskName(c.task)},
            {"trials", c.trials.size()}, {"systems", c.systems.size()}, {"prompt", c.prompt}};
  Emit(a.json, j, "built campaign '" + c.id + "' (" + std::string(eval::TaskName(c.task)) + ", " +
                      std::to_string(c.trials.size()) + " trials) -> " + a.out);
}

std::vector<eval::Campaign> LoadCampaigns(const std::vector<std::string>& paths) {
  std::vector<eval::Campaign> out;
  for (const auto& p : paths) out.push_back(eval::Campaign::Load(p));
  return out;
}

void RunCampaignServe(const CampaignArgs& a) {
  eval::EvalService service(LoadCampaigns(a.campaigns), a.log);
  httplib::Server server;
  std::optional<fs::path> static_dir;
  if (!a.static_dir.empty()) static_dir = a.static_dir;
  eval::InstallRoutes(server, service, static_dir);
  std::cerr << "serving " << a.campaigns.size() << " campaign(s) on http://" << a.host << ':'
            << a.port << " (log " << a.log << ", " << service.num_listeners()
            << " listeners replayed)\n";
  if (!server.listen(a.host, a.port)) {
    throw Error("cannot listen on " + a.host + ":" + std::to_string(a.port));
  }
}

void RunCampaignReport(const CampaignArgs& a) {
  if (!fs::exists(a.log)) throw IoError(a.log, "rating log not found");
  std::vector<eval::Campaign> campaigns = LoadCampaigns(a.campaigns);
  // Replay into a scratch copy so the report never touches the live log.
  const fs::path scratch = fs::temp_directory_path() / ("roadapt-report-" + std::to_string(::getpid()) + ".jsonl");
  fs::copy_file(a.log, scratch, fs::copy_options::overwrite_existing);
  std::string csv;
  json reports = json::object();
  try {
    eval::EvalService service(campaigns, scratch);
    for (const auto& c : campaigns) {
      const std::string one = service.ReportCsv(c.id);
      csv += csv.empty() ? one : one.substr(one.find('\n') + 1);
      reports[c.id] = one;
    }
  } catch (...) {
    fs::remove(scratch);
    throw;
  }
  fs::remove(scratch);
  if (!a.out.empty()) WriteTextFile(a.out, csv);
  Emit(a.json, {{"reports", reports}, {"out", a.out}}, csv);
}

// ---------------------------------------------------------------------- main

int Main(int argc, char** argv) {
  CLI::App app{"roadapt: Romanian input adapter for a frozen flow-matching TTS backbone"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_help_all_flag("--help-all", "Expand all help");

  GenCorpusArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a seeded synthetic mel corpus");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--sentences", gen.opts.n_sentences, "Number of sentences")->capture_default_str();
  gen_cmd->add_option("--d-mel", gen.opts.d_mel, "Mel channels")->capture_default_str();
  gen_cmd->add_option("--frames-per-char", gen.opts.frames_per_char)->capture_default_str();
  gen_cmd->add_option("--noise-std", gen.opts.noise_std)->capture_default_str();
  gen_cmd->add_option("--min-chars", gen.opts.min_chars)->capture_default_str();
  gen_cmd->add_option("--max-chars", gen.opts.max_chars)->capture_default_str();
  gen_cmd->add_option("--seed", gen.opts.seed)->capture_default_str();
  gen_cmd->add_flag("--json", gen.json, "Machine-readable output");
  gen_cmd->callback([&] { RunGenCorpus(gen); });

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the adapter against the frozen backbone");
  train_cmd->add_option("--config", tr.config_path, "JSON config (flags override it)");
  train_cmd->add_option("--corpus", tr.corpus, "Corpus manifest (JSON lines)");
  train_cmd->add_option("--out", tr.out, "Checkpoint directory");
  train_cmd->add_option("--vocab", tr.vocab_path, "Romanian vocabulary JSON");
  train_cmd->add_option("--lr", tr.lr, "Peak learning rate");
  train_cmd->add_option("--max-steps", tr.max_steps);
  train_cmd->add_option("--warmup", tr.warmup, "Warmup updates");
  train_cmd->add_option("--frame-budget", tr.frame_budget, "Frames per batch");
  train_cmd->add_option("--max-samples", tr.max_samples, "Samples per batch cap");
  train_cmd->add_option("--checkpoint-every", tr.checkpoint_every);
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--threads", tr.threads, "Worker threads (0 = OpenMP default)");
  train_cmd->add_flag("--dry-run", tr.dry_run, "Print the resolved config and exit");
  train_cmd->add_flag("--json", tr.json, "Machine-readable output");
  train_cmd->callback([&] { RunTrain(tr); });

  ModelArgs emb, mcs, syn;
  auto* embed_cmd = app.add_subcommand("embed", "Dump the adapter output h_ctx for a text");
  auto* merge_cmd = app.add_subcommand("merge-cs", "Dump the merged code-switch embedding");
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a mel spectrogram by Euler sampling");
  for (auto [cmd, args] : {std::pair{embed_cmd, &emb}, {merge_cmd, &mcs}, {synth_cmd, &syn}}) {
    cmd->add_option("--ckpt", args->ckpt, "Checkpoint directory")->required();
    cmd->add_option("--text", args->text, "Input text (UTF-8)")->required();
    cmd->add_option("--out", args->out, "Output file")->required();
    cmd->add_option("--frames", args->frames, "Pad to this many frames");
    cmd->add_flag("--json", args->json, "Machine-readable output");
  }
  synth_cmd->add_option("--frames-per-char", syn.frames_per_char)->capture_default_str();
  synth_cmd->add_option("--steps", syn.steps, "Euler steps")->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed, "Noise seed")->capture_default_str();
  synth_cmd->add_flag("--code-switch", syn.code_switch, "Parse '~' language toggles");
  embed_cmd->callback([&] { RunEmbed(emb); });
  merge_cmd->callback([&] { RunMergeCs(mcs); });
  synth_cmd->callback([&] { RunSynth(syn); });

  EvalWerArgs wer;
  auto* wer_cmd = app.add_subcommand("eval-wer", "WER/MER/WIL/WIP over line-aligned transcripts");
  wer_cmd->add_option("--ref", wer.ref, "Reference transcripts")->required();
  wer_cmd->add_option("--hyp", wer.hyp, "Hypothesis transcripts")->required();
  wer_cmd->add_option("--system", wer.system, "System name for the CSV row")->capture_default_str();
  wer_cmd->add_option("--csv", wer.csv, "Also write the CSV to this file");
  wer_cmd->add_flag("--normalize", wer.normalize, "Lower-case and strip punctuation");
  wer_cmd->add_flag("--json", wer.json, "Machine-readable output");
  wer_cmd->callback([&] { RunEvalWer(wer); });

  EvalSimArgs sim;
  auto* sim_cmd = app.add_subcommand("eval-sim", "Cosine-similarity statistics over embedding pairs");
  sim_cmd->add_option("--pairs", sim.pairs, "JSON lines of {ref_embedding, gen_embedding}")->required();
  sim_cmd->add_option("--system", sim.system, "System name for the CSV row")->capture_default_str();
  sim_cmd->add_option("--csv", sim.csv, "Also write the CSV to this file");
  sim_cmd->add_flag("--json", sim.json, "Machine-readable output");
  sim_cmd->callback([&] { RunEvalSim(sim); });

  CampaignArgs camp;
  auto* camp_cmd = app.add_subcommand("campaign", "Blind listening-test campaigns");
  camp_cmd->require_subcommand(1);
  auto* build_cmd = camp_cmd->add_subcommand("build", "Build a campaign from a manifest");
  build_cmd->add_option("--manifest", camp.manifest, "Campaign manifest JSON")->required();
  build_cmd->add_option("--out", camp.out, "Built campaign JSON")->required();
  build_cmd->add_option("--seed", camp.seed, "Override the manifest seed");
  build_cmd->add_flag("--no-check-files", camp.no_check_files, "Skip audio existence checks");
  build_cmd->add_flag("--json", camp.json, "Machine-readable output");
  build_cmd->callback([&] { RunCampaignBuild(camp); });
  auto* serve_cmd = camp_cmd->add_subcommand("serve", "Serve campaigns over HTTP");
  serve_cmd->add_option("--campaign", camp.campaigns, "Built campaign JSON (repeatable)")->required();
  serve_cmd->add_option("--log", camp.log, "Append-only rating log")->capture_default_str();
  serve_cmd->add_option("--host", camp.host)->capture_default_str();
  serve_cmd->add_option("--port", camp.port)->capture_default_str();
  serve_cmd->add_option("--static-dir", camp.static_dir, "Listener web client to mount at /");
  serve_cmd->callback([&] { RunCampaignServe(camp); });
  auto* report_cmd = camp_cmd->add_subcommand("report", "Aggregate a rating log to CSV");
  report_cmd->add_option("--campaign", camp.campaigns, "Built campaign JSON (repeatable)")->required();
  report_cmd->add_option("--log", camp.log, "Rating log")->required();
  report_cmd->add_option("--out", camp.out, "CSV output file");
  report_cmd->add_flag("--json", camp.json, "Machine-readable output");
  report_cmd->callback([&] { RunCampaignReport(camp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace
}  // namespace roadapt

int main(int argc, char** argv) { return roadapt::Main(argc, argv); }
