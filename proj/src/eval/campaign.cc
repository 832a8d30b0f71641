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

#include "roadapt/eval/campaign.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "roadapt/error.h"
#include "roadapt/hash.h"
#include "roadapt/io.h"

namespace roadapt::eval {

using nlohmann::json;

std::string_view TaskName(Task task) {
  switch (task) {
    case Task::kSpeakerSimilarity: return "speaker_similarity";
    case Task::kNaturalness: return "naturalness";
    case Task::kCodeSwitching: return "code_switching";
  }
  return "?";
}

Task ParseTask(std::string_view name) {
  if (name == "speaker_similarity" || name == "similarity") return Task::kSpeakerSimilarity;
  if (name == "naturalness") return Task::kNaturalness;
  if (name == "code_switching" || name == "code-switching") return Task::kCodeSwitching;
  throw ValidationError("unknown task '" + std::string(name) + "'");
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kCandidate: return "candidate";
    case Role::kLowAnchor: return "low_anchor";
    case Role::kHighAnchor: return "high_anchor";
  }
  return "?";
}

Role ParseRole(std::string_view name) {
  if (name == "candidate") return Role::kCandidate;
  if (name == "low_anchor") return Role::kLowAnchor;
  if (name == "high_anchor" || name == "natural") return Role::kHighAnchor;
  throw ValidationError("unknown system role '" + std::string(name) + "'");
}

std::string_view CanonicalPrompt(Task task) {
  switch (task) {
    case Task::kSpeakerSimilarity:
      return "Please rate each audio sample according to how similar the speaker sounds to the "
             "reference speaker";
    case Task::kNaturalness:
      return "Please rate each audio sample based on the pronunciation of the words and how natural "
             "it sounds";
    case Task::kCodeSwitching:
      return "Please rate each audio sample based on how natural the transition between Romanian "
             "and English is";
  }
  return "";
}

CampaignManifest CampaignManifest::FromJson(const json& j) {
  try {
    CampaignManifest m;
    if (j.contains("id")) m.id = j.at("id").get<std::string>();
    m.task = ParseTask(j.at("task").get<std::string>());
    if (j.contains("prompt_override") && !j.at("prompt_override").is_null()) {
      m.prompt_override = j.at("prompt_override").get<std::string>();
    }
    if (j.contains("reference")) m.reference = j.at("reference").get<std::string>();
    m.seed = j.value("seed", std::uint64_t{0});
    std::size_t n = 0;
    for (const json& s : j.at("sentences")) {
      ++n;
      SentenceSpec spec;
      if (s.is_string()) {
        spec.id = std::to_string(n);
        spec.text = s.get<std::string>();
      } else {
        spec.id = s.contains("id") ? s.at("id").get<std::string>() : std::to_string(n);
        spec.text = s.at("text").get<std::string>();
        if (s.contains("reference")) spec.reference = s.at("reference").get<std::string>();
      }
      m.sentences.push_back(std::move(spec));
    }
    for (const json& s : j.at("systems")) {
      SystemSpec sys;
      sys.name = s.at("name").get<std::string>();
      sys.role = ParseRole(s.value("role", std::string("candidate")));
      const json& files = s.at("files");
      if (files.is_array()) {
        // Positional: one file per sentence in manifest order.
        for (std::size_t i = 0; i < files.size() && i < m.sentences.size(); ++i) {
          sys.files[m.sentences[i].id] = files[i].get<std::string>();
        }
      } else {
        for (const auto& [k, v] : files.items()) sys.files[k] = v.get<std::string>();
      }
      m.systems.push_back(std::move(sys));
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("campaign manifest: ") + e.what());
  }
}

CampaignManifest CampaignManifest::Load(const std::filesystem::path& path) {
  return FromJson(io::ReadJson(path));
}

const Trial* Campaign::FindTrial(std::string_view trial_id) const {
  for (const Trial& t : trials) {
    if (t.id == trial_id) return &t;
  }
  return nullptr;
}

json Campaign::ToJson() const {
  json systems_json = json::array();
  for (const SystemSpec& s : systems) {
    systems_json.push_back({{"name", s.name}, {"role", RoleName(s.role)}, {"files", s.files}});
  }
  json trials_json = json::array();
  for (const Trial& t : trials) {
    json stim = json::array();
    for (const Stimulus& s : t.stimuli) stim.push_back({{"system", s.system}, {"path", s.path}});
    json tj = {{"id", t.id}, {"sentence", t.sentence}, {"stimuli", stim}};
    if (t.reference) tj["reference"] = *t.reference;
    trials_json.push_back(std::move(tj));
  }
  return {{"id", id},       {"task", TaskName(task)},  {"prompt", prompt},
          {"seed", seed},   {"systems", systems_json}, {"trials", trials_json}};
}

Campaign Campaign::FromJson(const json& j) {
  try {
    Campaign c;
    c.id = j.at("id").get<std::string>();
    c.task = ParseTask(j.at("task").get<std::string>());
    c.prompt = j.at("prompt").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const json& s : j.at("systems")) {
      c.systems.push_back({s.at("name").get<std::string>(), ParseRole(s.at("role").get<std::string>()),
                           s.at("files").get<std::map<std::string, std::string>>()});
    }
    for (const json& tj : j.at("trials")) {
      Trial t;
      t.id = tj.at("id").get<std::string>();
      t.sentence = tj.at("sentence").get<std::string>();
      if (tj.contains("reference")) t.reference = tj.at("reference").get<std::string>();
      for (const json& s : tj.at("stimuli")) {
        t.stimuli.push_back({s.at("system").get<std::string>(), s.at("path").get<std::string>()});
      }
      if (t.stimuli.size() < kMinStimuli || t.stimuli.size() > kMaxStimuli) {
        throw ValidationError("trial " + t.id + " has " + std::to_string(t.stimuli.size()) +
                              " stimuli");
      }
      c.trials.push_back(std::move(t));
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("campaign: ") + e.what());
  }
}

void Campaign::Save(const std::filesystem::path& path) const { io::WriteJson(path, ToJson()); }

Campaign Campaign::Load(const std::filesystem::path& path) { return FromJson(io::ReadJson(path)); }

Campaign BuildCampaign(const CampaignManifest& m, const BuildOptions& options) {
  if (m.sentences.empty()) throw ValidationError("campaign has no sentences");
  if (m.systems.size() < kMinStimuli || m.systems.size() > kMaxStimuli) {
    throw ValidationError("a trial needs " + std::to_string(kMinStimuli) + " to " +
                          std::to_string(kMaxStimuli) + " stimuli; the roster has " +
                          std::to_string(m.systems.size()) + " systems");
  }
  std::set<std::string> names, ids;
  for (const SystemSpec& s : m.systems) {
    if (s.name.empty() || !names.insert(s.name).second) {
      throw ValidationError("duplicate or empty system name '" + s.name + "'");
    }
  }
  for (const SentenceSpec& s : m.sentences) {
    if (!ids.insert(s.id).second) throw ValidationError("duplicate sentence id '" + s.id + "'");
  }

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !options.base_dir.empty()) path = options.base_dir / path;
    return path;
  };

  Campaign c;
  c.id = m.id;
  c.task = m.task;
  c.prompt = m.prompt_override.value_or(std::string(CanonicalPrompt(m.task)));
  c.seed = m.seed;
  c.systems = m.systems;

  std::vector<std::string> missing;
  for (std::size_t i = 0; i < m.sentences.size(); ++i) {
    const SentenceSpec& s = m.sentences[i];
    Trial t;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%02zu", i + 1);
    t.id = buf;
    t.sentence = s.text;
    if (m.task == Task::kSpeakerSimilarity) {
      const auto& ref = s.reference ? s.reference : m.reference;
      if (!ref) throw ValidationError("sentence '" + s.id + "': similarity trials need a reference");
      const auto path = resolve(*ref);
      if (options.check_files && !std::filesystem::is_regular_file(path)) {
        missing.push_back("(" + s.id + ", reference): " + path.string());
      }
      t.reference = path.string();
    }
    for (const SystemSpec& sys : m.systems) {
      auto it = sys.files.find(s.id);
      if (it == sys.files.end()) {
        missing.push_back("(" + s.id + ", " + sys.name + "): no file listed");
        continue;
      }
      const auto path = resolve(it->second);
      if (options.check_files && !std::filesystem::is_regular_file(path)) {
        missing.push_back("(" + s.id + ", " + sys.name + "): " + path.string());
      }
      t.stimuli.push_back({sys.name, path.string()});
    }
    c.trials.push_back(std::move(t));
  }
  if (!missing.empty()) {
    std::string msg = "missing audio files:";
    for (const auto& x : missing) msg += "\n  " + x;
    throw ValidationError(msg);
  }
  return c;
}

BlindTrial Blind(const Campaign& campaign, std::string_view listener, std::size_t trial_index) {
  if (trial_index >= campaign.trials.size()) throw ValidationError("trial index out of range");
  const Trial& trial = campaign.trials[trial_index];
  const std::string scope = campaign.id + '\x1f' + std::to_string(campaign.seed) + '\x1f' +
                            std::string(listener) + '\x1f' + trial.id;

  BlindTrial b;
  b.trial_index = trial_index;
  std::vector<std::size_t> order(trial.stimuli.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(Sha256Seed("order\x1f" + scope));
  std::shuffle(order.begin(), order.end(), rng);
  // Keys are keyed digests of the slot position, not of the system.
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    b.stimuli.push_back({Sha256Hex("key\x1f" + scope + '\x1f' + std::to_string(slot)).substr(0, 20),
                         order[slot]});
  }
  if (trial.reference) b.reference_key = Sha256Hex("ref\x1f" + scope).substr(0, 20);
  return b;
}

}  // namespace roadapt::eval
