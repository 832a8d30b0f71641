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

// Listening-test campaigns: manifest parsing, trial construction and the
// per-listener blinded view of a trial.

#ifndef ROADAPT_EVAL_CAMPAIGN_H_
#define ROADAPT_EVAL_CAMPAIGN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace roadapt::eval {

enum class Task { kSpeakerSimilarity, kNaturalness, kCodeSwitching };
enum class Role { kCandidate, kLowAnchor, kHighAnchor };

std::string_view TaskName(Task task);
Task ParseTask(std::string_view name);
std::string_view RoleName(Role role);
// Accepts "natural" as an alias for the high anchor.
Role ParseRole(std::string_view name);

// Prompt shown to listeners for each task.
std::string_view CanonicalPrompt(Task task);

inline constexpr std::size_t kMinStimuli = 3;
inline constexpr std::size_t kMaxStimuli = 4;

struct SentenceSpec {
  std::string id;
  std::string text;
  std::optional<std::string> reference;  // similarity only; overrides the campaign reference
};

struct SystemSpec {
  std::string name;
  Role role = Role::kCandidate;
  std::map<std::string, std::string> files;  // sentence id -> audio path
};

// The operator-written manifest. Sentences may be plain strings (ids become
// "1", "2", ...) or objects {id, text, reference?}.
struct CampaignManifest {
  std::string id = "campaign";
  Task task = Task::kNaturalness;
  std::optional<std::string> prompt_override;
  std::optional<std::string> reference;
  std::vector<SentenceSpec> sentences;
  std::vector<SystemSpec> systems;
  std::uint64_t seed = 0;

  static CampaignManifest FromJson(const nlohmann::json& j);
  static CampaignManifest Load(const std::filesystem::path& path);
};

struct Stimulus {
  std::string system;
  std::string path;
};

struct Trial {
  std::string id;
  std::string sentence;
  std::optional<std::string> reference;
  std::vector<Stimulus> stimuli;  // roster order; never exposed as is
};

struct Campaign {
  std::string id;
  Task task = Task::kNaturalness;
  std::string prompt;
  std::uint64_t seed = 0;
  std::vector<SystemSpec> systems;
  std::vector<Trial> trials;

  const Trial* FindTrial(std::string_view trial_id) const;
  nlohmann::json ToJson() const;
  static Campaign FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static Campaign Load(const std::filesystem::path& path);
};

struct BuildOptions {
  // Relative audio paths resolve against this directory.
  std::filesystem::path base_dir;
  // Require every referenced audio file to exist.
  bool check_files = true;
};

// One trial per sentence. Throws ValidationError listing every missing
// (sentence, system) file, on a stimulus count outside [3, 4], or when a
// similarity campaign lacks a reference sample.
Campaign BuildCampaign(const CampaignManifest& manifest, const BuildOptions& options = {});

// A trial as one listener sees it: stimuli in a listener-specific order,
// each behind an opaque key.
struct BlindStimulus {
  std::string key;
  std::size_t stimulus_index;  // into Trial::stimuli
};

struct BlindTrial {
  std::size_t trial_index = 0;
  std::vector<BlindStimulus> stimuli;
  std::optional<std::string> reference_key;
};

// Deterministic in (campaign id, seed, listener, trial).
BlindTrial Blind(const Campaign& campaign, std::string_view listener, std::size_t trial_index);

}  // namespace roadapt::eval

#endif  // ROADAPT_EVAL_CAMPAIGN_H_
