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

// Rating collection for listening-test campaigns: listener registry, blinded
// trial payloads, validated submissions on an append-only JSON-lines log, and
// per-(system, trial) aggregation.

#ifndef ROADAPT_EVAL_SERVICE_H_
#define ROADAPT_EVAL_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "roadapt/error.h"
#include "roadapt/eval/campaign.h"

namespace roadapt::eval {

class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Rating {
  std::string key;
  std::string system;
  int score = 0;
};

struct Submission {
  std::string campaign;
  std::string listener;
  std::string trial;
  std::int64_t timestamp_ms = 0;
  std::vector<Rating> ratings;
};

struct Cell {
  std::string system;
  std::string trial;
  std::size_t count = 0;
  std::optional<double> mean;  // empty when no rating exists
  std::optional<double> median;
};

struct SystemSummary {
  std::string system;
  Role role = Role::kCandidate;
  std::size_t cells = 0;          // non-empty cells
  std::optional<double> overall;  // mean of cell means
};

struct AggregateReport {
  std::vector<Cell> cells;  // system-major, trial order
  std::vector<SystemSummary> systems;
};

// `submissions` must already be reduced to the latest one per
// (listener, trial).
AggregateReport Aggregate(const Campaign& campaign, const std::vector<Submission>& submissions);

// Columns: system,role,trial,n,mean,median. The last row per system has
// trial "overall" with n = number of non-empty cells.
std::string ToCsv(const Campaign& campaign, const AggregateReport& report);

class EvalService {
 public:
  // Replays `log_path` if it exists; later appends go to the same file.
  EvalService(std::vector<Campaign> campaigns, std::filesystem::path log_path);

  EvalService(const EvalService&) = delete;
  EvalService& operator=(const EvalService&) = delete;

  // Returns a fresh listener id: sanitized handle plus a server nonce.
  std::string RegisterListener(const std::string& handle);

  // The next unrated trial for `listener`, or {"complete": true}.
  nlohmann::json NextTrial(const std::string& campaign_id, const std::string& listener) const;

  // Body: {listener, trial_id, scores: {key: int}}. Every stimulus of the
  // trial must be scored with an integer in [0, 100]. Throws
  // ValidationError (or NotFoundError) naming the offending field.
  nlohmann::json SubmitRatings(const std::string& campaign_id, const nlohmann::json& body);

  AggregateReport Report(const std::string& campaign_id) const;
  std::string ReportCsv(const std::string& campaign_id) const;

  std::optional<std::filesystem::path> AudioPath(const std::string& key) const;

  std::size_t num_listeners() const;
  const std::filesystem::path& log_path() const { return log_path_; }

 private:
  struct ListenerState {
    std::string handle;
  };
  using SubmissionKey = std::pair<std::string, std::string>;  // (listener, trial)

  const Campaign& FindCampaign(const std::string& id) const;
  void AddListenerLocked(const std::string& id, const std::string& handle);
  void ApplyLocked(Submission s);
  void Append(const nlohmann::json& record);
  void Replay();

  std::map<std::string, Campaign> campaigns_;
  std::filesystem::path log_path_;

  mutable std::mutex mu_;
  std::ofstream log_;
  std::map<std::string, ListenerState> listeners_;
  // campaign -> latest submission per (listener, trial)
  std::map<std::string, std::map<SubmissionKey, Submission>> latest_;
  std::unordered_map<std::string, std::filesystem::path> audio_;
};

}  // namespace roadapt::eval

#endif  // ROADAPT_EVAL_SERVICE_H_
