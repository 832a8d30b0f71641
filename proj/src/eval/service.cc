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

#include "roadapt/eval/service.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

namespace roadapt::eval {

using nlohmann::json;

namespace {

std::int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string Sanitize(const std::string& handle) {
  std::string out;
  for (char c : handle) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    out += ok ? c : '_';
    if (out.size() == 32) break;
  }
  return out.empty() ? "listener" : out;
}

std::string Nonce() {
  static std::random_device rd;
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(rd()));
  return buf;
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

double Median(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

}  // namespace

AggregateReport Aggregate(const Campaign& campaign, const std::vector<Submission>& submissions) {
  // (system, trial) -> scores
  std::map<std::pair<std::string, std::string>, std::vector<int>> scores;
  for (const Submission& s : submissions) {
    if (s.campaign != campaign.id) continue;
    for (const Rating& r : s.ratings) scores[{r.system, s.trial}].push_back(r.score);
  }
  AggregateReport report;
  for (const SystemSpec& sys : campaign.systems) {
    SystemSummary summary{sys.name, sys.role, 0, std::nullopt};
    double sum_of_means = 0;
    for (const Trial& t : campaign.trials) {
      Cell cell{sys.name, t.id, 0, std::nullopt, std::nullopt};
      auto it = scores.find({sys.name, t.id});
      if (it != scores.end() && !it->second.empty()) {
        const auto& v = it->second;
        double sum = 0;
        for (int x : v) sum += x;
        cell.count = v.size();
        cell.mean = sum / static_cast<double>(v.size());
        cell.median = Median(v);
        sum_of_means += *cell.mean;
        ++summary.cells;
      }
      report.cells.push_back(std::move(cell));
    }
    if (summary.cells > 0) summary.overall = sum_of_means / static_cast<double>(summary.cells);
    report.systems.push_back(std::move(summary));
  }
  return report;
}

std::string ToCsv(const Campaign& campaign, const AggregateReport& report) {
  std::ostringstream out;
  out << "system,role,trial,n,mean,median\n";
  std::size_t c = 0;
  for (const SystemSummary& s : report.systems) {
    const std::string role(RoleName(s.role));
    for (std::size_t t = 0; t < campaign.trials.size(); ++t, ++c) {
      const Cell& cell = report.cells[c];
      out << cell.system << ',' << role << ',' << cell.trial << ',' << cell.count << ','
          << (cell.mean ? FormatNumber(*cell.mean) : "") << ','
          << (cell.median ? FormatNumber(*cell.median) : "") << '\n';
    }
    out << s.system << ',' << role << ",overall," << s.cells << ','
        << (s.overall ? FormatNumber(*s.overall) : "") << ",\n";
  }
  return out.str();
}

EvalService::EvalService(std::vector<Campaign> campaigns, std::filesystem::path log_path)
    : log_path_(std::move(log_path)) {
  for (Campaign& c : campaigns) {
    const std::string id = c.id;
    if (!campaigns_.emplace(id, std::move(c)).second) {
      throw ValidationError("duplicate campaign id '" + id + "'");
    }
  }
  Replay();
  log_.open(log_path_, std::ios::app);
  if (!log_) throw IoError(log_path_.string(), "cannot open rating log for appending");
}

const Campaign& EvalService::FindCampaign(const std::string& id) const {
  auto it = campaigns_.find(id);
  if (it == campaigns_.end()) throw NotFoundError("unknown campaign '" + id + "'");
  return it->second;
}

void EvalService::Replay() {
  if (!std::filesystem::exists(log_path_)) return;
  std::ifstream in(log_path_);
  if (!in) throw IoError(log_path_.string(), "cannot read rating log");
  std::string line;
  std::size_t lineno = 0;
  std::lock_guard<std::mutex> lock(mu_);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception&) {
      // A torn final write (no trailing newline) is dropped; anything else
      // is corruption.
      if (in.eof()) break;
      throw IoError(log_path_.string(), "malformed record on line " + std::to_string(lineno));
    }
    const std::string type = rec.value("type", "");
    if (type == "listener") {
      AddListenerLocked(rec.at("id").get<std::string>(), rec.value("handle", ""));
    } else if (type == "ratings") {
      Submission s;
      s.campaign = rec.at("campaign").get<std::string>();
      s.listener = rec.at("listener").get<std::string>();
      s.trial = rec.at("trial").get<std::string>();
      s.timestamp_ms = rec.value("ts", std::int64_t{0});
      for (const json& r : rec.at("ratings")) {
        s.ratings.push_back(
            {r.at("key").get<std::string>(), r.at("system").get<std::string>(), r.at("score").get<int>()});
      }
      if (campaigns_.count(s.campaign)) ApplyLocked(std::move(s));
    } else {
      throw IoError(log_path_.string(), "unknown record type on line " + std::to_string(lineno));
    }
  }
}

void EvalService::AddListenerLocked(const std::string& id, const std::string& handle) {
  listeners_[id] = {handle};
  for (const auto& [cid, campaign] : campaigns_) {
    for (std::size_t t = 0; t < campaign.trials.size(); ++t) {
      const Trial& trial = campaign.trials[t];
      const BlindTrial b = Blind(campaign, id, t);
      for (const BlindStimulus& s : b.stimuli) audio_[s.key] = trial.stimuli[s.stimulus_index].path;
      if (b.reference_key) audio_[*b.reference_key] = *trial.reference;
    }
  }
}

void EvalService::ApplyLocked(Submission s) {
  auto& per_campaign = latest_[s.campaign];
  SubmissionKey key{s.listener, s.trial};
  per_campaign.insert_or_assign(key, std::move(s));
}

void EvalService::Append(const json& record) {
  log_ << record.dump() << '\n';
  log_.flush();
  if (!log_) throw IoError(log_path_.string(), "append failed");
}

std::string EvalService::RegisterListener(const std::string& handle) {
  std::lock_guard<std::mutex> lock(mu_);
  std::string id;
  do {
    id = Sanitize(handle) + "-" + Nonce();
  } while (listeners_.count(id));
  Append({{"type", "listener"}, {"id", id}, {"handle", handle}, {"ts", NowMs()}});
  AddListenerLocked(id, handle);
  return id;
}

json EvalService::NextTrial(const std::string& campaign_id, const std::string& listener) const {
  const Campaign& campaign = FindCampaign(campaign_id);
  std::lock_guard<std::mutex> lock(mu_);
  if (!listeners_.count(listener)) throw NotFoundError("unknown listener '" + listener + "'");
  const std::size_t total = campaign.trials.size();
  const auto cit = latest_.find(campaign_id);
  for (std::size_t t = 0; t < total; ++t) {
    const Trial& trial = campaign.trials[t];
    if (cit != latest_.end() && cit->second.count({listener, trial.id})) continue;
    const BlindTrial b = Blind(campaign, listener, t);
    json stimuli = json::array();
    for (const BlindStimulus& s : b.stimuli) {
      stimuli.push_back({{"key", s.key}, {"url", "/audio/" + s.key}});
    }
    json payload = {{"complete", false},
                    {"campaign", campaign.id},
                    {"trial_id", trial.id},
                    {"progress", {{"index", t + 1}, {"total", total}}},
                    {"prompt", campaign.prompt},
                    {"sentence", trial.sentence},
                    {"stimuli", stimuli}};
    if (b.reference_key) payload["reference_url"] = "/audio/" + *b.reference_key;
    return payload;
  }
  return {{"complete", true}, {"campaign", campaign.id}, {"progress", {{"index", total}, {"total", total}}}};
}

json EvalService::SubmitRatings(const std::string& campaign_id, const json& body) {
  const Campaign& campaign = FindCampaign(campaign_id);
  if (!body.is_object()) throw ValidationError("request body must be a JSON object");
  if (!body.contains("listener") || !body["listener"].is_string()) {
    throw ValidationError("missing string field 'listener'");
  }
  if (!body.contains("trial_id") || !body["trial_id"].is_string()) {
    throw ValidationError("missing string field 'trial_id'");
  }
  if (!body.contains("scores") || !body["scores"].is_object()) {
    throw ValidationError("missing object field 'scores'");
  }
  const std::string listener = body["listener"].get<std::string>();
  const std::string trial_id = body["trial_id"].get<std::string>();
  const json& scores = body["scores"];

  std::size_t trial_index = campaign.trials.size();
  for (std::size_t t = 0; t < campaign.trials.size(); ++t) {
    if (campaign.trials[t].id == trial_id) trial_index = t;
  }
  if (trial_index == campaign.trials.size()) {
    throw NotFoundError("unknown trial '" + trial_id + "'");
  }
  const Trial& trial = campaign.trials[trial_index];

  std::lock_guard<std::mutex> lock(mu_);
  if (!listeners_.count(listener)) throw NotFoundError("unknown listener '" + listener + "'");
  const BlindTrial b = Blind(campaign, listener, trial_index);
  std::map<std::string, std::size_t> by_key;
  for (const BlindStimulus& s : b.stimuli) by_key[s.key] = s.stimulus_index;

  for (const auto& [key, value] : scores.items()) {
    if (!by_key.count(key)) throw ValidationError("unknown stimulus key '" + key + "'");
    if (!value.is_number_integer()) {
      throw ValidationError("score for key '" + key + "' must be an integer");
    }
    const double v = value.get<double>();
    if (v < 0 || v > 100) {
      throw ValidationError("score for key '" + key + "' is outside [0, 100]");
    }
  }
  for (const BlindStimulus& s : b.stimuli) {
    if (!scores.contains(s.key)) throw ValidationError("stimulus '" + s.key + "' was not rated");
  }

  Submission sub;
  sub.campaign = campaign.id;
  sub.listener = listener;
  sub.trial = trial.id;
  sub.timestamp_ms = NowMs();
  json ratings = json::array();
  for (const BlindStimulus& s : b.stimuli) {
    const int score = static_cast<int>(scores[s.key].get<double>());
    const std::string& system = trial.stimuli[s.stimulus_index].system;
    sub.ratings.push_back({s.key, system, score});
    ratings.push_back({{"key", s.key}, {"system", system}, {"score", score}});
  }
  Append({{"type", "ratings"},
          {"campaign", sub.campaign},
          {"listener", listener},
          {"trial", trial.id},
          {"ts", sub.timestamp_ms},
          {"ratings", ratings}});
  ApplyLocked(std::move(sub));
  return {{"ok", true}, {"trial_id", trial.id}};
}

AggregateReport EvalService::Report(const std::string& campaign_id) const {
  const Campaign& campaign = FindCampaign(campaign_id);
  std::vector<Submission> subs;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = latest_.find(campaign_id);
    if (it != latest_.end()) {
      for (const auto& [k, s] : it->second) subs.push_back(s);
    }
  }
  return Aggregate(campaign, subs);
}

std::string EvalService::ReportCsv(const std::string& campaign_id) const {
  return ToCsv(FindCampaign(campaign_id), Report(campaign_id));
}

std::optional<std::filesystem::path> EvalService::AudioPath(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = audio_.find(key);
  if (it == audio_.end()) return std::nullopt;
  return it->second;
}

std::size_t EvalService::num_listeners() const {
  std::lock_guard<std::mutex> lock(mu_);
  return listeners_.size();
}

}  // namespace roadapt::eval
