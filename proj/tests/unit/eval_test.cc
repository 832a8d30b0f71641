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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "eval_fixture.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "roadapt/error.h"
#include "roadapt/eval/campaign.h"
#include "roadapt/eval/service.h"
#include "test_util.h"

namespace roadapt::eval {
namespace {

using nlohmann::json;
using roadapt::testing::DefaultRoster;
using roadapt::testing::PronunciationSentences;
using roadapt::testing::TempDir;
using roadapt::testing::WriteCampaignFiles;

Campaign BuildFrom(const TempDir& dir, const json& manifest) {
  return BuildCampaign(CampaignManifest::FromJson(manifest), {dir.path(), true});
}

Campaign Naturalness(const TempDir& dir, std::size_t n_sentences = 3, const std::string& id = "nat") {
  const std::vector<std::string> sentences(PronunciationSentences().begin(),
                                           PronunciationSentences().begin() + n_sentences);
  const json m = WriteCampaignFiles(dir / id, id, Task::kNaturalness, sentences, DefaultRoster());
  return BuildCampaign(CampaignManifest::FromJson(m), {dir / id, true});
}

// ----------------------------------------------------------------- campaign

TEST(CampaignTest, PronunciationManifestGivesNineTrials) {
  TempDir dir;
  const json m = WriteCampaignFiles(dir.path(), "pron", Task::kNaturalness, PronunciationSentences(),
                                    DefaultRoster());
  const Campaign c = BuildCampaign(CampaignManifest::FromJson(m), {dir.path(), true});
  ASSERT_EQ(c.trials.size(), 9u);
  EXPECT_EQ(c.trials[0].id, "t01");
  EXPECT_EQ(c.trials[8].id, "t09");
  EXPECT_EQ(c.prompt, CanonicalPrompt(Task::kNaturalness));
  for (const Trial& t : c.trials) {
    EXPECT_EQ(t.stimuli.size(), 4u);
    EXPECT_FALSE(t.reference);
  }
  EXPECT_EQ(c.trials[3].sentence, PronunciationSentences()[3]);
}

TEST(CampaignTest, CanonicalPrompts) {
  EXPECT_EQ(CanonicalPrompt(Task::kSpeakerSimilarity),
            "Please rate each audio sample according to how similar the speaker sounds to the "
            "reference speaker");
  EXPECT_EQ(CanonicalPrompt(Task::kNaturalness),
            "Please rate each audio sample based on the pronunciation of the words and how natural "
            "it sounds");
  EXPECT_EQ(CanonicalPrompt(Task::kCodeSwitching),
            "Please rate each audio sample based on how natural the transition between Romanian "
            "and English is");
}

TEST(CampaignTest, RosterSizeIsEnforced) {
  TempDir dir;
  auto roster = DefaultRoster();
  roster.resize(2);
  const json m = WriteCampaignFiles(dir.path(), "c", Task::kNaturalness, {"a"}, roster);
  EXPECT_THROW(BuildFrom(dir, m), ValidationError);
  json five = WriteCampaignFiles(dir.path(), "c", Task::kNaturalness, {"a"}, DefaultRoster());
  five["systems"].push_back(five["systems"][0]);
  five["systems"][4]["name"] = "extra";
  EXPECT_THROW(BuildFrom(dir, five), ValidationError);
  json dup = WriteCampaignFiles(dir.path(), "c", Task::kNaturalness, {"a"}, DefaultRoster());
  dup["systems"][1]["name"] = dup["systems"][0]["name"];
  EXPECT_THROW(BuildFrom(dir, dup), ValidationError);
}

TEST(CampaignTest, MissingFilesAreAllListed) {
  TempDir dir;
  const json m = WriteCampaignFiles(dir.path(), "c", Task::kNaturalness, {"a", "b"}, DefaultRoster());
  std::filesystem::remove(dir / "audio/ro_adapter_2.wav");
  std::filesystem::remove(dir / "audio/mms_baseline_1.wav");
  try {
    BuildFrom(dir, m);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("(2, ro_adapter)"), std::string::npos) << what;
    EXPECT_NE(what.find("(1, mms_baseline)"), std::string::npos) << what;
  }
  EXPECT_NO_THROW(BuildCampaign(CampaignManifest::FromJson(m), {dir.path(), false}));
}

TEST(CampaignTest, SimilarityTrialsCarryTheReference) {
  TempDir dir;
  const json m =
      WriteCampaignFiles(dir.path(), "sim", Task::kSpeakerSimilarity, {"a", "b", "c"}, DefaultRoster());
  const Campaign c = BuildFrom(dir, m);
  for (const Trial& t : c.trials) {
    ASSERT_TRUE(t.reference);
    EXPECT_EQ(std::filesystem::path(*t.reference).filename(), "reference.wav");
  }
  json no_ref = m;
  no_ref.erase("reference");
  EXPECT_THROW(BuildFrom(dir, no_ref), ValidationError);
}

TEST(CampaignTest, JsonRoundTrip) {
  TempDir dir;
  const Campaign c = Naturalness(dir);
  c.Save(dir / "campaign.json");
  EXPECT_EQ(Campaign::Load(dir / "campaign.json").ToJson(), c.ToJson());
}

// ----------------------------------------------------------------- blinding

TEST(BlindTest, OrderIsAPermutationAndListenerSpecific) {
  TempDir dir;
  const Campaign c = Naturalness(dir, 9);
  std::size_t differing = 0;
  for (std::size_t t = 0; t < c.trials.size(); ++t) {
    const BlindTrial a = Blind(c, "alice-1", t), b = Blind(c, "bob-2", t);
    EXPECT_EQ(Blind(c, "alice-1", t).stimuli.front().key, a.stimuli.front().key);
    std::set<std::size_t> seen;
    std::vector<std::size_t> order_a, order_b;
    for (const auto& s : a.stimuli) {
      seen.insert(s.stimulus_index);
      order_a.push_back(s.stimulus_index);
      EXPECT_EQ(s.key.size(), 20u);
    }
    for (const auto& s : b.stimuli) order_b.push_back(s.stimulus_index);
    EXPECT_EQ(seen.size(), 4u);
    differing += order_a != order_b;
    EXPECT_NE(a.stimuli[0].key, b.stimuli[0].key);
  }
  EXPECT_GT(differing, 0u);
}

// ------------------------------------------------------------------ service

std::string KeyFor(const json& payload, std::size_t i) { return payload["stimuli"][i]["key"]; }

json ScoreAll(const json& payload, const std::string& listener, int base) {
  json scores = json::object();
  for (std::size_t i = 0; i < payload["stimuli"].size(); ++i) {
    scores[KeyFor(payload, i)] = (base + 17 * static_cast<int>(i)) % 101;
  }
  return {{"listener", listener}, {"trial_id", payload["trial_id"]}, {"scores", scores}};
}

TEST(ServiceTest, PayloadsNeverNameSystems) {
  TempDir dir;
  EvalService svc({Naturalness(dir, 3)}, dir / "log.jsonl");
  const std::string l = svc.RegisterListener("alice");
  for (int t = 0; t < 3; ++t) {
    const json p = svc.NextTrial("nat", l);
    const std::string text = p.dump();
    for (const auto& [name, role] : DefaultRoster()) {
      EXPECT_EQ(text.find(name), std::string::npos) << name << " in " << text;
    }
    EXPECT_EQ(text.find("audio/"), text.find("/audio/") + 1) << "file path leaked: " << text;
    svc.SubmitRatings("nat", ScoreAll(p, l, t));
  }
  EXPECT_TRUE(svc.NextTrial("nat", l)["complete"].get<bool>());
}

TEST(ServiceTest, ListenerIdsAreSanitizedAndUnique) {
  TempDir dir;
  EvalService svc({Naturalness(dir)}, dir / "log.jsonl");
  const std::string a = svc.RegisterListener("Ana <script>");
  const std::string b = svc.RegisterListener("Ana <script>");
  EXPECT_NE(a, b);
  EXPECT_EQ(a.find('<'), std::string::npos);
  EXPECT_EQ(svc.RegisterListener("").rfind("listener-", 0), 0u);
  EXPECT_EQ(svc.num_listeners(), 3u);
  EXPECT_THROW(svc.NextTrial("nat", "ghost"), NotFoundError);
  EXPECT_THROW(svc.NextTrial("nope", a), NotFoundError);
}

TEST(ServiceTest, ScoresAreValidated) {
  TempDir dir;
  EvalService svc({Naturalness(dir)}, dir / "log.jsonl");
  const std::string l = svc.RegisterListener("x");
  const json p = svc.NextTrial("nat", l);
  json body = ScoreAll(p, l, 0);

  json bad = body;
  bad["scores"][KeyFor(p, 0)] = 101;
  EXPECT_THROW(svc.SubmitRatings("nat", bad), ValidationError);
  bad["scores"][KeyFor(p, 0)] = -1;
  EXPECT_THROW(svc.SubmitRatings("nat", bad), ValidationError);
  bad["scores"][KeyFor(p, 0)] = 50.5;
  EXPECT_THROW(svc.SubmitRatings("nat", bad), ValidationError);
  bad["scores"][KeyFor(p, 0)] = "50";
  EXPECT_THROW(svc.SubmitRatings("nat", bad), ValidationError);

  json partial = body;
  partial["scores"].erase(KeyFor(p, 1));
  EXPECT_THROW(svc.SubmitRatings("nat", partial), ValidationError);
  json unknown = body;
  unknown["scores"]["deadbeef"] = 10;
  EXPECT_THROW(svc.SubmitRatings("nat", unknown), ValidationError);
  json missing = body;
  missing.erase("trial_id");
  EXPECT_THROW(svc.SubmitRatings("nat", missing), ValidationError);

  // Nothing so far reached the log.
  EXPECT_EQ(svc.NextTrial("nat", l)["trial_id"], p["trial_id"]);
  body["scores"][KeyFor(p, 0)] = 100;
  body["scores"][KeyFor(p, 1)] = 0;
  EXPECT_TRUE(svc.SubmitRatings("nat", body)["ok"].get<bool>());
  EXPECT_NE(svc.NextTrial("nat", l)["trial_id"], p["trial_id"]);
}

void ExpectMatchesOracle(const EvalService& svc, const Campaign& c) {
  const auto oracle = roadapt::testing::OracleAggregate(svc.log_path(), c.id);
  const AggregateReport r = svc.Report(c.id);
  ASSERT_EQ(r.cells.size(), c.systems.size() * c.trials.size());
  for (const Cell& cell : r.cells) {
    auto it = oracle.find({cell.system, cell.trial});
    if (it == oracle.end()) {
      EXPECT_EQ(cell.count, 0u);
      EXPECT_FALSE(cell.mean);
      continue;
    }
    EXPECT_EQ(cell.count, it->second.n);
    ASSERT_TRUE(cell.mean && cell.median);
    EXPECT_DOUBLE_EQ(*cell.mean, it->second.mean);
    EXPECT_DOUBLE_EQ(*cell.median, it->second.median);
  }
}

TEST(ServiceTest, AggregateMatchesLogAndSurvivesRestart) {
  TempDir dir;
  const Campaign c = Naturalness(dir, 3);
  std::string csv;
  {
    EvalService svc({c}, dir / "log.jsonl");
    for (int k = 0; k < 5; ++k) {
      const std::string l = svc.RegisterListener("l" + std::to_string(k));
      for (int t = 0; t < 3 - (k % 2); ++t) {
        svc.SubmitRatings("nat", ScoreAll(svc.NextTrial("nat", l), l, 13 * k + t));
      }
    }
    // A revised answer replaces the earlier one.
    const std::string l = svc.RegisterListener("reviser");
    const json p = svc.NextTrial("nat", l);
    svc.SubmitRatings("nat", ScoreAll(p, l, 1));
    svc.SubmitRatings("nat", ScoreAll(p, l, 90));
    ExpectMatchesOracle(svc, c);
    csv = svc.ReportCsv("nat");
  }
  EvalService again({c}, dir / "log.jsonl");
  EXPECT_EQ(again.num_listeners(), 6u);
  EXPECT_EQ(again.ReportCsv("nat"), csv);
  ExpectMatchesOracle(again, c);
}

TEST(ServiceTest, TornLastLineIsDropped) {
  TempDir dir;
  const Campaign c = Naturalness(dir);
  std::string csv;
  {
    EvalService svc({c}, dir / "log.jsonl");
    const std::string l = svc.RegisterListener("x");
    svc.SubmitRatings("nat", ScoreAll(svc.NextTrial("nat", l), l, 5));
    csv = svc.ReportCsv("nat");
  }
  std::ofstream(dir / "log.jsonl", std::ios::app) << R"({"type":"ratings","campa)";
  EvalService again({c}, dir / "log.jsonl");
  EXPECT_EQ(again.ReportCsv("nat"), csv);
}

TEST(ServiceTest, CsvLayout) {
  TempDir dir;
  const Campaign c = Naturalness(dir, 2);
  EvalService svc({c}, dir / "log.jsonl");
  const std::string l = svc.RegisterListener("x");
  const json p = svc.NextTrial("nat", l);
  json body = {{"listener", l}, {"trial_id", p["trial_id"]}, {"scores", json::object()}};
  for (std::size_t i = 0; i < 4; ++i) body["scores"][KeyFor(p, i)] = 40;
  svc.SubmitRatings("nat", body);
  const std::string csv = svc.ReportCsv("nat");
  EXPECT_EQ(csv.rfind("system,role,trial,n,mean,median\n", 0), 0u);
  EXPECT_NE(csv.find("ro_adapter,candidate,t01,1,40.0000,40.0000\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("ro_adapter,candidate,t02,0,,\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("ro_adapter,candidate,overall,1,40.0000,\n"), std::string::npos) << csv;
}

// --------------------------------------------------------------------- http

TEST(HttpTest, ScriptedSession) {
  TempDir dir;
  const Campaign c = Naturalness(dir, 2);
  EvalService svc({c}, dir / "log.jsonl");
  roadapt::testing::LoopbackServer server(svc);
  httplib::Client client = server.Client();

  auto reg = client.Post("/listeners", R"({"handle":"ana"})", "application/json");
  ASSERT_TRUE(reg);
  ASSERT_EQ(reg->status, 200);
  const std::string l = json::parse(reg->body)["listener_id"];

  auto next = client.Get("/campaigns/nat/next?listener=" + l);
  ASSERT_TRUE(next);
  ASSERT_EQ(next->status, 200);
  const json p = json::parse(next->body);
  EXPECT_EQ(p["progress"]["index"], 1);

  auto audio = client.Get(p["stimuli"][0]["url"].get<std::string>());
  ASSERT_TRUE(audio);
  EXPECT_EQ(audio->status, 200);
  EXPECT_EQ(audio->body.rfind("RIFF-", 0), 0u);
  EXPECT_EQ(audio->get_header_value("Content-Type"), "audio/wav");
  EXPECT_EQ(client.Get("/audio/0123456789abcdef0123")->status, 404);

  json bad = ScoreAll(p, l, 0);
  bad["scores"][KeyFor(p, 2)] = 150;
  auto rejected = client.Post("/campaigns/nat/ratings", bad.dump(), "application/json");
  ASSERT_TRUE(rejected);
  EXPECT_EQ(rejected->status, 400);
  EXPECT_NE(rejected->body.find("error"), std::string::npos);
  EXPECT_EQ(client.Post("/campaigns/nat/ratings", "{oops", "application/json")->status, 400);
  EXPECT_EQ(client.Get("/campaigns/other/next?listener=" + l)->status, 404);
  EXPECT_EQ(client.Get("/campaigns/nat/next")->status, 400);

  for (int t = 0; t < 2; ++t) {
    const json trial = json::parse(client.Get("/campaigns/nat/next?listener=" + l)->body);
    auto ok = client.Post("/campaigns/nat/ratings", ScoreAll(trial, l, 30 + t).dump(), "application/json");
    ASSERT_EQ(ok->status, 200) << ok->body;
  }
  EXPECT_TRUE(json::parse(client.Get("/campaigns/nat/next?listener=" + l)->body)["complete"].get<bool>());

  auto csv = client.Get("/campaigns/nat/report.csv");
  ASSERT_EQ(csv->status, 200);
  EXPECT_EQ(csv->get_header_value("Content-Type"), "text/csv");
  EXPECT_EQ(csv->body, svc.ReportCsv("nat"));
}

}  // namespace
}  // namespace roadapt::eval
