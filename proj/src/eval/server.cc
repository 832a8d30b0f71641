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

#include "roadapt/eval/server.h"

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "roadapt/eval/service.h"

namespace roadapt::eval {
namespace {

using nlohmann::json;

void SendJson(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs `fn`, mapping library errors onto HTTP statuses.
template <typename Fn>
void Guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFoundError& e) {
    SendJson(res, {{"error", e.what()}}, 404);
  } catch (const ValidationError& e) {
    SendJson(res, {{"error", e.what()}}, 400);
  } catch (const json::exception& e) {
    SendJson(res, {{"error", std::string("malformed JSON: ") + e.what()}}, 400);
  } catch (const std::exception& e) {
    SendJson(res, {{"error", e.what()}}, 500);
  }
}

std::string ContentType(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".wav") return "audio/wav";
  if (ext == ".ogg") return "audio/ogg";
  if (ext == ".mp3") return "audio/mpeg";
  if (ext == ".flac") return "audio/flac";
  return "application/octet-stream";
}

}  // namespace

void InstallRoutes(httplib::Server& server, EvalService& service,
                   const std::optional<std::filesystem::path>& static_dir) {
  server.Post("/listeners", [&service](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      std::string handle;
      if (!req.body.empty()) {
        const json body = json::parse(req.body);
        if (body.contains("handle")) handle = body.at("handle").get<std::string>();
      }
      SendJson(res, {{"listener_id", service.RegisterListener(handle)}});
    });
  });

  server.Get(R"(/campaigns/([^/]+)/next)", [&service](const httplib::Request& req,
                                                     httplib::Response& res) {
    Guarded(res, [&] {
      if (!req.has_param("listener")) throw ValidationError("missing query parameter 'listener'");
      SendJson(res, service.NextTrial(req.matches[1], req.get_param_value("listener")));
    });
  });

  server.Post(R"(/campaigns/([^/]+)/ratings)", [&service](const httplib::Request& req,
                                                         httplib::Response& res) {
    Guarded(res, [&] { SendJson(res, service.SubmitRatings(req.matches[1], json::parse(req.body))); });
  });

  server.Get(R"(/campaigns/([^/]+)/report\.csv)", [&service](const httplib::Request& req,
                                                            httplib::Response& res) {
    Guarded(res, [&] { res.set_content(service.ReportCsv(req.matches[1]), "text/csv"); });
  });

  server.Get(R"(/audio/([0-9a-f]+))", [&service](const httplib::Request& req,
                                                httplib::Response& res) {
    Guarded(res, [&] {
      const auto path = service.AudioPath(req.matches[1]);
      if (!path) throw NotFoundError("unknown audio key");
      std::ifstream in(*path, std::ios::binary);
      if (!in) throw Error("audio unavailable");  // never echo the path
      std::ostringstream bytes;
      bytes << in.rdbuf();
      res.set_content(bytes.str(), ContentType(*path));
    });
  });

  if (static_dir) server.set_mount_point("/", static_dir->string());
}

}  // namespace roadapt::eval
