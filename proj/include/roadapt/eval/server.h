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

// HTTP/JSON front end for EvalService.
//
//   POST /listeners                        {handle?} -> {listener_id}
//   GET  /campaigns/{id}/next?listener=L   -> trial payload | {complete: true}
//   POST /campaigns/{id}/ratings           {listener, trial_id, scores} -> ack
//   GET  /campaigns/{id}/report.csv        -> aggregate CSV
//   GET  /audio/{key}                      -> stimulus bytes

#ifndef ROADAPT_EVAL_SERVER_H_
#define ROADAPT_EVAL_SERVER_H_

#include <filesystem>
#include <optional>

namespace httplib {
class Server;
}

namespace roadapt::eval {

class EvalService;

// Installs the API routes on `server`. When `static_dir` is set it is
// mounted at "/" (for the listener web client).
void InstallRoutes(httplib::Server& server, EvalService& service,
                   const std::optional<std::filesystem::path>& static_dir = std::nullopt);

}  // namespace roadapt::eval

#endif  // ROADAPT_EVAL_SERVER_H_
